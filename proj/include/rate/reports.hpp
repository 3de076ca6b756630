#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rate/evaluation.hpp"
#include "rate/vocab.hpp"

namespace rate {

struct MetricsRow {
    std::string split;
    std::string group;  // "all", a relation surface, or a relation-type label
    std::string side;
    Metrics metrics;
};

namespace detail {

inline std::string fixed6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

}  // namespace detail

inline void write_metrics_tsv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << "split\tgroup\tside\tcount\tMR\tMRR\tHits@1\tHits@3\tHits@10\n";
    for (const auto& r : rows) {
        out << r.split << '\t' << r.group << '\t' << r.side << '\t' << r.metrics.count << '\t'
            << detail::fixed6(r.metrics.mr) << '\t' << detail::fixed6(r.metrics.mrr) << '\t'
            << detail::fixed6(r.metrics.hits1) << '\t' << detail::fixed6(r.metrics.hits3) << '\t'
            << detail::fixed6(r.metrics.hits10) << '\n';
    }
}

inline nlohmann::json metrics_row_json(const MetricsRow& r) {
    return nlohmann::json{{"split", r.split},          {"group", r.group},
                          {"side", r.side},            {"count", r.metrics.count},
                          {"MR", r.metrics.mr},        {"MRR", r.metrics.mrr},
                          {"Hits@1", r.metrics.hits1}, {"Hits@3", r.metrics.hits3},
                          {"Hits@10", r.metrics.hits10}};
}

inline void write_metrics_json(std::ostream& out, const std::vector<MetricsRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(metrics_row_json(r));
    out << arr.dump(2) << '\n';
}

inline void write_weight_norms_tsv(std::ostream& out,
                                   const std::vector<std::pair<RelationId, double>>& norms,
                                   const Vocabulary* names = nullptr) {
    out << "relation\tl1_norm\n";
    for (const auto& [r, norm] : norms) {
        out << (names != nullptr ? names->surface_of(r) : "r" + std::to_string(r)) << '\t'
            << detail::fixed6(norm) << '\n';
    }
}

inline void write_weight_norms_json(std::ostream& out,
                                    const std::vector<std::pair<RelationId, double>>& norms,
                                    const Vocabulary* names = nullptr) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [r, norm] : norms)
        arr.push_back({{"relation", names != nullptr ? names->surface_of(r)
                                                     : "r" + std::to_string(r)},
                       {"l1_norm", norm}});
    out << arr.dump(2) << '\n';
}

inline void write_relation_profiles_tsv(std::ostream& out,
                                        const std::vector<RelationProfile>& profiles,
                                        const Vocabulary* names = nullptr, bool with_norms = false) {
    out << "relation\ttype\ttails_per_head\theads_per_tail\ttriples";
    if (with_norms) out << "\tl1_norm";
    out << '\n';
    for (const auto& p : profiles) {
        out << (names != nullptr ? names->surface_of(p.relation) : "r" + std::to_string(p.relation))
            << '\t' << relation_type_name(p.type) << '\t' << detail::fixed6(p.tails_per_head)
            << '\t' << detail::fixed6(p.heads_per_tail) << '\t' << p.triple_count;
        if (with_norms) out << '\t' << detail::fixed6(p.w_l1);
        out << '\n';
    }
}

inline void write_relation_profiles_json(std::ostream& out,
                                         const std::vector<RelationProfile>& profiles,
                                         const Vocabulary* names = nullptr,
                                         bool with_norms = false) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : profiles) {
        nlohmann::json row{{"relation", names != nullptr ? names->surface_of(p.relation)
                                                         : "r" + std::to_string(p.relation)},
                           {"type", relation_type_name(p.type)},
                           {"tails_per_head", p.tails_per_head},
                           {"heads_per_tail", p.heads_per_tail},
                           {"triples", p.triple_count}};
        if (with_norms) row["l1_norm"] = p.w_l1;
        arr.push_back(std::move(row));
    }
    out << arr.dump(2) << '\n';
}

}  // namespace rate
