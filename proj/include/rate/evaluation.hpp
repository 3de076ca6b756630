#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rate/errors.hpp"
#include "rate/graph_index.hpp"
#include "rate/scoring.hpp"
#include "rate/triple_store.hpp"
#include "rate/types.hpp"

namespace rate {

struct Metrics {
    double mr = 0.0;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    std::size_t count = 0;
};

struct RankedEvent {
    Triple triple;
    CorruptSide side = CorruptSide::tail;
    double rank = 0.0;
};

enum class SideFilter { head, tail, both };

namespace detail {

inline double rank_with_scores(const GraphIndex& index, const Triple& x, CorruptSide side,
                               std::span<const double> scores) {
    const EntityId oracle = side == CorruptSide::tail ? x.tail : x.head;
    const double oracle_score = scores[oracle];
    std::size_t better = 0, tied = 0;
    Triple cand = x;
    for (EntityId e = 0; e < scores.size(); ++e) {
        if (e == oracle) continue;
        (side == CorruptSide::tail ? cand.tail : cand.head) = e;
        if (index.is_known_triple(cand)) continue;  // filtered setting
        if (scores[e] > oracle_score)
            ++better;
        else if (scores[e] == oracle_score)
            ++tied;
    }
    // Random tie-break reported as the expected rank.
    return 1.0 + static_cast<double>(better) + 0.5 * static_cast<double>(tied);
}

}  // namespace detail

/// Filtered rank of the oracle entity on one side: every known triple from any
/// split is removed from the candidate list (never the oracle itself); ties
/// count half.
inline double filtered_rank(const ParameterStore& p, const GraphIndex& index, const Triple& x,
                            CorruptSide side) {
    const std::size_t n = index.num_entities();
    std::vector<EntityId> ids(n);
    std::iota(ids.begin(), ids.end(), EntityId{0});
    std::vector<double> scores(n);
    if (side == CorruptSide::tail)
        score_tail_candidates(p, x.head, x.relation, ids, scores);
    else
        score_head_candidates(p, ids, x.relation, x.tail, scores);
    return detail::rank_with_scores(index, x, side, scores);
}

/// Ranks every requested (triple, side) event. Embarrassingly parallel;
/// results land in a fixed slot per event, so the output does not depend on
/// thread scheduling.
inline std::vector<RankedEvent> rank_events(const ParameterStore& p, const GraphIndex& index,
                                            std::span<const Triple> triples,
                                            SideFilter sides = SideFilter::both,
                                            std::size_t threads = 1) {
    std::vector<RankedEvent> events;
    for (const Triple& x : triples) {
        if (sides != SideFilter::tail) events.push_back({x, CorruptSide::head, 0.0});
        if (sides != SideFilter::head) events.push_back({x, CorruptSide::tail, 0.0});
    }

    auto worker = [&](std::size_t begin, std::size_t end) {
        const std::size_t n = index.num_entities();
        std::vector<EntityId> ids(n);
        std::iota(ids.begin(), ids.end(), EntityId{0});
        std::vector<double> scores(n);
        for (std::size_t k = begin; k < end; ++k) {
            auto& ev = events[k];
            if (ev.side == CorruptSide::tail)
                score_tail_candidates(p, ev.triple.head, ev.triple.relation, ids, scores);
            else
                score_head_candidates(p, ids, ev.triple.relation, ev.triple.tail, scores);
            ev.rank = detail::rank_with_scores(index, ev.triple, ev.side, scores);
        }
    };

    if (threads <= 1 || events.size() < 2) {
        worker(0, events.size());
    } else {
        const std::size_t n_threads = std::min(threads, events.size());
        std::vector<std::thread> pool;
        const std::size_t chunk = (events.size() + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(events.size(), begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return events;
}

inline Metrics aggregate_metrics(std::span<const RankedEvent> events) {
    Metrics m;
    m.count = events.size();
    if (events.empty()) return m;
    for (const auto& ev : events) {
        m.mr += ev.rank;
        m.mrr += 1.0 / ev.rank;
        m.hits1 += ev.rank <= 1.0 ? 1.0 : 0.0;
        m.hits3 += ev.rank <= 3.0 ? 1.0 : 0.0;
        m.hits10 += ev.rank <= 10.0 ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(events.size());
    m.mr /= n;
    m.mrr /= n;
    m.hits1 /= n;
    m.hits3 /= n;
    m.hits10 /= n;
    return m;
}

/// Headline filtered metrics over both prediction sides (2 events per triple).
inline Metrics evaluate(const ParameterStore& p, const GraphIndex& index,
                        std::span<const Triple> triples, std::size_t threads = 1) {
    return aggregate_metrics(rank_events(p, index, triples, SideFilter::both, threads));
}

// --- relation profiles ---------------------------------------------------

enum class RelationType { one_to_one, one_to_many, many_to_one, many_to_many };

inline const char* relation_type_name(RelationType t) {
    switch (t) {
        case RelationType::one_to_one: return "1-to-1";
        case RelationType::one_to_many: return "1-to-M";
        case RelationType::many_to_one: return "M-to-1";
        case RelationType::many_to_many: return "M-to-M";
    }
    return "?";
}

struct RelationProfile {
    RelationId relation = 0;
    RelationType type = RelationType::one_to_one;
    double tails_per_head = 0.0;
    double heads_per_tail = 0.0;
    std::size_t triple_count = 0;
    double w_l1 = 0.0;  // filled for RatE by the analyze pipeline
};

/// Average tails-per-head / heads-per-tail per relation; a side is "many"
/// when its average exceeds 1.5.
inline std::vector<RelationProfile> classify_relation_types(const TripleStore& store) {
    const std::size_t nr = store.num_relations();
    std::vector<std::unordered_set<EntityId>> heads(nr), tails(nr);
    std::vector<std::size_t> counts(nr, 0);
    for (const Triple& x : store.triples) {
        heads[x.relation].insert(x.head);
        tails[x.relation].insert(x.tail);
        ++counts[x.relation];
    }
    std::vector<RelationProfile> out(nr);
    for (RelationId r = 0; r < nr; ++r) {
        auto& prof = out[r];
        prof.relation = r;
        prof.triple_count = counts[r];
        if (counts[r] == 0) continue;
        prof.tails_per_head = static_cast<double>(counts[r]) / static_cast<double>(heads[r].size());
        prof.heads_per_tail = static_cast<double>(counts[r]) / static_cast<double>(tails[r].size());
        const bool many_tails = prof.tails_per_head > 1.5;
        const bool many_heads = prof.heads_per_tail > 1.5;
        prof.type = many_tails ? (many_heads ? RelationType::many_to_many : RelationType::one_to_many)
                               : (many_heads ? RelationType::many_to_one : RelationType::one_to_one);
    }
    return out;
}

// --- grouped metrics ------------------------------------------------------

enum class Grouping { relation, relation_type };

struct GroupMetrics {
    std::string group;
    std::string side;
    Metrics metrics;
};

/// Evaluate restricted to each group. Relation grouping emits one row per
/// relation observed in the event set; type grouping emits all four types
/// (count 0 rows included so table layouts stay fixed).
inline std::vector<GroupMetrics> metrics_by_group(
    const ParameterStore& p, const GraphIndex& index, std::span<const Triple> triples,
    Grouping grouping, SideFilter sides, const std::vector<RelationProfile>& profiles,
    const Vocabulary* relation_names = nullptr, std::size_t threads = 1) {
    const auto events = rank_events(p, index, triples, sides, threads);
    const std::string side_label = sides == SideFilter::both
                                       ? "both"
                                       : (sides == SideFilter::head ? "head" : "tail");

    auto group_of = [&](const RankedEvent& ev) -> std::string {
        if (grouping == Grouping::relation)
            return relation_names != nullptr ? relation_names->surface_of(ev.triple.relation)
                                             : "r" + std::to_string(ev.triple.relation);
        return relation_type_name(profiles.at(ev.triple.relation).type);
    };

    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<RankedEvent>> buckets;
    if (grouping == Grouping::relation_type)
        for (auto t : {RelationType::one_to_one, RelationType::one_to_many,
                       RelationType::many_to_one, RelationType::many_to_many}) {
            order.push_back(relation_type_name(t));
            buckets[order.back()];
        }
    for (const auto& ev : events) {
        const std::string key = group_of(ev);
        if (buckets.find(key) == buckets.end()) order.push_back(key);
        buckets[key].push_back(ev);
    }

    std::vector<GroupMetrics> rows;
    rows.reserve(order.size());
    for (const auto& key : order)
        rows.push_back({key, side_label, aggregate_metrics(buckets[key])});
    return rows;
}

/// L1 norm of each relation's weight matrix (RatE only).
inline std::vector<std::pair<RelationId, double>> weight_norm_report(const ParameterStore& p) {
    if (p.kind != ModelKind::rate)
        throw ContractError("weight_norm_report: parameters are not a RatE model");
    std::vector<std::pair<RelationId, double>> out;
    out.reserve(p.num_relations);
    for (RelationId r = 0; r < p.num_relations; ++r) out.emplace_back(r, p.weights(r).l1());
    return out;
}

}  // namespace rate
