#pragma once

#include <algorithm>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rate/errors.hpp"
#include "rate/triple_store.hpp"
#include "rate/types.hpp"

namespace rate {

/// Read-only query structure over an encoded graph: training-split membership,
/// per-relation observed head/tail sets (the domain/range of each relation in
/// the training graph), and the all-splits membership set used for filtered
/// evaluation. Construction is single-writer; queries are safe to run
/// concurrently afterwards.
class GraphIndex {
public:
    GraphIndex(const TripleStore& train,
               const std::vector<const TripleStore*>& filter_splits = {}) {
        num_entities_ = train.num_entities();
        num_relations_ = train.num_relations();
        tails_of_.resize(num_relations_);
        heads_of_.resize(num_relations_);

        for (const Triple& x : train.triples) {
            train_set_.insert(pack_triple(x));
            filter_set_.insert(pack_triple(x));
            tails_of_[x.relation].push_back(x.tail);
            heads_of_[x.relation].push_back(x.head);
            ++out_degree_[pack_pair(x.head, x.relation)];
            ++in_degree_[pack_pair(x.tail, x.relation)];
        }
        for (auto* split : filter_splits)
            for (const Triple& x : split->triples) filter_set_.insert(pack_triple(x));

        for (auto& v : tails_of_) dedup_sort(v);
        for (auto& v : heads_of_) dedup_sort(v);
    }

    std::size_t num_entities() const noexcept { return num_entities_; }
    std::size_t num_relations() const noexcept { return num_relations_; }
    std::size_t train_size() const noexcept { return train_set_.size(); }

    bool in_train(EntityId h, RelationId r, EntityId t) const {
        return train_set_.count(pack_triple(h, r, t)) != 0;
    }
    bool in_train(const Triple& x) const { return in_train(x.head, x.relation, x.tail); }

    /// Filtered-evaluation membership: true iff the triple appears in any split
    /// the index was built over (train/valid/test).
    bool is_known_triple(const Triple& x) const {
        return filter_set_.count(pack_triple(x)) != 0;
    }

    /// Observed tails (range) / heads (domain) of a relation in the training
    /// split, sorted ascending.
    const std::vector<EntityId>& tails_of_relation(RelationId r) const { return tails_of_.at(r); }
    const std::vector<EntityId>& heads_of_relation(RelationId r) const { return heads_of_.at(r); }

    bool in_relation_range(RelationId r, EntityId t) const {
        const auto& v = tails_of_.at(r);
        return std::binary_search(v.begin(), v.end(), t);
    }
    bool in_relation_domain(RelationId r, EntityId h) const {
        const auto& v = heads_of_.at(r);
        return std::binary_search(v.begin(), v.end(), h);
    }

    /// Number of distinct training tails t' with (h,r,t') present.
    std::size_t out_degree(EntityId h, RelationId r) const {
        auto it = out_degree_.find(pack_pair(h, r));
        return it == out_degree_.end() ? 0 : it->second;
    }
    std::size_t in_degree(EntityId t, RelationId r) const {
        auto it = in_degree_.find(pack_pair(t, r));
        return it == in_degree_.end() ? 0 : it->second;
    }

    /// Type-constrained tail corruptions: observed tails of r not already
    /// linked to h. The oracle tail itself is always excluded.
    std::vector<EntityId> candidate_tail_corruptions(const Triple& x) const {
        std::vector<EntityId> out;
        const auto& range = tails_of_.at(x.relation);
        out.reserve(range.size() - std::min<std::size_t>(range.size(), out_degree(x.head, x.relation)));
        for (EntityId t : range)
            if (!in_train(x.head, x.relation, t)) out.push_back(t);
        return out;
    }

    /// Mirror of the tail set: observed heads of r not already linked to t.
    std::vector<EntityId> candidate_head_corruptions(const Triple& x) const {
        std::vector<EntityId> out;
        const auto& domain = heads_of_.at(x.relation);
        out.reserve(domain.size() - std::min<std::size_t>(domain.size(), in_degree(x.tail, x.relation)));
        for (EntityId h : domain)
            if (!in_train(h, x.relation, x.tail)) out.push_back(h);
        return out;
    }

    std::size_t candidate_tail_count(const Triple& x) const {
        return tails_of_.at(x.relation).size() - out_degree(x.head, x.relation);
    }
    std::size_t candidate_head_count(const Triple& x) const {
        return heads_of_.at(x.relation).size() - in_degree(x.tail, x.relation);
    }

private:
    static void dedup_sort(std::vector<EntityId>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::size_t num_entities_ = 0;
    std::size_t num_relations_ = 0;
    std::unordered_set<std::uint64_t> train_set_;
    std::unordered_set<std::uint64_t> filter_set_;
    std::vector<std::vector<EntityId>> tails_of_;
    std::vector<std::vector<EntityId>> heads_of_;
    std::unordered_map<std::uint64_t, std::uint32_t> out_degree_;
    std::unordered_map<std::uint64_t, std::uint32_t> in_degree_;
};

}  // namespace rate
