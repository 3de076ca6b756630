#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "rate/errors.hpp"
#include "rate/graph_index.hpp"
#include "rate/rng.hpp"
#include "rate/types.hpp"

namespace rate {

struct SamplerConfig {
    std::size_t num_negatives = 128;       // n
    double initial_gamma = 0.5;
    double head_corruption_prob = 0.5;     // side chosen uniformly by default
    double temperature = 1.0;              // beta softmax temperature
    bool local_cognitive = true;           // off: gamma pinned to 0, no updates
    bool uniform_beta = false;             // on: skip self-adversarial weighting
};

/// Negatives drawn for one positive triple. pool_n holds type-constrained
/// corruptions, pool_nbar complement corruptions; scores and beta cover the
/// concatenation pool_n ++ pool_nbar and are filled by the caller once the
/// corrupted triples have been scored.
struct NegativeBatch {
    CorruptSide side = CorruptSide::tail;
    std::vector<EntityId> pool_n;
    std::vector<EntityId> pool_nbar;
    std::vector<double> scores;
    std::vector<double> beta;

    std::size_t size() const noexcept { return pool_n.size() + pool_nbar.size(); }

    EntityId entity(std::size_t i) const {
        return i < pool_n.size() ? pool_n[i] : pool_nbar[i - pool_n.size()];
    }

    Triple corrupted(const Triple& positive, std::size_t i) const {
        Triple x = positive;
        (side == CorruptSide::head ? x.head : x.tail) = entity(i);
        return x;
    }
};

/// Mixing coefficient gamma plus the per-epoch running average that updates it.
struct SamplerState {
    double gamma = 0.5;
    double epoch_accumulator = 0.0;
    std::size_t triples_seen = 0;
    std::size_t triples_skipped = 0;  // one pool empty; excluded from the update
};

namespace detail {

// Uniform draw from {pool} = sorted `universe` minus members of the training
// graph, given the exact pool size. Rejection sampling while acceptance is
// likely; explicit materialization when the pool is a thin slice.
class ConstrainedPool {
public:
    ConstrainedPool(const GraphIndex& index, const Triple& x, CorruptSide side)
        : index_(index), positive_(x), side_(side) {
        const auto& uni = side == CorruptSide::tail ? index.tails_of_relation(x.relation)
                                                    : index.heads_of_relation(x.relation);
        universe_ = &uni;
        pool_size_ = side == CorruptSide::tail ? index.candidate_tail_count(x)
                                               : index.candidate_head_count(x);
        if (pool_size_ > 0 && pool_size_ * 8 < universe_->size()) {
            materialized_ = side == CorruptSide::tail ? index.candidate_tail_corruptions(x)
                                                      : index.candidate_head_corruptions(x);
        }
    }

    std::size_t size() const noexcept { return pool_size_; }

    EntityId draw(std::mt19937_64& rng) const {
        if (!materialized_.empty()) return materialized_[uniform_index(rng, materialized_.size())];
        for (;;) {
            const EntityId e = (*universe_)[uniform_index(rng, universe_->size())];
            if (!excluded(e)) return e;
        }
    }

private:
    bool excluded(EntityId e) const {
        return side_ == CorruptSide::tail ? index_.in_train(positive_.head, positive_.relation, e)
                                          : index_.in_train(e, positive_.relation, positive_.tail);
    }

    const GraphIndex& index_;
    Triple positive_;
    CorruptSide side_;
    const std::vector<EntityId>* universe_ = nullptr;
    std::size_t pool_size_ = 0;
    std::vector<EntityId> materialized_;
};

// The complement pool is exactly the entities outside the relation's observed
// range (tail side) or domain (head side): anything inside the range either
// forms a training triple or belongs to the type-constrained pool.
class ComplementPool {
public:
    ComplementPool(const GraphIndex& index, RelationId rel, CorruptSide side)
        : index_(index), rel_(rel), side_(side) {
        const auto& uni = side == CorruptSide::tail ? index.tails_of_relation(rel)
                                                    : index.heads_of_relation(rel);
        pool_size_ = index.num_entities() - uni.size();
        if (pool_size_ > 0 && pool_size_ * 8 < index.num_entities()) {
            materialized_.reserve(pool_size_);
            auto it = uni.begin();
            for (EntityId e = 0; e < index.num_entities(); ++e) {
                if (it != uni.end() && *it == e) {
                    ++it;
                    continue;
                }
                materialized_.push_back(e);
            }
        }
    }

    std::size_t size() const noexcept { return pool_size_; }

    EntityId draw(std::mt19937_64& rng) const {
        if (!materialized_.empty()) return materialized_[uniform_index(rng, materialized_.size())];
        for (;;) {
            const EntityId e = static_cast<EntityId>(uniform_index(rng, index_.num_entities()));
            const bool inside = side_ == CorruptSide::tail ? index_.in_relation_range(rel_, e)
                                                           : index_.in_relation_domain(rel_, e);
            if (!inside) return e;
        }
    }

private:
    const GraphIndex& index_;
    RelationId rel_;
    CorruptSide side_;
    std::size_t pool_size_ = 0;
    std::vector<EntityId> materialized_;
};

}  // namespace detail

/// Draw n negatives for one positive: round(gamma*n) from the type-constrained
/// pool, the rest from the complement, both uniform with replacement. An empty
/// pool is backfilled from the other one; if both are empty the graph cannot
/// be corrupted on that side and a SamplingError is raised.
inline NegativeBatch sample_negatives(const GraphIndex& index, const Triple& x, std::size_t n,
                                      const SamplerState& state, std::mt19937_64& rng,
                                      const SamplerConfig& config = {}) {
    if (n == 0) throw ContractError("sample_negatives: n must be >= 1");

    NegativeBatch batch;
    batch.side = uniform_real(rng, 0.0, 1.0) < config.head_corruption_prob ? CorruptSide::head
                                                                           : CorruptSide::tail;

    detail::ConstrainedPool pool_n(index, x, batch.side);
    detail::ComplementPool pool_nbar(index, x.relation, batch.side);
    if (pool_n.size() == 0 && pool_nbar.size() == 0)
        throw SamplingError("no admissible corruption for " + std::string(side_name(batch.side)) +
                            " of relation " + std::to_string(x.relation));

    const double gamma = config.local_cognitive ? state.gamma : 0.0;
    std::size_t k = static_cast<std::size_t>(
        std::clamp(std::llround(gamma * static_cast<double>(n)), 0ll, static_cast<long long>(n)));
    if (pool_n.size() == 0) k = 0;
    if (pool_nbar.size() == 0) k = n;

    batch.pool_n.reserve(k);
    for (std::size_t i = 0; i < k; ++i) batch.pool_n.push_back(pool_n.draw(rng));
    batch.pool_nbar.reserve(n - k);
    for (std::size_t i = k; i < n; ++i) batch.pool_nbar.push_back(pool_nbar.draw(rng));
    return batch;
}

/// Softmax over negative-triple scores (max-subtracted). These are the
/// self-adversarial loss weights; they sum to 1.
inline std::vector<double> adversarial_weights(std::span<const double> scores,
                                               double temperature = 1.0) {
    if (scores.empty()) throw ContractError("adversarial_weights: empty score array");
    const double m = *std::max_element(scores.begin(), scores.end());
    std::vector<double> beta(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        beta[i] = std::exp((scores[i] - m) / temperature);
        z += beta[i];
    }
    for (double& b : beta) b /= z;
    return beta;
}

inline std::vector<double> uniform_weights(std::size_t n) {
    if (n == 0) throw ContractError("uniform_weights: empty");
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

namespace detail {

inline double log_mean_exp(std::span<const double> v, double shift) {
    double s = 0.0;
    for (double x : v) s += std::exp(x - shift);
    return shift + std::log(s / static_cast<double>(v.size()));
}

}  // namespace detail

/// Adds this batch's term 1/(1 + meanExp(Nbar)/meanExp(N)) to the running
/// epoch average. Batches with an empty pool leave the average unchanged and
/// are counted as skipped.
inline void accumulate_gamma_term(SamplerState& state, const NegativeBatch& batch) {
    if (batch.pool_n.empty() || batch.pool_nbar.empty()) {
        ++state.triples_skipped;
        return;
    }
    if (batch.scores.size() != batch.size())
        throw ContractError("accumulate_gamma_term: scores not filled");
    std::span<const double> all(batch.scores);
    const auto n_scores = all.subspan(0, batch.pool_n.size());
    const auto nbar_scores = all.subspan(batch.pool_n.size());
    const double shift = *std::max_element(all.begin(), all.end());
    const double lme_n = detail::log_mean_exp(n_scores, shift);
    const double lme_nbar = detail::log_mean_exp(nbar_scores, shift);
    // 1/(1 + exp(lme_nbar - lme_n)) computed as a logistic for stability.
    const double term = 1.0 / (1.0 + std::exp(lme_nbar - lme_n));
    state.epoch_accumulator += term;
    ++state.triples_seen;
}

/// End-of-epoch gamma update: the mean of the accumulated per-triple terms.
/// Each term lies in (0,1), so gamma stays in [0,1] by construction. Resets
/// the accumulators; gamma is left unchanged on an empty epoch.
inline double finalize_gamma(SamplerState& state) {
    if (state.triples_seen > 0)
        state.gamma = state.epoch_accumulator / static_cast<double>(state.triples_seen);
    state.epoch_accumulator = 0.0;
    state.triples_seen = 0;
    state.triples_skipped = 0;
    return state.gamma;
}

}  // namespace rate
