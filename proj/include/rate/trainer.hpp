#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rate/adam.hpp"
#include "rate/errors.hpp"
#include "rate/evaluation.hpp"
#include "rate/gradients.hpp"
#include "rate/graph_index.hpp"
#include "rate/rng.hpp"
#include "rate/sampling.hpp"
#include "rate/scoring.hpp"
#include "rate/triple_store.hpp"

namespace rate {

struct TrainingConfig {
    std::size_t batch_size = 1024;
    double learning_rate = 5e-5;
    double weight_decay = 0.01;  // mu, L1 coefficient on the weight matrices
    std::size_t negatives = 128;
    std::size_t epochs = 100;
    std::uint64_t max_steps = 0;  // 0 = bounded by epochs only

    // Ablation toggles. All default to the full model; each one has a
    // dedicated reduced form (shared W, frozen standard product, no W
    // regularizer, complement-only sampling, unweighted negatives).
    bool relation_adaptive = true;
    bool weighted_product = true;
    bool w_l1_reg = true;
    bool local_cognitive_sampling = true;
    bool uniform_beta = false;

    double initial_gamma = 0.5;
    double head_corruption_prob = 0.5;
    double temperature = 1.0;
    double w_init_noise = 0.01;

    std::size_t eval_every = 0;       // epochs between validation passes; 0 = never
    std::size_t valid_subsample = 0;  // cap on validation triples per pass; 0 = all
    std::size_t checkpoint_every = 0; // epochs between checkpoint callbacks; 0 = never
    std::size_t threads = 1;          // used by validation ranking
};

struct EpochLog {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double gamma = 0.0;
    double mean_score_n = std::numeric_limits<double>::quiet_NaN();
    double mean_score_nbar = std::numeric_limits<double>::quiet_NaN();
    double valid_mrr = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t steps = 0;  // cumulative optimizer steps at epoch end
};

struct TrainCallbacks {
    std::function<void(std::uint64_t step, double loss)> on_step;
    std::function<void(const EpochLog&)> on_epoch;
    std::function<void(const Triple&, const NegativeBatch&)> on_negatives;
    std::function<void(std::size_t epoch, const ParameterStore&)> on_checkpoint;
};

struct TrainResult {
    ParameterStore params;       // state after the last step
    ParameterStore best_params;  // best validation MRR; == params if never evaluated
    std::vector<EpochLog> log;
    double best_valid_mrr = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t steps = 0;
};

namespace detail {

inline double mean_of(std::span<const double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

/// Full training loop: per-epoch shuffle, negative sampling and scoring,
/// self-adversarial weighting, analytic gradients, one Adam step per
/// minibatch, gamma update at epoch end. Deterministic for a fixed seed and
/// single-threaded validation order.
inline TrainResult train(const TripleStore& store, const GraphIndex& index, const ModelConfig& mc,
                         const TrainingConfig& tc, const std::vector<Triple>* valid = nullptr,
                         const TrainCallbacks& cb = {}) {
    if (store.triples.empty()) throw TrainingError("train: empty training split");
    if (tc.batch_size == 0 || tc.negatives == 0)
        throw ContractError("train: batch_size and negatives must be positive");
    if (tc.learning_rate <= 0.0) throw ContractError("train: learning_rate must be positive");
    if (tc.weight_decay < 0.0) throw ContractError("train: weight_decay must be >= 0");

    WeightInit winit;
    winit.shared = !tc.relation_adaptive;
    winit.identity = !tc.weighted_product;
    winit.noise = tc.w_init_noise;

    TrainResult result;
    result.params = init_parameters(mc, store.num_entities(), store.num_relations(), winit);
    ParameterStore& params = result.params;

    OptimizerState opt(params);

    LossOptions lopt;
    lopt.margin = mc.margin;
    lopt.mu = tc.weight_decay;
    // Freezing the weighted product pins W at the standard matrix, so the
    // regularizer would add a constant; drop it to keep the loss comparable.
    lopt.train_w = tc.weighted_product;
    lopt.w_l1_reg = tc.w_l1_reg && tc.weighted_product;

    SamplerConfig scfg;
    scfg.num_negatives = tc.negatives;
    scfg.initial_gamma = tc.initial_gamma;
    scfg.head_corruption_prob = tc.head_corruption_prob;
    scfg.temperature = tc.temperature;
    scfg.local_cognitive = tc.local_cognitive_sampling;
    scfg.uniform_beta = tc.uniform_beta;

    SamplerState sstate;
    sstate.gamma = tc.initial_gamma;

    auto shuffle_rng = make_rng(mc.seed, RngStream::shuffle);
    auto sampler_rng = make_rng(mc.seed, RngStream::sampler);
    auto eval_rng = make_rng(mc.seed, RngStream::eval);

    std::vector<std::size_t> order(store.triples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<EntityId> neg_ids;
    std::vector<double> neg_scores;

    bool stop = false;
    for (std::size_t epoch = 1; epoch <= tc.epochs && !stop; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        double sum_n = 0.0, sum_nbar = 0.0;
        std::size_t cnt_n = 0, cnt_nbar = 0;

        for (std::size_t start = 0; start < order.size() && !stop; start += tc.batch_size) {
            const std::size_t end = std::min(order.size(), start + tc.batch_size);
            std::vector<BatchItem> batch;
            batch.reserve(end - start);

            for (std::size_t k = start; k < end; ++k) {
                const Triple& x = store.triples[order[k]];
                BatchItem item;
                item.positive = x;
                item.negatives =
                    sample_negatives(index, x, tc.negatives, sstate, sampler_rng, scfg);
                auto& nb = item.negatives;

                neg_ids.resize(nb.size());
                for (std::size_t i = 0; i < nb.size(); ++i) neg_ids[i] = nb.entity(i);
                neg_scores.resize(nb.size());
                if (nb.side == CorruptSide::tail)
                    score_tail_candidates(params, x.head, x.relation, neg_ids, neg_scores);
                else
                    score_head_candidates(params, neg_ids, x.relation, x.tail, neg_scores);
                nb.scores = neg_scores;
                nb.beta = scfg.uniform_beta ? uniform_weights(nb.size())
                                            : adversarial_weights(nb.scores, scfg.temperature);

                if (scfg.local_cognitive) accumulate_gamma_term(sstate, nb);
                if (!nb.pool_n.empty()) {
                    sum_n += detail::mean_of(
                        std::span<const double>(nb.scores).subspan(0, nb.pool_n.size()));
                    ++cnt_n;
                }
                if (!nb.pool_nbar.empty()) {
                    sum_nbar += detail::mean_of(
                        std::span<const double>(nb.scores).subspan(nb.pool_n.size()));
                    ++cnt_nbar;
                }
                if (cb.on_negatives) cb.on_negatives(x, nb);
                batch.push_back(std::move(item));
            }

            double batch_loss_value = 0.0;
            GradientSet grads = loss_gradients(params, batch, lopt, &batch_loss_value);
            if (!std::isfinite(batch_loss_value)) {
                std::string ids;
                for (const auto& item : batch) {
                    if (!ids.empty()) ids += ",";
                    ids += std::to_string(item.positive.head) + ":" +
                           std::to_string(item.positive.relation) + ":" +
                           std::to_string(item.positive.tail);
                }
                throw TrainingError("non-finite loss at step " +
                                    std::to_string(result.steps + 1) + "; batch [" + ids + "]");
            }
            adam_step(params, grads, opt, tc.learning_rate);

            ++result.steps;
            loss_sum += batch_loss_value;
            ++batches;
            if (cb.on_step) cb.on_step(result.steps, batch_loss_value);
            if (tc.max_steps != 0 && result.steps >= tc.max_steps) stop = true;
        }

        EpochLog log;
        log.epoch = epoch;
        log.steps = result.steps;
        log.mean_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
        log.mean_score_n = cnt_n > 0 ? sum_n / static_cast<double>(cnt_n)
                                     : std::numeric_limits<double>::quiet_NaN();
        log.mean_score_nbar = cnt_nbar > 0 ? sum_nbar / static_cast<double>(cnt_nbar)
                                           : std::numeric_limits<double>::quiet_NaN();
        log.gamma = scfg.local_cognitive ? finalize_gamma(sstate) : 0.0;

        if (valid != nullptr && !valid->empty() && tc.eval_every != 0 &&
            (epoch % tc.eval_every == 0 || epoch == tc.epochs || stop)) {
            std::vector<Triple> subset;
            if (tc.valid_subsample != 0 && tc.valid_subsample < valid->size()) {
                std::vector<std::size_t> pick(valid->size());
                std::iota(pick.begin(), pick.end(), std::size_t{0});
                std::shuffle(pick.begin(), pick.end(), eval_rng);
                subset.reserve(tc.valid_subsample);
                for (std::size_t i = 0; i < tc.valid_subsample; ++i)
                    subset.push_back((*valid)[pick[i]]);
            } else {
                subset = *valid;
            }
            log.valid_mrr = evaluate(params, index, subset, tc.threads).mrr;
            if (!(result.best_valid_mrr >= log.valid_mrr)) {  // NaN-aware strict improvement
                result.best_valid_mrr = log.valid_mrr;
                result.best_params = params;
            }
        }

        if (cb.on_checkpoint && tc.checkpoint_every != 0 &&
            (epoch % tc.checkpoint_every == 0 || epoch == tc.epochs || stop))
            cb.on_checkpoint(epoch, params);

        result.log.push_back(log);
        if (cb.on_epoch) cb.on_epoch(log);
    }

    if (result.best_params.num_entities == 0) result.best_params = result.params;
    return result;
}

/// One formatted log line per epoch, the shape the CLI prints.
inline std::string format_epoch(const EpochLog& log) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %zu loss %.6f gamma %.4f scoreN %.4f scoreNbar %.4f",
                  log.epoch, log.mean_loss, log.gamma, log.mean_score_n, log.mean_score_nbar);
    std::string line(buf);
    if (!std::isnan(log.valid_mrr)) {
        std::snprintf(buf, sizeof(buf), " validMRR %.4f", log.valid_mrr);
        line += buf;
    }
    return line;
}

}  // namespace rate
