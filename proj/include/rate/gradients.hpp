#pragma once

#include <array>
#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "rate/errors.hpp"
#include "rate/loss.hpp"
#include "rate/sampling.hpp"
#include "rate/scoring.hpp"
#include "rate/types.hpp"

namespace rate {

/// One positive triple with its sampled (and scored, beta-weighted) negatives.
struct BatchItem {
    Triple positive;
    NegativeBatch negatives;
};

/// Sparse per-batch gradients keyed by the entity/relation ids the batch
/// touched. Rows are dense per id.
struct GradientSet {
    std::size_t dim = 0;

    struct EntityGrad {
        std::vector<double> re, im;
    };
    std::unordered_map<EntityId, EntityGrad> entity;
    std::unordered_map<RelationId, std::vector<double>> theta;
    std::unordered_map<std::size_t, std::array<double, 8>> weight;  // key: matrix slot

    EntityGrad& entity_row(EntityId e) {
        auto [it, fresh] = entity.try_emplace(e);
        if (fresh) {
            it->second.re.assign(dim, 0.0);
            it->second.im.assign(dim, 0.0);
        }
        return it->second;
    }

    std::vector<double>& theta_row(RelationId r) {
        auto [it, fresh] = theta.try_emplace(r);
        if (fresh) it->second.assign(dim, 0.0);
        return it->second;
    }

    std::array<double, 8>& weight_row(std::size_t slot) {
        auto [it, fresh] = weight.try_emplace(slot);
        if (fresh) it->second.fill(0.0);
        return it->second;
    }
};

/// Minimum distance-to-kink seen per touched coordinate, for excluding
/// L1 non-differentiable points from finite-difference comparisons.
struct KinkMap {
    std::size_t dim = 0;
    std::unordered_map<EntityId, std::vector<double>> entity;  // shared across re/im
    std::unordered_map<RelationId, std::vector<double>> theta;
    std::unordered_map<std::size_t, std::array<double, 8>> weight;

    static constexpr double kFar = 1e300;

    std::vector<double>& entity_row(EntityId e) {
        auto [it, fresh] = entity.try_emplace(e);
        if (fresh) it->second.assign(dim, kFar);
        return it->second;
    }
    std::vector<double>& theta_row(RelationId r) {
        auto [it, fresh] = theta.try_emplace(r);
        if (fresh) it->second.assign(dim, kFar);
        return it->second;
    }
    std::array<double, 8>& weight_row(std::size_t slot) {
        auto [it, fresh] = weight.try_emplace(slot);
        if (fresh) it->second.fill(kFar);
        return it->second;
    }
};

struct LossOptions {
    double margin = 9.0;
    double mu = 0.01;        // L1 weight decay on W
    bool w_l1_reg = true;
    bool train_w = true;     // false: weight matrices frozen (standard product)
};

namespace detail {

struct Residual {
    std::vector<double> re, im;  // g(h, r) - t per dimension
    double score = 0.0;          // -sum |residual_i|
};

inline Residual residual_of(const ParameterStore& p, const Triple& x) {
    Residual res;
    res.re.resize(p.dim);
    res.im.resize(p.dim);
    translate(p, x.head, x.relation, res.re, res.im);
    const double* tre = &p.entity_re[x.tail * p.dim];
    const double* tim = &p.entity_im[x.tail * p.dim];
    const bool real_only = p.kind == ModelKind::transe;  // imaginary parts unused
    double s = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) {
        res.re[i] -= tre[i];
        if (!real_only) res.im[i] -= tim[i];
        s += std::sqrt(res.re[i] * res.re[i] + res.im[i] * res.im[i]);
    }
    res.score = -s;
    return res;
}

// Accumulates coeff * d f / d(params) for one triple, where f is the triple
// score and the residual has been computed at the current parameters.
// coeff already folds in the loss derivative and the batch-mean factor.
inline void backprop_triple(const ParameterStore& p, const Triple& x, const Residual& res,
                            double coeff, bool train_w, GradientSet& grads, KinkMap* kinks) {
    auto& gh = grads.entity_row(x.head);
    auto& gt = grads.entity_row(x.tail);
    auto& gth = grads.theta_row(x.relation);
    const std::size_t slot = p.w_offset(x.relation) / 8;
    std::array<double, 8>* gw =
        (p.kind == ModelKind::rate && train_w) ? &grads.weight_row(slot) : nullptr;

    std::vector<double>* kh = nullptr;
    std::vector<double>* kt = nullptr;
    std::vector<double>* kth = nullptr;
    std::array<double, 8>* kw = nullptr;
    if (kinks != nullptr) {
        kh = &kinks->entity_row(x.head);
        kt = &kinks->entity_row(x.tail);
        kth = &kinks->theta_row(x.relation);
        if (p.kind == ModelKind::rate && train_w) kw = &kinks->weight_row(slot);
    }

    const double* hre = &p.entity_re[x.head * p.dim];
    const double* him = &p.entity_im[x.head * p.dim];
    const double* th = &p.relation_theta[x.relation * p.dim];
    const double* w =
        p.kind == ModelKind::rate ? &p.relation_w[p.w_offset(x.relation)] : nullptr;

    for (std::size_t i = 0; i < p.dim; ++i) {
        const double m = std::sqrt(res.re[i] * res.re[i] + res.im[i] * res.im[i]);
        const double a = hre[i], b = him[i];
        double c = 1.0, s = 0.0;
        if (p.kind != ModelKind::transe) {
            c = std::cos(th[i]);
            s = std::sin(th[i]);
        }

        if (kinks != nullptr) {
            // Distance to the residual's kink along each coordinate axis, in
            // parameter units: residual modulus over the coordinate's slope.
            // Zero-slope coordinates cannot reach the kink and record nothing.
            const auto note = [m](double& cell, double slope) {
                if (slope > 1e-12) cell = std::min(cell, m / slope);
            };
            note((*kt)[i], 1.0);
            switch (p.kind) {
                case ModelKind::transe:
                    note((*kh)[i], 1.0);
                    note((*kth)[i], 1.0);
                    break;
                case ModelKind::rotate:
                    note((*kh)[i], 1.0);  // unit rotations preserve modulus
                    note((*kth)[i], std::hypot(a, b));
                    break;
                case ModelKind::rate: {
                    note((*kh)[i],
                         std::max(std::hypot(w[0] * c + w[1] * s, w[4] * c + w[5] * s),
                                  std::hypot(w[2] * c + w[3] * s, w[6] * c + w[7] * s)));
                    note((*kth)[i],
                         std::hypot(-s * (w[0] * a + w[2] * b) + c * (w[1] * a + w[3] * b),
                                    -s * (w[4] * a + w[6] * b) + c * (w[5] * a + w[7] * b)));
                    if (kw != nullptr) {
                        const double mac = std::abs(a * c), mas = std::abs(a * s);
                        const double mbc = std::abs(b * c), mbs = std::abs(b * s);
                        note((*kw)[0], mac);
                        note((*kw)[4], mac);
                        note((*kw)[1], mas);
                        note((*kw)[5], mas);
                        note((*kw)[2], mbc);
                        note((*kw)[6], mbc);
                        note((*kw)[3], mbs);
                        note((*kw)[7], mbs);
                    }
                    break;
                }
            }
        }
        if (m == 0.0) continue;  // L1 subgradient convention: 0 at the kink
        // d f / d residual, scaled; f = -sum |residual|.
        const double gre = coeff * (-res.re[i] / m);
        const double gim = coeff * (-res.im[i] / m);

        gt.re[i] -= gre;
        gt.im[i] -= gim;

        switch (p.kind) {
            case ModelKind::transe:
                gh.re[i] += gre;
                gth[i] += gre;
                break;
            case ModelKind::rotate: {
                gh.re[i] += gre * c + gim * s;
                gh.im[i] += -gre * s + gim * c;
                gth[i] += gre * (-s * hre[i] - c * him[i]) + gim * (c * hre[i] - s * him[i]);
                break;
            }
            case ModelKind::rate: {
                gh.re[i] += gre * (w[0] * c + w[1] * s) + gim * (w[4] * c + w[5] * s);
                gh.im[i] += gre * (w[2] * c + w[3] * s) + gim * (w[6] * c + w[7] * s);
                gth[i] += gre * (-s * (w[0] * a + w[2] * b) + c * (w[1] * a + w[3] * b)) +
                          gim * (-s * (w[4] * a + w[6] * b) + c * (w[5] * a + w[7] * b));
                if (gw != nullptr) {
                    const double ac = a * c, as = a * s, bc = b * c, bs = b * s;
                    (*gw)[0] += gre * ac;
                    (*gw)[1] += gre * as;
                    (*gw)[2] += gre * bc;
                    (*gw)[3] += gre * bs;
                    (*gw)[4] += gim * ac;
                    (*gw)[5] += gim * as;
                    (*gw)[6] += gim * bc;
                    (*gw)[7] += gim * bs;
                }
                break;
            }
        }
    }
}

}  // namespace detail

/// Batch-mean loss with the stored beta weights held constant. This is the
/// exact function loss_gradients differentiates; finite-difference checks
/// re-evaluate it under perturbed parameters.
inline double batch_loss(const ParameterStore& p, std::span<const BatchItem> batch,
                         const LossOptions& opts) {
    if (batch.empty()) throw ContractError("batch_loss: empty batch");
    double total = 0.0;
    std::vector<double> neg_scores;
    for (const BatchItem& item : batch) {
        const double pos = score(p, item.positive);
        neg_scores.clear();
        for (std::size_t j = 0; j < item.negatives.size(); ++j)
            neg_scores.push_back(score(p, item.negatives.corrupted(item.positive, j)));
        const double w_l1 = (p.kind == ModelKind::rate && opts.w_l1_reg && opts.train_w)
                                ? p.weights(item.positive.relation).l1()
                                : 0.0;
        total += triple_loss(pos, neg_scores, item.negatives.beta, opts.margin,
                             opts.w_l1_reg && opts.train_w ? opts.mu : 0.0, w_l1);
    }
    return total / static_cast<double>(batch.size());
}

/// Analytic gradients of batch_loss. Beta weights are constants
/// (stop-gradient); L1 kinks take subgradient 0. When `kinks` is supplied it
/// receives, per touched coordinate, the smallest axis-aligned distance to a
/// kink: residual modulus over coordinate slope, plus |w| for regularized
/// weights.
inline GradientSet loss_gradients(const ParameterStore& p, std::span<const BatchItem> batch,
                                  const LossOptions& opts, double* loss_out = nullptr,
                                  KinkMap* kinks = nullptr) {
    if (batch.empty()) throw ContractError("loss_gradients: empty batch");
    GradientSet grads;
    grads.dim = p.dim;
    if (kinks != nullptr) kinks->dim = p.dim;

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const bool reg_active = p.kind == ModelKind::rate && opts.w_l1_reg && opts.train_w;
    double total_loss = 0.0;

    for (const BatchItem& item : batch) {
        const detail::Residual pos_res = detail::residual_of(p, item.positive);
        // d/df of -log sigmoid(margin + f) is -sigmoid(-(margin + f)).
        const double pos_coeff = -sigmoid(-(opts.margin + pos_res.score)) * inv_b;
        detail::backprop_triple(p, item.positive, pos_res, pos_coeff, opts.train_w, grads, kinks);

        double item_loss = -log_sigmoid(opts.margin + pos_res.score);

        if (reg_active) {
            const WeightMatrix wm = p.weights(item.positive.relation);
            item_loss += opts.mu * wm.l1();
            const std::size_t slot = p.w_offset(item.positive.relation) / 8;
            auto& gw = grads.weight_row(slot);
            for (std::size_t i = 0; i < 8; ++i) {
                const double sign = wm[i] > 0.0 ? 1.0 : (wm[i] < 0.0 ? -1.0 : 0.0);
                gw[i] += opts.mu * sign * inv_b;
            }
            if (kinks != nullptr) {
                auto& kw = kinks->weight_row(slot);
                for (std::size_t i = 0; i < 8; ++i) kw[i] = std::min(kw[i], std::abs(wm[i]));
            }
        }

        if (item.negatives.beta.size() != item.negatives.size())
            throw ContractError("loss_gradients: beta not filled for a negative batch");
        for (std::size_t j = 0; j < item.negatives.size(); ++j) {
            const Triple neg = item.negatives.corrupted(item.positive, j);
            const detail::Residual neg_res = detail::residual_of(p, neg);
            const double beta = item.negatives.beta[j];
            // d/df of -beta log sigmoid(-f - margin) is +beta sigmoid(f + margin).
            const double neg_coeff = beta * sigmoid(neg_res.score + opts.margin) * inv_b;
            detail::backprop_triple(p, neg, neg_res, neg_coeff, opts.train_w, grads, kinks);
            item_loss -= beta * log_sigmoid(-neg_res.score - opts.margin);
        }
        total_loss += item_loss;
    }

    if (loss_out != nullptr) *loss_out = total_loss * inv_b;
    return grads;
}

}  // namespace rate
