#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rate/complex_ops.hpp"
#include "rate/errors.hpp"
#include "rate/rng.hpp"
#include "rate/types.hpp"

namespace rate {

enum class ModelKind { transe, rotate, rate };

inline const char* model_name(ModelKind k) {
    switch (k) {
        case ModelKind::transe: return "transe";
        case ModelKind::rotate: return "rotate";
        case ModelKind::rate: return "rate";
    }
    return "?";
}

inline ModelKind model_from_name(const std::string& s) {
    if (s == "transe") return ModelKind::transe;
    if (s == "rotate") return ModelKind::rotate;
    if (s == "rate") return ModelKind::rate;
    throw ParseError("unknown model kind: " + s);
}

struct ModelConfig {
    ModelKind kind = ModelKind::rate;
    std::size_t dim = 250;
    double margin = 9.0;  // fixed margin lambda
    std::uint64_t seed = 1;
};

/// How the relation weight matrices are laid out / started.
struct WeightInit {
    bool shared = false;       // one W for all relations (relation-adaptive off)
    bool identity = false;     // freeze-ready exact standard product, no noise
    double noise = 0.01;       // uniform perturbation around the standard product
};

/// All learnable parameters. Entities are complex vectors stored as parallel
/// |E| x d row-major arrays; relations are phase vectors (the realized
/// embedding cos(theta)+i sin(theta) has unit modulus per dimension by
/// construction); RatE adds one 2x4 weight matrix per relation.
struct ParameterStore {
    ModelKind kind = ModelKind::rate;
    std::size_t dim = 0;
    std::size_t num_entities = 0;
    std::size_t num_relations = 0;
    double margin = 0.0;
    std::uint64_t seed = 0;

    std::vector<double> entity_re;
    std::vector<double> entity_im;
    std::vector<double> relation_theta;
    std::vector<double> relation_w;  // 8 per stored matrix; empty unless RatE
    bool shared_w = false;

    std::span<const double> head_re(EntityId e) const { return {&entity_re[e * dim], dim}; }
    std::span<const double> head_im(EntityId e) const { return {&entity_im[e * dim], dim}; }
    std::span<const double> theta(RelationId r) const { return {&relation_theta[r * dim], dim}; }

    std::size_t w_matrices() const noexcept { return relation_w.size() / 8; }
    std::size_t w_offset(RelationId r) const noexcept { return shared_w ? 0 : std::size_t(r) * 8; }

    WeightMatrix weights(RelationId r) const {
        WeightMatrix m;
        const std::size_t off = w_offset(r);
        for (std::size_t i = 0; i < 8; ++i) m[i] = relation_w[off + i];
        return m;
    }

    void set_weights(RelationId r, const WeightMatrix& m) {
        const std::size_t off = w_offset(r);
        for (std::size_t i = 0; i < 8; ++i) relation_w[off + i] = m[i];
    }
};

/// Uniform init: entity coordinates in [-margin/dim, +margin/dim] (real and
/// imaginary), phases in [0, 2*pi], and for RatE each weight matrix at the
/// standard product plus per-entry noise. Each parameter family draws from its
/// own seed-derived stream, so the entity/phase draws match across model kinds
/// under the same seed.
inline ParameterStore init_parameters(const ModelConfig& config, std::size_t num_entities,
                                      std::size_t num_relations, const WeightInit& winit = {}) {
    if (num_entities == 0 || num_relations == 0)
        throw ContractError("init_parameters: entity and relation counts must be positive");
    if (config.dim == 0) throw ContractError("init_parameters: dim must be positive");

    ParameterStore p;
    p.kind = config.kind;
    p.dim = config.dim;
    p.num_entities = num_entities;
    p.num_relations = num_relations;
    p.margin = config.margin;
    p.seed = config.seed;

    const double bound = config.margin / static_cast<double>(config.dim);
    auto ent_rng = make_rng(config.seed, RngStream::entity_init);
    p.entity_re.resize(num_entities * config.dim);
    p.entity_im.resize(num_entities * config.dim);
    for (double& x : p.entity_re) x = uniform_real(ent_rng, -bound, bound);
    for (double& x : p.entity_im) x = uniform_real(ent_rng, -bound, bound);

    auto phase_rng = make_rng(config.seed, RngStream::phase_init);
    p.relation_theta.resize(num_relations * config.dim);
    for (double& x : p.relation_theta) x = uniform_real(phase_rng, 0.0, 2.0 * std::numbers::pi);

    if (config.kind == ModelKind::rate) {
        p.shared_w = winit.shared;
        const std::size_t matrices = winit.shared ? 1 : num_relations;
        p.relation_w.resize(matrices * 8);
        auto w_rng = make_rng(config.seed, RngStream::weight_init);
        const WeightMatrix std_w = WeightMatrix::standard();
        for (std::size_t m = 0; m < matrices; ++m)
            for (std::size_t i = 0; i < 8; ++i)
                p.relation_w[m * 8 + i] =
                    std_w[i] + (winit.identity ? 0.0 : uniform_real(w_rng, -winit.noise, winit.noise));
    }
    return p;
}

/// Learnable parameters used only for scoring, beyond the embeddings
/// themselves: 8 per weight matrix for RatE, none for TransE/RotatE.
inline std::size_t scoring_parameter_count(const ParameterStore& p) {
    return p.kind == ModelKind::rate ? p.relation_w.size() : 0;
}

// --- scoring -----------------------------------------------------------
//
// All scores are negated L1 distances, hence <= 0.

inline double score_transe(const ParameterStore& p, const Triple& x) {
    if (p.kind != ModelKind::transe) throw ContractError("score_transe: model kind mismatch");
    const double* h = &p.entity_re[x.head * p.dim];
    const double* r = &p.relation_theta[x.relation * p.dim];
    const double* t = &p.entity_re[x.tail * p.dim];
    double s = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) s += std::abs(h[i] + r[i] - t[i]);
    return -s;
}

inline double score_rotate(const ParameterStore& p, const Triple& x) {
    if (p.kind != ModelKind::rotate) throw ContractError("score_rotate: model kind mismatch");
    const double* hre = &p.entity_re[x.head * p.dim];
    const double* him = &p.entity_im[x.head * p.dim];
    const double* th = &p.relation_theta[x.relation * p.dim];
    const double* tre = &p.entity_re[x.tail * p.dim];
    const double* tim = &p.entity_im[x.tail * p.dim];
    double s = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) {
        const double c = std::cos(th[i]), d = std::sin(th[i]);
        const double dre = hre[i] * c - him[i] * d - tre[i];
        const double dim_ = hre[i] * d + him[i] * c - tim[i];
        s += std::sqrt(dre * dre + dim_ * dim_);
    }
    return -s;
}

inline double score_rate(const ParameterStore& p, const Triple& x) {
    if (p.kind != ModelKind::rate) throw ContractError("score_rate: model kind mismatch");
    const double* hre = &p.entity_re[x.head * p.dim];
    const double* him = &p.entity_im[x.head * p.dim];
    const double* th = &p.relation_theta[x.relation * p.dim];
    const double* tre = &p.entity_re[x.tail * p.dim];
    const double* tim = &p.entity_im[x.tail * p.dim];
    const double* w = &p.relation_w[p.w_offset(x.relation)];
    double s = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) {
        const double c = std::cos(th[i]), d = std::sin(th[i]);
        const double ac = hre[i] * c, ad = hre[i] * d, bc = him[i] * c, bd = him[i] * d;
        const double dre = w[0] * ac + w[1] * ad + w[2] * bc + w[3] * bd - tre[i];
        const double dim_ = w[4] * ac + w[5] * ad + w[6] * bc + w[7] * bd - tim[i];
        s += std::sqrt(dre * dre + dim_ * dim_);
    }
    return -s;
}

inline double score(const ParameterStore& p, const Triple& x) {
    switch (p.kind) {
        case ModelKind::transe: return score_transe(p, x);
        case ModelKind::rotate: return score_rotate(p, x);
        case ModelKind::rate: return score_rate(p, x);
    }
    throw ContractError("score: unknown model kind");
}

/// Writes g(h, r) for the store's model into out_re/out_im (each of size dim).
/// For TransE the imaginary part is zero.
inline void translate(const ParameterStore& p, EntityId head, RelationId rel,
                      std::span<double> out_re, std::span<double> out_im) {
    const double* hre = &p.entity_re[head * p.dim];
    const double* him = &p.entity_im[head * p.dim];
    const double* th = &p.relation_theta[rel * p.dim];
    switch (p.kind) {
        case ModelKind::transe:
            for (std::size_t i = 0; i < p.dim; ++i) {
                out_re[i] = hre[i] + th[i];
                out_im[i] = 0.0;
            }
            return;
        case ModelKind::rotate:
            for (std::size_t i = 0; i < p.dim; ++i) {
                const double c = std::cos(th[i]), d = std::sin(th[i]);
                out_re[i] = hre[i] * c - him[i] * d;
                out_im[i] = hre[i] * d + him[i] * c;
            }
            return;
        case ModelKind::rate: {
            const double* w = &p.relation_w[p.w_offset(rel)];
            for (std::size_t i = 0; i < p.dim; ++i) {
                const double c = std::cos(th[i]), d = std::sin(th[i]);
                const double ac = hre[i] * c, ad = hre[i] * d, bc = him[i] * c, bd = him[i] * d;
                out_re[i] = w[0] * ac + w[1] * ad + w[2] * bc + w[3] * bd;
                out_im[i] = w[4] * ac + w[5] * ad + w[6] * bc + w[7] * bd;
            }
            return;
        }
    }
    throw ContractError("translate: unknown model kind");
}

/// Batched tail-side scoring: one (head, relation) against many candidate
/// tails. Identical to repeated single scoring; the translation is computed
/// once.
inline void score_tail_candidates(const ParameterStore& p, EntityId head, RelationId rel,
                                  std::span<const EntityId> candidates, std::span<double> out) {
    std::vector<double> gre(p.dim), gim(p.dim);
    translate(p, head, rel, gre, gim);
    const bool real_only = p.kind == ModelKind::transe;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double* tre = &p.entity_re[candidates[k] * p.dim];
        const double* tim = &p.entity_im[candidates[k] * p.dim];
        double s = 0.0;
        if (real_only) {
            for (std::size_t i = 0; i < p.dim; ++i) s += std::abs(gre[i] - tre[i]);
        } else {
            for (std::size_t i = 0; i < p.dim; ++i) {
                const double dre = gre[i] - tre[i];
                const double dim_ = gim[i] - tim[i];
                s += std::sqrt(dre * dre + dim_ * dim_);
            }
        }
        out[k] = -s;
    }
}

/// Batched head-side scoring: many candidate heads against one (relation,
/// tail). The relation's per-dimension rotation is precomputed.
inline void score_head_candidates(const ParameterStore& p, std::span<const EntityId> candidates,
                                  RelationId rel, EntityId tail, std::span<double> out) {
    const double* th = &p.relation_theta[rel * p.dim];
    const double* tre = &p.entity_re[tail * p.dim];
    const double* tim = &p.entity_im[tail * p.dim];
    std::vector<double> cs(p.dim), sn(p.dim);
    if (p.kind != ModelKind::transe)
        for (std::size_t i = 0; i < p.dim; ++i) {
            cs[i] = std::cos(th[i]);
            sn[i] = std::sin(th[i]);
        }
    const double* w = p.kind == ModelKind::rate ? &p.relation_w[p.w_offset(rel)] : nullptr;

    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double* hre = &p.entity_re[candidates[k] * p.dim];
        const double* him = &p.entity_im[candidates[k] * p.dim];
        double s = 0.0;
        switch (p.kind) {
            case ModelKind::transe:
                for (std::size_t i = 0; i < p.dim; ++i) s += std::abs(hre[i] + th[i] - tre[i]);
                break;
            case ModelKind::rotate:
                for (std::size_t i = 0; i < p.dim; ++i) {
                    const double dre = hre[i] * cs[i] - him[i] * sn[i] - tre[i];
                    const double dim_ = hre[i] * sn[i] + him[i] * cs[i] - tim[i];
                    s += std::sqrt(dre * dre + dim_ * dim_);
                }
                break;
            case ModelKind::rate:
                for (std::size_t i = 0; i < p.dim; ++i) {
                    const double ac = hre[i] * cs[i], ad = hre[i] * sn[i];
                    const double bc = him[i] * cs[i], bd = him[i] * sn[i];
                    const double dre = w[0] * ac + w[1] * ad + w[2] * bc + w[3] * bd - tre[i];
                    const double dim_ = w[4] * ac + w[5] * ad + w[6] * bc + w[7] * bd - tim[i];
                    s += std::sqrt(dre * dre + dim_ * dim_);
                }
                break;
        }
        out[k] = -s;
    }
}

}  // namespace rate
