#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rate/errors.hpp"
#include "rate/gradients.hpp"
#include "rate/scoring.hpp"

namespace rate {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam first/second moments, congruent to every parameter array. Moments of
/// indices a batch never touched are left untouched (sparse Adam).
struct OptimizerState {
    AdamConfig config;
    std::uint64_t step_count = 0;

    std::vector<double> m_entity_re, v_entity_re;
    std::vector<double> m_entity_im, v_entity_im;
    std::vector<double> m_theta, v_theta;
    std::vector<double> m_w, v_w;

    explicit OptimizerState(const ParameterStore& p, AdamConfig cfg = {})
        : config(cfg),
          m_entity_re(p.entity_re.size(), 0.0),
          v_entity_re(p.entity_re.size(), 0.0),
          m_entity_im(p.entity_im.size(), 0.0),
          v_entity_im(p.entity_im.size(), 0.0),
          m_theta(p.relation_theta.size(), 0.0),
          v_theta(p.relation_theta.size(), 0.0),
          m_w(p.relation_w.size(), 0.0),
          v_w(p.relation_w.size(), 0.0) {}
};

namespace detail {

inline void adam_update_one(double& param, double grad, double& m, double& v,
                            const AdamConfig& c, double lr, double bc1, double bc2) {
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad * grad;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    param -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
}

}  // namespace detail

/// One bias-corrected Adam step over the touched indices of `grads`.
inline void adam_step(ParameterStore& p, const GradientSet& grads, OptimizerState& opt,
                      double lr) {
    if (opt.m_entity_re.size() != p.entity_re.size())
        throw ContractError("adam_step: optimizer state incongruent with parameters");
    ++opt.step_count;
    const auto& c = opt.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(opt.step_count));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(opt.step_count));

    for (const auto& [e, row] : grads.entity) {
        const std::size_t base = e * p.dim;
        for (std::size_t i = 0; i < p.dim; ++i) {
            detail::adam_update_one(p.entity_re[base + i], row.re[i], opt.m_entity_re[base + i],
                                    opt.v_entity_re[base + i], c, lr, bc1, bc2);
            detail::adam_update_one(p.entity_im[base + i], row.im[i], opt.m_entity_im[base + i],
                                    opt.v_entity_im[base + i], c, lr, bc1, bc2);
        }
    }
    for (const auto& [r, row] : grads.theta) {
        const std::size_t base = r * p.dim;
        for (std::size_t i = 0; i < p.dim; ++i)
            detail::adam_update_one(p.relation_theta[base + i], row[i], opt.m_theta[base + i],
                                    opt.v_theta[base + i], c, lr, bc1, bc2);
    }
    for (const auto& [slot, row] : grads.weight) {
        const std::size_t base = slot * 8;
        for (std::size_t i = 0; i < 8; ++i)
            detail::adam_update_one(p.relation_w[base + i], row[i], opt.m_w[base + i],
                                    opt.v_w[base + i], c, lr, bc1, bc2);
    }
}

}  // namespace rate
