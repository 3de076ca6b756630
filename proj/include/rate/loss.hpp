#pragma once

#include <cmath>
#include <span>

#include "rate/errors.hpp"

namespace rate {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

/// log(sigmoid(z)) = -softplus(-z).
inline double log_sigmoid(double z) { return -softplus(-z); }

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Per-positive loss:
///   mu * ||W||_1  -  log sigmoid(margin + pos_score)
///                 -  sum_i beta_i * log sigmoid(-neg_score_i - margin).
/// beta is treated as a constant weight vector (detached).
inline double triple_loss(double pos_score, std::span<const double> neg_scores,
                          std::span<const double> beta, double margin, double mu, double w_l1) {
    if (neg_scores.size() != beta.size())
        throw ContractError("triple_loss: negative scores and beta must align");
    double loss = mu * w_l1 - log_sigmoid(margin + pos_score);
    for (std::size_t i = 0; i < neg_scores.size(); ++i)
        loss -= beta[i] * log_sigmoid(-neg_scores[i] - margin);
    return loss;
}

}  // namespace rate
