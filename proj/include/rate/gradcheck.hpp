#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rate/gradients.hpp"
#include "rate/scoring.hpp"

namespace rate {

struct FdOptions {
    double epsilon = 1e-5;   // central-difference step
    double kink_tol = 1e-7;  // exclude coordinates this close to an L1 kink
    // Probes whose step lands within guard*epsilon of a kink measure the
    // residual's curvature instead of its gradient; exclude those too.
    double curvature_guard = 300.0;
    // A central difference quantizes at ulp(loss)/epsilon, around 1e-10 for
    // an O(1) loss at the default step. Gradients below this floor are
    // compared at floor scale so the relative error reflects the probe's
    // resolution, not division by ~0.
    double zero_floor = 5e-6;
};

struct FdReport {
    double max_rel_error = 0.0;
    std::string worst_coordinate;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t coords_checked = 0;
    std::size_t coords_excluded = 0;
    bool all_near_zero = true;  // every gradient ~0: a vacuous pass

    std::string summary() const {
        std::ostringstream os;
        os << "finite-difference check: " << coords_checked << " coordinates, "
           << coords_excluded << " kink-adjacent excluded, max relative error "
           << max_rel_error;
        if (!worst_coordinate.empty())
            os << " at " << worst_coordinate << " (analytic " << worst_analytic << ", numeric "
               << worst_numeric << ")";
        if (all_near_zero) os << " [all-near-zero]";
        return os.str();
    }
};

namespace detail {

struct CoordProbe {
    std::size_t offset;  // into the flat parameter array
    int array;           // 0 entity_re, 1 entity_im, 2 theta, 3 weight
    double analytic;
    double kink;
    std::string label;
};

inline double* probe_target(ParameterStore& p, const CoordProbe& c) {
    switch (c.array) {
        case 0: return &p.entity_re[c.offset];
        case 1: return &p.entity_im[c.offset];
        case 2: return &p.relation_theta[c.offset];
        default: return &p.relation_w[c.offset];
    }
}

}  // namespace detail

/// Central-difference verification of loss_gradients over every touched
/// coordinate. Coordinates within kink_tol of an L1 kink, or close enough
/// that the probe itself is curvature-limited, are excluded from the
/// comparison (but counted). Deterministic for fixed inputs.
inline FdReport finite_difference_check(const ParameterStore& params,
                                        std::span<const BatchItem> batch, const LossOptions& opts,
                                        const FdOptions& fd = {}) {
    KinkMap kinks;
    const GradientSet grads = loss_gradients(params, batch, opts, nullptr, &kinks);

    std::vector<detail::CoordProbe> probes;
    auto label = [](const char* name, std::size_t id, std::size_t i) {
        return std::string(name) + "[" + std::to_string(id) + "][" + std::to_string(i) + "]";
    };
    for (const auto& [e, row] : grads.entity) {
        const auto& krow = kinks.entity.at(e);
        for (std::size_t i = 0; i < grads.dim; ++i) {
            probes.push_back({e * grads.dim + i, 0, row.re[i], krow[i], label("entity_re", e, i)});
            probes.push_back({e * grads.dim + i, 1, row.im[i], krow[i], label("entity_im", e, i)});
        }
    }
    for (const auto& [r, row] : grads.theta) {
        const auto& krow = kinks.theta.at(r);
        for (std::size_t i = 0; i < grads.dim; ++i)
            probes.push_back({r * grads.dim + i, 2, row[i], krow[i], label("theta", r, i)});
    }
    for (const auto& [slot, row] : grads.weight) {
        const auto& krow = kinks.weight.at(slot);
        for (std::size_t i = 0; i < 8; ++i)
            probes.push_back({slot * 8 + i, 3, row[i], krow[i], label("weight", slot, i)});
    }

    FdReport report;
    ParameterStore scratch = params;
    const double exclusion = fd.kink_tol + fd.curvature_guard * fd.epsilon;
    for (const auto& probe : probes) {
        if (probe.kink < exclusion) {
            ++report.coords_excluded;
            continue;
        }
        double* target = detail::probe_target(scratch, probe);
        const double saved = *target;
        *target = saved + fd.epsilon;
        const double up = batch_loss(scratch, batch, opts);
        *target = saved - fd.epsilon;
        const double down = batch_loss(scratch, batch, opts);
        *target = saved;

        const double numeric = (up - down) / (2.0 * fd.epsilon);
        ++report.coords_checked;
        const double mag = std::max(std::abs(probe.analytic), std::abs(numeric));
        if (mag >= 1e-8) report.all_near_zero = false;
        const double rel = std::abs(probe.analytic - numeric) / std::max(mag, fd.zero_floor);
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_coordinate = probe.label;
            report.worst_analytic = probe.analytic;
            report.worst_numeric = numeric;
        }
    }
    return report;
}

}  // namespace rate
