#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "rate/complex_ops.hpp"
#include "rate/errors.hpp"
#include "rate/rng.hpp"

namespace rate {

/// One head-pair displacement pushed through a relation: how far apart do the
/// two image (tail) points land, given how far the heads were?
struct TransferCase {
    Complex delta;     // h - h' in one dimension
    Complex rotation;  // unit-modulus relation coordinate
    WeightMatrix w;    // used by the weighted-product transfer only
};

namespace detail {

inline void require_unit_rotation(const Complex& rotation) {
    if (std::abs(modulus(rotation) - 1.0) > 1e-9)
        throw ContractError("rotation is off the unit circle");
}

}  // namespace detail

/// Pure translation: the tail displacement equals the head displacement.
inline double tail_distance_transe(const Complex& delta) { return modulus(delta); }

/// Rotation: |delta * rotation|, equal to |delta| since |rotation| = 1.
inline double tail_distance_rotate(const TransferCase& c) {
    detail::require_unit_rotation(c.rotation);
    return modulus(c.delta * c.rotation);
}

/// Weighted product: |delta (x)_W rotation|. Unlike the rigid maps above this
/// can expand, preserve, or contract the displacement depending on W.
inline double tail_distance_rate(const TransferCase& c) {
    detail::require_unit_rotation(c.rotation);
    return modulus(weighted_product(c.delta, c.rotation, c.w));
}

/// The worked special case w = [1,0,0,-2, 0,1,1,0].
inline WeightMatrix special_weight_matrix() {
    WeightMatrix m;
    m.w = {1.0, 0.0, 0.0, -2.0, 0.0, 1.0, 1.0, 0.0};
    return m;
}

/// For the special matrix, tail_distance^2 - head_distance^2 reduces to
/// bd(3bd - 2ac) with delta = a+bi, rotation = c+di.
inline double special_distance_gap(const Complex& delta, const Complex& rotation) {
    const double a = delta.re, b = delta.im, c = rotation.re, d = rotation.im;
    return b * d * (3.0 * b * d - 2.0 * a * c);
}

/// Squared tail distance written out as the full eight-weight quadratic form;
/// algebraically identical to |weighted_product|^2 for any W.
inline double generic_squared_form(const TransferCase& c) {
    const double a = c.delta.re, b = c.delta.im;
    const double cc = c.rotation.re, d = c.rotation.im;
    const double ac = a * cc, ad = a * d, bc = b * cc, bd = b * d;
    const double re = c.w[0] * ac + c.w[1] * ad + c.w[2] * bc + c.w[3] * bd;
    const double im = c.w[4] * ac + c.w[5] * ad + c.w[6] * bc + c.w[7] * bd;
    return re * re + im * im;
}

struct SpatialReport {
    std::size_t cases = 0;
    std::size_t transe_violations = 0;
    std::size_t rotate_violations = 0;
    std::size_t special_violations = 0;   // closed form vs direct evaluation
    std::size_t standard_violations = 0;  // W_std must reproduce the rotation identity
    std::size_t generic_violations = 0;   // quadratic form vs direct evaluation
    std::size_t expansion = 0;
    std::size_t preservation = 0;
    std::size_t contraction = 0;
    double worst_error = 0.0;

    std::size_t violations() const {
        return transe_violations + rotate_violations + special_violations + standard_violations +
               generic_violations;
    }

    bool ok() const {
        return violations() == 0 && expansion > 0 && preservation > 0 && contraction > 0;
    }

    std::string summary() const {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "cases %zu\n"
                      "translation violations %zu\n"
                      "rotation violations %zu\n"
                      "weighted special-form violations %zu\n"
                      "weighted standard-matrix violations %zu\n"
                      "weighted generic-form violations %zu\n"
                      "branches: expansion %zu preservation %zu contraction %zu\n"
                      "worst error %.3e\n"
                      "result %s\n",
                      cases, transe_violations, rotate_violations, special_violations,
                      standard_violations, generic_violations, expansion, preservation,
                      contraction, worst_error, ok() ? "ok" : "FAIL");
        return buf;
    }
};

/// Random-case check of every transfer identity. Every tenth case pins the
/// displacement onto the real axis so the preservation branch of the special
/// matrix is exercised exactly (bd = 0 there).
inline SpatialReport verify_spatial_transformation(std::size_t num_cases, std::mt19937_64& rng) {
    constexpr double kTol = 1e-9;
    SpatialReport rep;
    rep.cases = num_cases;
    const WeightMatrix w_special = special_weight_matrix();
    const WeightMatrix w_std = WeightMatrix::standard();

    for (std::size_t i = 0; i < num_cases; ++i) {
        TransferCase c;
        c.delta.re = uniform_real(rng, -2.0, 2.0);
        c.delta.im = i % 10 == 9 ? 0.0 : uniform_real(rng, -2.0, 2.0);
        const double phi = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
        c.rotation = {std::cos(phi), std::sin(phi)};
        for (std::size_t k = 0; k < 8; ++k) c.w[k] = uniform_real(rng, -2.0, 2.0);

        const double head = modulus(c.delta);
        auto note = [&rep](double err, std::size_t& counter) {
            if (err > rep.worst_error) rep.worst_error = err;
            if (err > kTol) ++counter;
        };

        note(std::abs(tail_distance_transe(c.delta) - head), rep.transe_violations);
        note(std::abs(tail_distance_rotate(c) - head), rep.rotate_violations);

        TransferCase std_case = c;
        std_case.w = w_std;
        note(std::abs(tail_distance_rate(std_case) - head), rep.standard_violations);

        TransferCase special = c;
        special.w = w_special;
        const double tail = tail_distance_rate(special);
        const double gap = special_distance_gap(c.delta, c.rotation);
        note(std::abs(tail * tail - (head * head + gap)), rep.special_violations);
        if (gap > 0.0)
            ++rep.expansion;
        else if (gap < 0.0)
            ++rep.contraction;
        else
            ++rep.preservation;

        const double direct = tail_distance_rate(c);
        note(std::abs(direct * direct - generic_squared_form(c)), rep.generic_violations);
    }
    return rep;
}

}  // namespace rate
