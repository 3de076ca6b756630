#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rate/errors.hpp"

namespace rate {

struct Complex {
    double re = 0.0;
    double im = 0.0;

    friend Complex operator+(Complex a, Complex b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(Complex a, Complex b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator*(Complex a, Complex b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
};

inline double modulus(Complex z) { return std::sqrt(z.re * z.re + z.im * z.im); }

/// 2x4 weight matrix of the weighted product; row 1 produces the real part,
/// row 2 the imaginary part. Stored row-major.
struct WeightMatrix {
    std::array<double, 8> w{};

    double& operator[](std::size_t i) { return w[i]; }
    double operator[](std::size_t i) const { return w[i]; }

    /// Recovers the standard complex product.
    static constexpr WeightMatrix standard() {
        return WeightMatrix{{1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 1.0, 0.0}};
    }

    double l1() const {
        double s = 0.0;
        for (double x : w) s += std::abs(x);
        return s;
    }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;
};

/// Weighted product of two complex scalars: with u=a+bi, v=c+di and
/// s=[ac; ad; bc; bd], returns (W row1 . s) + (W row2 . s) i.
inline Complex weighted_product(Complex u, Complex v, const WeightMatrix& m) {
    const double ac = u.re * v.re;
    const double ad = u.re * v.im;
    const double bc = u.im * v.re;
    const double bd = u.im * v.im;
    Complex out;
    out.re = m[0] * ac + m[1] * ad + m[2] * bc + m[3] * bd;
    out.im = m[4] * ac + m[5] * ad + m[6] * bc + m[7] * bd;
    return out;
}

/// d-dimensional complex vector as two parallel real arrays.
struct ComplexVec {
    std::vector<double> re;
    std::vector<double> im;

    ComplexVec() = default;
    explicit ComplexVec(std::size_t d) : re(d, 0.0), im(d, 0.0) {}

    std::size_t dim() const noexcept { return re.size(); }

    Complex at(std::size_t i) const { return {re[i], im[i]}; }
    void set(std::size_t i, Complex z) {
        re[i] = z.re;
        im[i] = z.im;
    }
};

/// Per-dimension weighted product with one shared W across dimensions.
inline ComplexVec elementwise_weighted_product(const ComplexVec& h, const ComplexVec& r,
                                               const WeightMatrix& m) {
    if (h.dim() != r.dim())
        throw ContractError("elementwise_weighted_product: dimension mismatch " +
                            std::to_string(h.dim()) + " vs " + std::to_string(r.dim()));
    ComplexVec out(h.dim());
    for (std::size_t i = 0; i < h.dim(); ++i) out.set(i, weighted_product(h.at(i), r.at(i), m));
    return out;
}

/// Unit-modulus parameterization: theta_i -> cos(theta_i) + i sin(theta_i).
inline ComplexVec phases_to_complex(std::span<const double> theta) {
    ComplexVec out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        out.re[i] = std::cos(theta[i]);
        out.im[i] = std::sin(theta[i]);
    }
    return out;
}

/// L1 norm of a complex vector: sum of per-dimension moduli.
inline double complex_l1_norm(const ComplexVec& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) s += modulus(v.at(i));
    return s;
}

}  // namespace rate
