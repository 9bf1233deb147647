#pragma once

// Angular averages of the dipolar Bogoliubov kernel,
//
//   Q_l(x) = \int_0^1 (1 - x + 3 x u^2)^{l/2} du,   l in {3, 5},
//
// evaluated in closed form with y = (1 - x) / (3x). For x > 1 the integrand
// goes negative near u = 0 and the result is complex. We take the principal
// branch: sqrt(y) = i sqrt|y|, so that
//
//   ln((1 + sqrt(1+y)) / sqrt(y)) = ln((1 + sqrt(1+y)) / sqrt|y|) - i pi/2.
//
// With this convention Im Q5 > 0 and Im Q3 < 0 for x > 1, and both agree with
// the principal-branch value of the integral itself.

#include <cmath>
#include <complex>
#include <numbers>

#include "droplet_dft/errors.hpp"
#include "droplet_dft/quadrature.hpp"

namespace droplet_dft {

struct QValue {
    double re = 0.0;
    double im = 0.0;

    bool is_real() const noexcept { return im == 0.0; }
    std::complex<double> complex() const noexcept { return {re, im}; }
};

namespace qfunctions {

inline constexpr std::size_t quadrature_order = 64;
inline constexpr double small_x = 1e-6;

/// 64-point Gauss-Legendre value of the integral representation; x in [0, 1].
inline double q_oracle(int l, double x) {
    if (l != 3 && l != 5) throw DomainError("q_oracle: order must be 3 or 5");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("q_oracle: x must lie in [0, 1]");
    const double power = 0.5 * l;
    return quadrature::integrate<quadrature_order>(
        [&](double u) { return std::pow(1.0 - x + 3.0 * x * u * u, power); }, 0.0, 1.0);
}

template <int L>
QValue q_closed_form(double x) {
    static_assert(L == 3 || L == 5);
    const double y = (1.0 - x) / (3.0 * x);
    const double root = std::sqrt(1.0 + y);

    double prefactor, bracket, tail;
    if constexpr (L == 5) {
        prefactor = std::pow(3.0 * x, 2.5) / 48.0;
        bracket = (8.0 + 26.0 * y + 33.0 * y * y) * root;
        tail = 15.0 * y * y * y;
    } else {
        prefactor = std::pow(3.0 * x, 1.5) / 8.0;
        bracket = (2.0 + 5.0 * y) * root;
        tail = 3.0 * y * y;
    }

    if (y > 0.0) {
        // ln((1 + sqrt(1+y)) / sqrt(y)) == asinh(1/sqrt(y))
        return {prefactor * (bracket + tail * std::asinh(1.0 / std::sqrt(y))), 0.0};
    }
    if (y == 0.0) return {prefactor * bracket, 0.0};

    const double log_mod = std::log((1.0 + root) / std::sqrt(-y));
    return {prefactor * (bracket + tail * log_mod), prefactor * tail * (-0.5 * std::numbers::pi)};
}

template <int L>
QValue q(double x) {
    if (!(x >= 0.0)) throw DomainError("q-function: argument must be non-negative");
    if (x == 0.0) return {1.0, 0.0};
    if (x < small_x) return {q_oracle(L, x), 0.0};
    return q_closed_form<L>(x);
}

}  // namespace qfunctions

/// Q5(x): angular average entering the dipolar LHY energy.
inline QValue q5(double x) { return qfunctions::q<5>(x); }

/// Q3(x): angular average entering the quantum depletion.
inline QValue q3(double x) { return qfunctions::q<3>(x); }

}  // namespace droplet_dft
