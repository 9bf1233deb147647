#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace droplet_dft::quadrature {

template <std::size_t N>
struct GaussLegendreRule {
    std::array<double, N> nodes{};    // on [-1, 1], ascending
    std::array<double, N> weights{};
};

/// Nodes and weights from Newton iteration on P_N (Chebyshev initial guesses).
template <std::size_t N>
GaussLegendreRule<N> make_gauss_legendre() {
    GaussLegendreRule<N> rule;
    constexpr std::size_t half = (N + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= N; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2) /
                     static_cast<double>(j);
            }
            dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[N - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[N - 1 - i] = w;
    }
    return rule;
}

template <std::size_t N>
const GaussLegendreRule<N>& gauss_legendre() {
    static const GaussLegendreRule<N> rule = make_gauss_legendre<N>();
    return rule;
}

/// Fixed-order Gauss-Legendre integral of f over [lo, hi].
template <std::size_t N, class F>
double integrate(F&& f, double lo, double hi) {
    const auto& rule = gauss_legendre<N>();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

}  // namespace droplet_dft::quadrature
