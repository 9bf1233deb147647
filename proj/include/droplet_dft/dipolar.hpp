#pragma once

// Uniform dipolar Bose gas with dipoles along z, internal units hbar = m = 1.
//
// The renormalised contact coupling g' = g + chi solves
//
//   F(g') = g + (16/sqrt(pi)) g sqrt(n a^3) Q5(g eps_dd / g') - g' = 0.
//
// F is strictly decreasing in g' (Q5 increases with its argument, and the
// argument decreases with g'), so the root is bracketed by
// [max(g, g eps_dd), g + (16/sqrt(pi)) g sqrt(n a^3) Q5(1)] whenever it exists
// with eps_dd' <= 1. For eps_dd > 1 that requires F(g eps_dd) >= 0, which
// fails below a critical density: that is the stability boundary.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "droplet_dft/errors.hpp"
#include "droplet_dft/parallel.hpp"
#include "droplet_dft/qfunctions.hpp"

namespace droplet_dft {

struct DipolarParams {
    double a = 1.0;       // s-wave scattering length
    double eps_dd = 0.0;  // a_dd / a

    DipolarParams() = default;
    DipolarParams(double a_, double eps_dd_) : a(a_), eps_dd(eps_dd_) {
        if (!(a > 0.0)) throw DomainError("dipolar: scattering length must be positive");
        if (!(eps_dd >= 0.0)) throw DomainError("dipolar: eps_dd must be non-negative");
    }

    static DipolarParams from_coupling(double g, double eps_dd) { return {g / (4.0 * std::numbers::pi), eps_dd}; }

    double g() const noexcept { return 4.0 * std::numbers::pi * a; }
};

struct SelfConsistentCoupling {
    double g_prime = 0.0;
    double eps_dd_prime = 0.0;
    double a_prime = 0.0;
    double chi = 0.0;
    double n = 0.0;
    bool converged = false;
    std::pair<double, double> bracket{0.0, 0.0};
    double residual = 0.0;  // |F(g')| / g
    int iterations = 0;
};

struct SpectrumPoint {
    double k = 0.0;
    double phi_k = 0.0;
    double energy = 0.0;  // |epsilon|; imaginary magnitude when !is_real
    bool is_real = true;
};

enum class DepletionMode { bogoliubov, corrected };
enum class SpectrumMode { bogoliubov, renormalized };

struct Depletion {
    double fraction = 0.0;  // real part
    double imag = 0.0;
    bool is_real = true;
};

/// U(k) + chi = g [1 + eps_dd (3 cos^2 phi_k - 1)] + chi.
inline double u_kernel(double phi_k, const DipolarParams& p, double chi = 0.0) {
    const double c = std::cos(phi_k);
    return p.g() * (1.0 + p.eps_dd * (3.0 * c * c - 1.0)) + chi;
}

/// Dilute LHY energy density (64 / 15 sqrt(pi)) g n^2 sqrt(n a^3) Q5(eps_dd); complex for eps_dd > 1.
inline QValue lhy_dipolar(double n, const DipolarParams& p) {
    if (!(n >= 0.0)) throw DomainError("lhy_dipolar: density must be non-negative");
    const double scale = 64.0 / (15.0 * std::sqrt(std::numbers::pi)) * p.g() * n * n * std::sqrt(n * p.a * p.a * p.a);
    const QValue q = q5(p.eps_dd);
    return {scale * q.re, scale * q.im};
}

namespace detail {

inline double coupling_correction_scale(double n, const DipolarParams& p) {
    return 16.0 / std::sqrt(std::numbers::pi) * p.g() * std::sqrt(n * p.a * p.a * p.a);
}

inline double coupling_residual(double g_prime, double n, const DipolarParams& p) {
    const double x = std::min(1.0, p.g() * p.eps_dd / g_prime);
    return p.g() + coupling_correction_scale(n, p) * q5(x).re - g_prime;
}

}  // namespace detail

/// True when the renormalised coupling has a root with eps_dd' <= 1.
inline bool has_stable_solution(double n, const DipolarParams& p) {
    if (!(n > 0.0)) return p.eps_dd <= 1.0;
    if (p.eps_dd <= 1.0) return true;
    const double q5_one = q5(1.0).re;
    return p.g() + detail::coupling_correction_scale(n, p) * q5_one - p.g() * p.eps_dd >= 0.0;
}

/// Bisection for g'; throws NoStableSolution below the critical density.
inline SelfConsistentCoupling solve_g_prime(double n, const DipolarParams& p, double tol = 1e-12) {
    if (!(n > 0.0)) throw DomainError("solve_g_prime: density must be positive");
    const double g = p.g();
    const double scale = detail::coupling_correction_scale(n, p);

    SelfConsistentCoupling out;
    out.n = n;
    auto finish = [&](double gp) {
        out.g_prime = gp;
        out.chi = gp - g;
        out.eps_dd_prime = g * p.eps_dd / gp;
        out.a_prime = gp / (4.0 * std::numbers::pi);
        out.residual = std::abs(detail::coupling_residual(gp, n, p)) / g;
        out.converged = out.residual < tol;
        return out;
    };

    if (p.eps_dd == 0.0) {
        out.bracket = {g + scale, g + scale};
        return finish(g + scale);
    }

    double lo = std::max(g, g * p.eps_dd);
    double hi = g + scale * q5(1.0).re;
    out.bracket = {lo, hi};
    double f_lo = detail::coupling_residual(lo, n, p);
    if (f_lo < 0.0) throw NoStableSolution("solve_g_prime: density below the critical density for eps_dd > 1");
    if (f_lo == 0.0) return finish(lo);

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        out.iterations = it + 1;
        const double f = detail::coupling_residual(mid, n, p);
        if (std::abs(f) / g < 0.25 * tol || mid <= lo || mid >= hi) break;
        (f > 0.0 ? lo : hi) = mid;
    }
    return finish(mid);
}

/// (64 / 15 sqrt(pi)) g n^2 sqrt(n a^3) Q5(eps_dd') with eps_dd' from the converged coupling.
inline double correlation_energy_sc(double n, const DipolarParams& p) {
    if (n == 0.0) return 0.0;
    const auto sc = solve_g_prime(n, p);
    return 64.0 / (15.0 * std::sqrt(std::numbers::pi)) * p.g() * n * n * std::sqrt(n * p.a * p.a * p.a) *
           q5(sc.eps_dd_prime).re;
}

/// Quantum depletion (8/3) sqrt(n a^3 / pi) Q3(eps); corrected mode uses a', eps_dd'.
inline Depletion depletion(double n, const DipolarParams& p, DepletionMode mode) {
    if (!(n >= 0.0)) throw DomainError("depletion: density must be non-negative");
    if (n == 0.0) return {};
    double a = p.a, eps = p.eps_dd;
    if (mode == DepletionMode::corrected) {
        const auto sc = solve_g_prime(n, p);
        a = sc.a_prime;
        eps = sc.eps_dd_prime;
    }
    const double scale = 8.0 / 3.0 * std::sqrt(n * a * a * a / std::numbers::pi);
    const QValue q = q3(eps);
    return {scale * q.re, scale * q.im, q.is_real()};
}

/// epsilon = sqrt(eps_k (2 n U + eps_k)), eps_k = k^2 / 2.
inline SpectrumPoint spectrum(double k, double phi_k, double n, const DipolarParams& p, SpectrumMode mode) {
    if (!(k >= 0.0)) throw DomainError("spectrum: k must be non-negative");
    double chi = 0.0;
    if (mode == SpectrumMode::renormalized && n > 0.0) chi = solve_g_prime(n, p).chi;
    const double ek = 0.5 * k * k;
    const double bracket = 2.0 * n * u_kernel(phi_k, p, chi) + ek;
    return {k, phi_k, std::sqrt(ek * std::abs(bracket)), bracket >= 0.0};
}

/// Smallest density at which solve_g_prime succeeds, by bisection in log n.
/// Returns 0 for eps_dd <= 1 (always stable).
inline double stability_boundary(double eps_dd, double a = 1.0, double tol = 1e-10) {
    const DipolarParams p(a, eps_dd);
    if (eps_dd <= 1.0) return 0.0;
    const double a3 = a * a * a;
    double hi = 1e-12 / a3;
    while (!has_stable_solution(hi, p)) hi *= 4.0;
    double lo = hi;
    while (has_stable_solution(lo, p)) lo *= 0.25;
    while ((hi - lo) > tol * hi) {
        const double mid = std::sqrt(lo * hi);
        (has_stable_solution(mid, p) ? hi : lo) = mid;
    }
    return hi;
}

struct StabilityPoint {
    double eps_dd;
    double n_critical;
};

/// Critical density for every eps_dd; cells are independent.
inline std::vector<StabilityPoint> stability_diagram(const std::vector<double>& eps_values, double a = 1.0,
                                                     double tol = 1e-10, unsigned threads = 0) {
    std::vector<StabilityPoint> out(eps_values.size());
    parallel_for(eps_values.size(), threads,
                 [&](std::size_t i) { out[i] = {eps_values[i], stability_boundary(eps_values[i], a, tol)}; });
    return out;
}

}  // namespace droplet_dft
