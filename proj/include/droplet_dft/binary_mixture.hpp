#pragma once

// Equal-mass two-component Bose gas in internal units (hbar = m = 1).
//
// Sound speeds of the renormalized Bogoliubov Hamiltonian with g' = g + chi:
//
//   c^2_{hard,soft} = [g'11 n1 + g'22 n2 +- sqrt((g'11 n1 - g'22 n2)^2 + 4 g'12^2 n1 n2)] / 2
//
// and the correlation (renormalized LHY) energy density
//
//   E_C = 8 / (15 pi^2) (c_hard^5 + c_soft^5).
//
// The 1/2 under the root (rather than 1/(2 sqrt m) outside it) is what makes
// the chi = 0 limit of E_C reduce to the dilute LHY form below and gives the
// single-component speed sqrt(g n). Only a real soft mode contributes.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "droplet_dft/errors.hpp"

namespace droplet_dft {

struct MixtureParams {
    double g11 = 0.0;
    double g22 = 0.0;
    double g12 = 0.0;

    MixtureParams() = default;
    MixtureParams(double g11_, double g22_, double g12_) : g11(g11_), g22(g22_), g12(g12_) {
        if (!(g11 > 0.0) || !(g22 > 0.0))
            throw DomainError("mixture: intraspecies couplings g11, g22 must be positive");
    }

    /// Couplings from scattering lengths, g = 4 pi a.
    static MixtureParams from_scattering_lengths(double a11, double a22, double a12) {
        constexpr double four_pi = 4.0 * std::numbers::pi;
        return {four_pi * a11, four_pi * a22, four_pi * a12};
    }

    double a11() const noexcept { return g11 / (4.0 * std::numbers::pi); }
    double a22() const noexcept { return g22 / (4.0 * std::numbers::pi); }
    double a12() const noexcept { return g12 / (4.0 * std::numbers::pi); }

    bool miscible() const noexcept { return g12 * g12 < g11 * g22; }
};

struct DensityPair {
    double n1 = 0.0;
    double n2 = 0.0;
};

struct ChiMatrix {
    double chi11 = 0.0;
    double chi12 = 0.0;
    double chi22 = 0.0;

    friend ChiMatrix operator+(ChiMatrix a, const ChiMatrix& b) {
        return {a.chi11 + b.chi11, a.chi12 + b.chi12, a.chi22 + b.chi22};
    }
    friend ChiMatrix operator*(double s, const ChiMatrix& c) { return {s * c.chi11, s * c.chi12, s * c.chi22}; }
};

/// Speeds of the two linearly dispersing modes. When the soft mode is
/// unstable (c_soft^2 < 0), `c_soft` holds sqrt|c_soft^2| and the flag is false.
struct SoundSpeeds {
    double c_soft = 0.0;
    double c_hard = 0.0;
    bool soft_mode_real = true;

    double soft_squared() const noexcept { return soft_mode_real ? c_soft * c_soft : -c_soft * c_soft; }
    double hard_squared() const noexcept { return c_hard * c_hard; }
};

namespace detail {

inline void check_densities(const DensityPair& n) {
    if (!(n.n1 >= 0.0) || !(n.n2 >= 0.0)) throw DomainError("mixture: densities must be non-negative");
}

struct ModeSquares {
    double hard;
    double soft;
};

inline ModeSquares mode_squares(const DensityPair& n, double g11, double g22, double g12) {
    const double t = g11 * n.n1 + g22 * n.n2;
    const double d = g11 * n.n1 - g22 * n.n2;
    const double r = std::sqrt(d * d + 4.0 * g12 * g12 * n.n1 * n.n2);
    const double hard = 0.5 * (t + r);
    // (t - r)/2 via the determinant avoids cancellation when the soft mode is slow.
    const double soft = hard > 0.0 ? n.n1 * n.n2 * (g11 * g22 - g12 * g12) / hard : 0.5 * (t - r);
    return {hard, soft};
}

inline constexpr double lhy_prefactor = 8.0 / (15.0 * std::numbers::pi * std::numbers::pi);

}  // namespace detail

inline SoundSpeeds sound_speeds(const DensityPair& n, const MixtureParams& p, const ChiMatrix& chi = {}) {
    detail::check_densities(n);
    const auto sq = detail::mode_squares(n, p.g11 + chi.chi11, p.g22 + chi.chi22, p.g12 + chi.chi12);
    SoundSpeeds s;
    s.c_hard = std::sqrt(std::max(sq.hard, 0.0));
    s.soft_mode_real = sq.soft >= 0.0;
    s.c_soft = std::sqrt(std::abs(sq.soft));
    return s;
}

/// 8/(15 pi^2) (c_hard^5 + c_soft^5), soft term only when the soft mode is real.
inline double correlation_energy_from_speeds(const SoundSpeeds& s) {
    const double hard = std::pow(s.c_hard, 5);
    const double soft = s.soft_mode_real ? std::pow(s.c_soft, 5) : 0.0;
    return detail::lhy_prefactor * (hard + soft);
}

namespace detail {

// Linear form X = g11 n1 + g22 n2 + R of the dilute LHY energy and its derivatives.
struct LinearForm {
    double x;
    double r;
    double d;
};

inline LinearForm linear_form(const DensityPair& n, const MixtureParams& p) {
    const double d = p.g11 * n.n1 - p.g22 * n.n2;
    const double r = std::sqrt(d * d + 4.0 * p.g12 * p.g12 * n.n1 * n.n2);
    return {p.g11 * n.n1 + p.g22 * n.n2 + r, r, d};
}

inline constexpr double dilute_prefactor = std::numbers::sqrt2 / (15.0 * std::numbers::pi * std::numbers::pi);

}  // namespace detail

/// Dilute-limit LHY energy density, hard branch:
/// sqrt(2)/(15 pi^2) [g11 n1 + g22 n2 + sqrt((g11 n1 - g22 n2)^2 + 4 g12^2 n1 n2)]^{5/2}.
inline double lhy_dilute(const DensityPair& n, const MixtureParams& p) {
    detail::check_densities(n);
    const auto f = detail::linear_form(n, p);
    return detail::dilute_prefactor * std::pow(f.x, 2.5);
}

namespace detail {

// Density Hessian of 8/(15 pi^2) (lambda_hard^{5/2} + lambda_soft^{5/2}) with the
// couplings held fixed, lambda = c^2. The soft branch enters only when
// requested and positive. Requires R > 0.
inline ChiMatrix frozen_coupling_hessian(const DensityPair& n, double g11, double g22, double g12, bool with_soft) {
    const double d = g11 * n.n1 - g22 * n.n2;
    const double r = std::sqrt(d * d + 4.0 * g12 * g12 * n.n1 * n.n2);
    const double g12sq = g12 * g12;
    // R dR/dn_i
    const double r1 = (d * g11 + 2.0 * g12sq * n.n2) / r;
    const double r2 = (-d * g22 + 2.0 * g12sq * n.n1) / r;
    const double r11 = (g11 * g11 - r1 * r1) / r;
    const double r22 = (g22 * g22 - r2 * r2) / r;
    const double r12 = (2.0 * g12sq - g11 * g22 - r1 * r2) / r;

    const auto sq = mode_squares(n, g11, g22, g12);
    ChiMatrix h;
    auto add_branch = [&](double lambda, double sign) {
        const double l1 = 0.5 * (g11 + sign * r1);
        const double l2 = 0.5 * (g22 + sign * r2);
        const double first = lhy_prefactor * 3.75 * std::sqrt(lambda);
        const double second = lhy_prefactor * 2.5 * lambda * std::sqrt(lambda) * 0.5 * sign;
        h.chi11 += first * l1 * l1 + second * r11;
        h.chi12 += first * l1 * l2 + second * r12;
        h.chi22 += first * l2 * l2 + second * r22;
    };
    if (sq.hard > 0.0) add_branch(sq.hard, 1.0);
    if (with_soft && sq.soft > 0.0) add_branch(sq.soft, -1.0);
    return h;
}

}  // namespace detail

/// Analytic Hessian of lhy_dilute with respect to (n1, n2).
inline ChiMatrix chi_dilute(const DensityPair& n, const MixtureParams& p) {
    detail::check_densities(n);
    const auto f = detail::linear_form(n, p);
    if (!(f.r > 0.0) || !(f.x > 0.0)) throw DomainError("chi_dilute: Hessian is singular at this density");
    return detail::frozen_coupling_hessian(n, p.g11, p.g22, p.g12, false);
}

/// Mean-field energy density (1/2) sum g_ab n_a n_b.
inline double mean_field_energy(const DensityPair& n, const MixtureParams& p) {
    return 0.5 * (p.g11 * n.n1 * n.n1 + p.g22 * n.n2 * n.n2) + p.g12 * n.n1 * n.n2;
}

/// E/N = A n + B n^{3/2} for the symmetric mixture (g22 = g11), n the total density.
struct EosCoefficients {
    double a;  // pi (a11 + a12)
    double b;  // 32 sqrt(2 pi) a11^{5/2} (1 - a12/a11)^{5/2} / 15

    double energy_per_particle(double n) const { return a * n + b * n * std::sqrt(n); }
    /// Energy density A n^2 + B n^{5/2}.
    double energy_density(double n) const { return n * energy_per_particle(n); }
    /// d(energy density)/dn = 2 A n + (5/2) B n^{3/2}.
    double chemical_potential(double n) const { return 2.0 * a * n + 2.5 * b * n * std::sqrt(n); }
};

inline EosCoefficients eos_coefficients(double a11, double a12) {
    if (!(a11 > 0.0)) throw DomainError("eos: a11 must be positive");
    if (a12 > a11) throw DomainError("eos: a12 > a11 lies outside the droplet regime");
    constexpr double pi = std::numbers::pi;
    return {pi * (a11 + a12), 32.0 * std::sqrt(2.0 * pi) / 15.0 * std::pow(a11, 2.5) * std::pow(1.0 - a12 / a11, 2.5)};
}

/// Energy per particle of the symmetric mixture at total density n (n1 = n2 = n/2).
inline double eos_symmetric(double n_total, double a11, double a12) {
    if (!(n_total >= 0.0)) throw DomainError("eos: density must be non-negative");
    return eos_coefficients(a11, a12).energy_per_particle(n_total);
}

/// Total density minimising E/N: (2A / 3B)^2. Requires a12 < -a11.
inline double equilibrium_density(double a11, double a12) {
    if (!(a12 < -a11)) throw NoDroplet("equilibrium_density: self-binding requires a12 < -a11");
    const auto c = eos_coefficients(a11, a12);
    const double root = 2.0 * c.a / (3.0 * c.b);
    return root * root;
}

}  // namespace droplet_dft
