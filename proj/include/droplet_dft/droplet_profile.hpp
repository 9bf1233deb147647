#pragma once

// Self-bound, spherically symmetric droplet of the symmetric binary mixture
// (g22 = g11, n1 = n2 = n/2, no trap), internal units hbar = m = 1.
//
// With psi = sqrt(n) the energy is
//
//   E = \int [ (1/2) |psi'|^2 + e(psi^2) ] dV,
//
// and the stationary condition at fixed N is -(1/2) lap psi + e'(n) psi = mu psi.
// The radial grid r_i = i dr is discretised by finite volumes: node i owns
// the shell [r_{i-1/2}, r_{i+1/2}], so the origin carries a small but nonzero
// weight and the operator is self-adjoint in the shell-volume inner product.
// psi = 0 is imposed at r = R_max; dpsi/dr = 0 at the origin follows from the
// shell fluxes.

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "droplet_dft/binary_mixture.hpp"
#include "droplet_dft/csv.hpp"
#include "droplet_dft/errors.hpp"
#include "droplet_dft/self_consistent.hpp"

namespace droplet_dft {

/// Local interaction energy density e(n) and its derivative, n the total density.
template <class F>
concept LocalFunctional = requires(const F& f, double n) {
    { f.energy_density(n) } -> std::convertible_to<double>;
    { f.potential(n) } -> std::convertible_to<double>;
};

/// A n^2 + B n^{5/2}: mean field plus the dilute LHY energy.
struct DiluteFunctional {
    EosCoefficients c;

    DiluteFunctional(double a11, double a12) : c(eos_coefficients(a11, a12)) {}

    double energy_density(double n) const { return c.energy_density(n); }
    double potential(double n) const { return c.chemical_potential(n); }
};

/// Mean field plus the self-consistent E_C read along the diagonal n1 = n2 of
/// a CorrelationTable. Below the table, E_C is continued with the dilute
/// n^{5/2} law from the first diagonal node; above it, from the last.
class TabulatedFunctional {
public:
    TabulatedFunctional(const CorrelationTable& table, const MixtureParams& p) : mean_field_(0.25 * (p.g11 + p.g12)) {
        if (p.g11 != p.g22) throw DomainError("tabulated functional: requires g22 = g11");
        if (table.grid1 != table.grid2) throw DomainError("tabulated functional: table grid must be square");
        const std::size_t m = table.size1();
        std::vector<double> diag(m);
        for (std::size_t i = 0; i < m; ++i) diag[i] = table.ec_at(i, i);
        lo_ = 2.0 * table.grid1.front();
        hi_ = 2.0 * table.grid1.back();
        step_ = (hi_ - lo_) / static_cast<double>(m - 1);
        ec_lo_ = diag.front();
        ec_hi_ = diag.back();
        spline_.emplace(diag.begin(), diag.end(), lo_, step_);
    }

    double energy_density(double n) const { return mean_field_ * n * n + correlation(n); }
    double potential(double n) const { return 2.0 * mean_field_ * n + correlation_derivative(n); }

    double correlation(double n) const {
        if (n < lo_) return ec_lo_ * std::pow(n / lo_, 2.5);
        if (n > hi_) return ec_hi_ * std::pow(n / hi_, 2.5);
        return (*spline_)(n);
    }
    double correlation_derivative(double n) const {
        if (n < lo_) return 2.5 * ec_lo_ / lo_ * std::pow(n / lo_, 1.5);
        if (n > hi_) return 2.5 * ec_hi_ / hi_ * std::pow(n / hi_, 1.5);
        return spline_->prime(n);
    }

private:
    double mean_field_;
    double lo_ = 0.0, hi_ = 0.0, step_ = 0.0, ec_lo_ = 0.0, ec_hi_ = 0.0;
    std::optional<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

struct ProfileGrid {
    double r_max = 0.0;
    std::size_t n_points = 0;

    static constexpr std::size_t min_points = 200;

    double dr() const noexcept { return r_max / static_cast<double>(n_points - 1); }
    double r(std::size_t i) const noexcept { return static_cast<double>(i) * dr(); }

    void validate() const {
        if (n_points < min_points) throw ValidationError("profile grid: at least 200 points are required");
        if (!(r_max > 0.0)) throw ValidationError("profile grid: R_max must be positive");
    }

    /// R_max = 5 (N / n_eq)^{1/3}, spacing a fraction of the healing length 1/sqrt(2|mu_eq|).
    static ProfileGrid for_droplet(double atom_number, double a11, double a12, double points_per_healing = 8.0) {
        const double n_eq = equilibrium_density(a11, a12);
        const auto c = eos_coefficients(a11, a12);
        const double mu_eq = c.chemical_potential(n_eq);
        const double healing = 1.0 / std::sqrt(2.0 * std::abs(mu_eq));
        const double r_max = 5.0 * std::cbrt(atom_number / n_eq);
        const auto points = static_cast<std::size_t>(std::ceil(r_max / healing * points_per_healing)) + 1;
        return {r_max, std::max(points, min_points)};
    }
};

struct DensityProfile {
    std::vector<double> r;
    std::vector<double> n_of_r;
    double N = 0.0;
    double mu = 0.0;
    double E = 0.0;
    double E_kinetic = 0.0;
    double E_interaction = 0.0;
    bool converged = false;
    bool self_bound = true;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::vector<double> energy_history;  // accepted steps
};

struct EnergyParts {
    double kinetic = 0.0;
    double interaction = 0.0;
    double total() const noexcept { return kinetic + interaction; }
};

struct RelaxOptions {
    double step = 0.0;          // 0: 0.5 / |mu_eq|
    double tol = 1e-8;          // max |H psi - mu psi| / (|mu| max psi)
    std::size_t max_steps = 200000;
};

namespace detail {

class RadialDiscretisation {
public:
    // Node i owns [r_{i-1/2}, r_{i+1/2}] clipped to [0, R_max]; face i joins nodes i and i+1.
    explicit RadialDiscretisation(const ProfileGrid& g) : m_(g.n_points), dr_(g.dr()) {
        weight_.resize(m_);
        flux_.resize(m_ - 1);
        constexpr double four_pi_third = 4.0 * std::numbers::pi / 3.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double r_out = i + 1 < m_ ? (static_cast<double>(i) + 0.5) * dr_ : g.r_max;
            const double r_in = i == 0 ? 0.0 : (static_cast<double>(i) - 0.5) * dr_;
            weight_[i] = four_pi_third * (r_out * r_out * r_out - r_in * r_in * r_in);
            if (i + 1 < m_) flux_[i] = 2.0 * std::numbers::pi * r_out * r_out / dr_;
        }
    }

    std::size_t size() const noexcept { return m_; }
    double weight(std::size_t i) const noexcept { return weight_[i]; }

    double norm(const std::vector<double>& psi) const {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i) s += weight_[i] * psi[i] * psi[i];
        return s;
    }

    /// (1/2) sum over faces of 4 pi r_face^2 (dpsi/dr)^2 dr.
    double kinetic(const std::vector<double>& psi) const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < m_; ++i) {
            const double d = psi[i + 1] - psi[i];
            s += flux_[i] * d * d;
        }
        return s;
    }

    /// T psi = -(1/2) lap psi on the free nodes; the node at R_max is held at zero.
    void apply_kinetic(const std::vector<double>& psi, std::vector<double>& out) const {
        out.assign(m_, 0.0);
        for (std::size_t i = 0; i + 1 < m_; ++i) {
            double acc = flux_[i] * (psi[i] - psi[i + 1]);
            if (i > 0) acc += flux_[i - 1] * (psi[i] - psi[i - 1]);
            out[i] = acc / weight_[i];
        }
    }

    /// Solves (I + tau T) x = rhs on the free nodes by the Thomas algorithm; x at R_max is zero.
    void solve_implicit(double tau, const std::vector<double>& rhs, std::vector<double>& x) const {
        const std::size_t free = m_ - 1;
        std::vector<double> c(free), d(free);
        for (std::size_t i = 0; i < free; ++i) {
            const double left = i > 0 ? flux_[i - 1] : 0.0;
            const double right = flux_[i];
            const double lower = -tau * left / weight_[i];
            const double upper = i + 1 < free ? -tau * right / weight_[i] : 0.0;
            const double diag = 1.0 + tau * (left + right) / weight_[i];
            const double den = i > 0 ? diag - lower * c[i - 1] : diag;
            c[i] = upper / den;
            d[i] = (rhs[i] - (i > 0 ? lower * d[i - 1] : 0.0)) / den;
        }
        x.assign(m_, 0.0);
        x[free - 1] = d[free - 1];
        for (std::size_t i = free - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    }

private:
    std::size_t m_;
    double dr_;
    std::vector<double> weight_;
    std::vector<double> flux_;
};

template <LocalFunctional F>
EnergyParts energy_of(const RadialDiscretisation& disc, const std::vector<double>& psi, const F& f) {
    EnergyParts e;
    e.kinetic = disc.kinetic(psi);
    for (std::size_t i = 0; i < disc.size(); ++i) e.interaction += disc.weight(i) * f.energy_density(psi[i] * psi[i]);
    return e;
}

}  // namespace detail

/// Kinetic and interaction energies of a given profile on its grid.
template <LocalFunctional F>
EnergyParts energy_functional(const DensityProfile& profile, const F& f) {
    if (profile.r.size() < 2 || profile.r.size() != profile.n_of_r.size())
        throw DomainError("energy_functional: malformed profile");
    for (double n : profile.n_of_r)
        if (!(n >= 0.0)) throw DomainError("energy_functional: negative density node");
    const ProfileGrid grid{profile.r.back(), profile.r.size()};
    const detail::RadialDiscretisation disc(grid);
    std::vector<double> psi(profile.n_of_r.size());
    std::transform(profile.n_of_r.begin(), profile.n_of_r.end(), psi.begin(), [](double n) { return std::sqrt(n); });
    return detail::energy_of(disc, psi, f);
}

inline EnergyParts energy_functional(const DensityProfile& profile, double a11, double a12) {
    return energy_functional(profile, DiluteFunctional(a11, a12));
}

/// Normalised gradient flow toward the droplet ground state with N atoms.
/// `initial`, when given, is a density on the same grid.
template <LocalFunctional F>
DensityProfile relax(double atom_number, const F& f, double mu_scale, const ProfileGrid& grid,
                     const RelaxOptions& opt = {}, const std::vector<double>* initial = nullptr,
                     double initial_radius = 0.0) {
    grid.validate();
    if (!(atom_number > 0.0)) throw DomainError("relax: atom number must be positive");
    const detail::RadialDiscretisation disc(grid);
    const std::size_t m = grid.n_points;

    std::vector<double> psi(m);
    if (initial) {
        if (initial->size() != m) throw DomainError("relax: initial profile does not match the grid");
        for (std::size_t i = 0; i < m; ++i) psi[i] = std::sqrt(std::max(0.0, (*initial)[i]));
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            const double x = grid.r(i) / initial_radius;
            psi[i] = std::exp(-0.5 * std::pow(x, 8));
        }
    }
    psi[m - 1] = 0.0;
    auto renormalise = [&](std::vector<double>& v) {
        const double s = std::sqrt(atom_number / disc.norm(v));
        for (double& x : v) x *= s;
    };
    renormalise(psi);

    std::vector<double> t_psi(m), h_psi(m), rhs(m), trial(m);
    auto hamiltonian = [&](const std::vector<double>& v, std::vector<double>& out) {
        disc.apply_kinetic(v, out);
        for (std::size_t i = 0; i < m; ++i) out[i] += f.potential(v[i] * v[i]) * v[i];
    };
    auto chemical_potential = [&](const std::vector<double>& v, const std::vector<double>& hv) {
        double num = 0.0;
        for (std::size_t i = 0; i < m; ++i) num += disc.weight(i) * v[i] * hv[i];
        return num / disc.norm(v);
    };

    double tau = opt.step > 0.0 ? opt.step : 0.5 / std::abs(mu_scale);
    DensityProfile out;
    double energy = detail::energy_of(disc, psi, f).total();
    out.energy_history.push_back(energy);
    std::vector<double> residuals;
    double mu = 0.0;

    for (;;) {
        hamiltonian(psi, h_psi);
        mu = chemical_potential(psi, h_psi);
        const double peak = *std::max_element(psi.begin(), psi.end());
        double res = 0.0;
        for (std::size_t i = 0; i < m; ++i) res = std::max(res, std::abs(h_psi[i] - mu * psi[i]));
        res /= std::abs(mu) * peak;
        out.residual = res;
        residuals.push_back(res);
        if (res < opt.tol) {
            out.converged = true;
            break;
        }
        if (out.iterations >= opt.max_steps)
            throw IterationLimit("relax: no convergence after " + std::to_string(opt.max_steps) + " steps", residuals);

        // (I + tau T) psi* = psi - tau (V - mu) psi, then renormalise; halve tau if E rises.
        for (;;) {
            for (std::size_t i = 0; i < m; ++i) rhs[i] = psi[i] - tau * (f.potential(psi[i] * psi[i]) - mu) * psi[i];
            disc.solve_implicit(tau, rhs, trial);
            renormalise(trial);
            const auto parts = detail::energy_of(disc, trial, f);
            const double e_trial = parts.total();
            // Near convergence the decrease is O(residual^2), below the rounding of E itself.
            const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(parts.kinetic) + std::abs(parts.interaction));
            if (e_trial <= energy + slack) {
                psi.swap(trial);
                energy = e_trial;
                break;
            }
            tau *= 0.5;
            if (tau < 1e-12 / std::abs(mu_scale)) {
                // No descent possible at this resolution: accept the current state.
                out.residual = res;
                out.converged = res < opt.tol;
                goto finished;
            }
        }
        out.energy_history.push_back(energy);
        ++out.iterations;
    }
finished:
    out.r.resize(m);
    out.n_of_r.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.r[i] = grid.r(i);
        out.n_of_r[i] = psi[i] * psi[i];
    }
    const auto parts = detail::energy_of(disc, psi, f);
    out.N = disc.norm(psi);
    out.mu = mu;
    out.E_kinetic = parts.kinetic;
    out.E_interaction = parts.interaction;
    out.E = parts.total();
    out.self_bound = out.E < 0.0;
    if (!out.converged)
        throw IterationLimit("relax: stalled with residual " + csv::format_number(out.residual), residuals);
    return out;
}

/// Dilute-functional droplet for a12 < -a11, initialised as a super-Gaussian
/// of radius (3N / (4 pi n_eq))^{1/3}.
inline DensityProfile relax(double atom_number, double a11, double a12, const ProfileGrid& grid,
                            const RelaxOptions& opt = {}, const std::vector<double>* initial = nullptr) {
    const double n_eq = equilibrium_density(a11, a12);
    const DiluteFunctional f(a11, a12);
    const double mu_eq = f.potential(n_eq);
    const double radius = std::cbrt(3.0 * atom_number / (4.0 * std::numbers::pi * n_eq));
    return relax(atom_number, f, mu_eq, grid, opt, initial, radius);
}

inline void write_profile_csv(std::ostream& out, const DensityProfile& p, const std::string& length_unit = "[l]",
                              const std::string& density_unit = "[l^-3]") {
    csv::write_header(out, {"r" + length_unit, "n" + density_unit});
    for (std::size_t i = 0; i < p.r.size(); ++i) csv::write_row(out, {p.r[i], p.n_of_r[i]});
    out << "# N=" << csv::format_number(p.N) << ", mu=" << csv::format_number(p.mu)
        << ", E=" << csv::format_number(p.E) << '\n';
}

}  // namespace droplet_dft
