#pragma once

// Self-consistent correlation energy of the binary mixture on a (n1, n2) grid.
//
// The fixed point couples E_C(n; g + chi) from the sound speeds with
// chi = Hessian of E_C with respect to the densities. Interior Hessians are
// central differences. On the grid edges chi is the density Hessian of E_C at
// frozen couplings g' = g + chi, iterated pointwise; one-sided difference
// stencils or extrapolated chi there admit growing boundary-layer solutions of
// the linearised fixed point and leave it ill-conditioned on fine grids. The
// frozen closure drops the d chi / dn terms, so the first interior row next to
// a low-density edge carries an O(h^0) defect that shrinks under refinement.
//
// Two update rules are provided:
//  - picard: chi <- chi + alpha (H[E(chi)] - chi). The feedback through the
//    second difference grows like 1/h^2; even at n a^3 ~ 1e-10 a weakly
//    growing mode remains, so picard only reaches moderate tolerances when
//    dilute and diverges in the droplet regime.
//  - newton: the pointwise dependence of E on chi is linearised, which turns
//    the update into one sparse solve of (I - sum_k w_k D_k) s = w . r on the
//    grid, followed by delta = r + D s. This is the default.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "droplet_dft/binary_mixture.hpp"
#include "droplet_dft/csv.hpp"
#include "droplet_dft/errors.hpp"
#include "droplet_dft/parallel.hpp"

namespace droplet_dft {

/// Uniform rectangular density grid.
struct DensityGrid {
    double n1_min = 0.0, n1_max = 0.0;
    double n2_min = 0.0, n2_max = 0.0;
    std::size_t points1 = 201, points2 = 201;

    static constexpr std::size_t min_points = 33;

    /// [0.05, 4] times the per-component equilibrium density n_eq / 2.
    static DensityGrid droplet_default(double a11, double a12, std::size_t points = 201) {
        const double n_half = 0.5 * equilibrium_density(a11, a12);
        return {0.05 * n_half, 4.0 * n_half, 0.05 * n_half, 4.0 * n_half, points, points};
    }

    static std::vector<double> linspace(double lo, double hi, std::size_t count) {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        return v;
    }

    void validate() const {
        if (points1 < min_points || points2 < min_points)
            throw ValidationError("grid: at least 33 points per axis are required");
        if (!(n1_min > 0.0) || !(n2_min > 0.0)) throw ValidationError("grid: densities must be positive");
        if (!(n1_max > n1_min) || !(n2_max > n2_min)) throw ValidationError("grid: axes must be strictly increasing");
    }
};

enum class FixedPointMethod { newton, picard };

struct SelfConsistentOptions {
    FixedPointMethod method = FixedPointMethod::newton;
    double damping = 1.0;           // alpha; 0.5 is the usual choice for picard
    std::size_t max_iter = 500;     // 0 evaluates E_C at the bare couplings only
    double tol = 1e-8;              // on max |delta chi| / g11 over interior points
    double tol_soft_rel = 1e-10;    // soft mode accepted if c_soft^2 >= -tol_soft_rel g11 (n1 + n2)
    unsigned threads = 0;           // 0: DROPLET_DFT_THREADS or all cores
};

struct CorrelationTable {
    std::vector<double> grid1, grid2;
    std::vector<double> ec;         // row-major, index i * grid2.size() + j
    std::vector<ChiMatrix> chi;
    bool converged = false;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::vector<double> residual_history;
    bool soft_mode_ok = true;                 // c_soft^2 >= -tol_soft at every interior point
    std::size_t soft_mode_violations = 0;
    bool residual_monotone_tail = true;       // last 10 residuals non-increasing

    std::size_t size1() const noexcept { return grid1.size(); }
    std::size_t size2() const noexcept { return grid2.size(); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * grid2.size() + j; }
    double ec_at(std::size_t i, std::size_t j) const { return ec[index(i, j)]; }
    const ChiMatrix& chi_at(std::size_t i, std::size_t j) const { return chi[index(i, j)]; }
    bool interior(std::size_t i, std::size_t j) const noexcept {
        return i > 0 && j > 0 && i + 1 < size1() && j + 1 < size2();
    }

    /// Bilinear interpolation of chi; throws outside the grid.
    ChiMatrix interpolate_chi(const DensityPair& n) const {
        const auto [i, ti, j, tj] = locate(n);
        const auto& c00 = chi_at(i, j);
        const auto& c10 = chi_at(i + 1, j);
        const auto& c01 = chi_at(i, j + 1);
        const auto& c11 = chi_at(i + 1, j + 1);
        auto mix = [&](double a, double b, double c, double d) {
            return (1 - ti) * (1 - tj) * a + ti * (1 - tj) * b + (1 - ti) * tj * c + ti * tj * d;
        };
        return {mix(c00.chi11, c10.chi11, c01.chi11, c11.chi11), mix(c00.chi12, c10.chi12, c01.chi12, c11.chi12),
                mix(c00.chi22, c10.chi22, c01.chi22, c11.chi22)};
    }

    double interpolate_ec(const DensityPair& n) const {
        const auto [i, ti, j, tj] = locate(n);
        return (1 - ti) * (1 - tj) * ec_at(i, j) + ti * (1 - tj) * ec_at(i + 1, j) + (1 - ti) * tj * ec_at(i, j + 1) +
               ti * tj * ec_at(i + 1, j + 1);
    }

private:
    struct Cell {
        std::size_t i;
        double ti;
        std::size_t j;
        double tj;
    };
    Cell locate(const DensityPair& n) const {
        auto axis = [](const std::vector<double>& g, double x, std::size_t& k, double& t) {
            if (!(x >= g.front() && x <= g.back())) throw DomainError("table: density outside the grid");
            const double h = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
            k = std::min(static_cast<std::size_t>((x - g.front()) / h), g.size() - 2);
            t = (x - g[k]) / h;
        };
        Cell c{};
        axis(grid1, n.n1, c.i, c.ti);
        axis(grid2, n.n2, c.j, c.tj);
        return c;
    }
};

namespace detail {

// Central-difference Hessian on the interior of a uniform m1 x m2 grid.
class GridHessian {
public:
    GridHessian(std::size_t m1, std::size_t m2, double h1, double h2)
        : m2_(m2), s11_(1.0 / (h1 * h1)), s22_(1.0 / (h2 * h2)), s12_(0.25 / (h1 * h2)) {
        (void)m1;
    }

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * m2_ + j; }

    ChiMatrix apply(const std::vector<double>& f, std::size_t i, std::size_t j) const {
        ChiMatrix h;
        for_each_tap(i, j, [&](std::size_t col, double c11, double c12, double c22) {
            h.chi11 += c11 * f[col];
            h.chi12 += c12 * f[col];
            h.chi22 += c22 * f[col];
        });
        return h;
    }

    /// Visits every (column, d11, d12, d22) coefficient of interior row (i, j).
    template <class Visit>
    void for_each_tap(std::size_t i, std::size_t j, Visit&& visit) const {
        visit(index(i, j), -2.0 * s11_, 0.0, -2.0 * s22_);
        visit(index(i - 1, j), s11_, 0.0, 0.0);
        visit(index(i + 1, j), s11_, 0.0, 0.0);
        visit(index(i, j - 1), 0.0, 0.0, s22_);
        visit(index(i, j + 1), 0.0, 0.0, s22_);
        visit(index(i + 1, j + 1), 0.0, s12_, 0.0);
        visit(index(i - 1, j - 1), 0.0, s12_, 0.0);
        visit(index(i + 1, j - 1), 0.0, -s12_, 0.0);
        visit(index(i - 1, j + 1), 0.0, -s12_, 0.0);
    }

private:
    std::size_t m2_;
    double s11_, s22_, s12_;
};

// dE_C/d(g'11, g'12, g'22) at fixed densities; the soft branch only when real.
inline ChiMatrix correlation_energy_gradient(const DensityPair& n, const MixtureParams& p, const ChiMatrix& chi) {
    const double g11 = p.g11 + chi.chi11;
    const double g22 = p.g22 + chi.chi22;
    const double g12 = p.g12 + chi.chi12;
    const auto sq = mode_squares(n, g11, g22, g12);
    const double d = g11 * n.n1 - g22 * n.n2;
    const double r = std::sqrt(d * d + 4.0 * g12 * g12 * n.n1 * n.n2);
    const double d_over_r = r > 0.0 ? d / r : 0.0;
    const double cross = r > 0.0 ? 2.0 * g12 * n.n1 * n.n2 / r : 0.0;

    const double k = 2.5 * lhy_prefactor;
    const double wh = sq.hard > 0.0 ? k * std::pow(sq.hard, 1.5) : 0.0;
    const double ws = sq.soft > 0.0 ? k * std::pow(sq.soft, 1.5) : 0.0;
    ChiMatrix w;
    w.chi11 = wh * 0.5 * n.n1 * (1.0 + d_over_r) + ws * 0.5 * n.n1 * (1.0 - d_over_r);
    w.chi22 = wh * 0.5 * n.n2 * (1.0 - d_over_r) + ws * 0.5 * n.n2 * (1.0 + d_over_r);
    w.chi12 = (wh - ws) * cross;
    return w;
}

// Edge closure: Hessian of E_C with respect to density at frozen g' = g + chi.
inline ChiMatrix edge_hessian(const DensityPair& n, const MixtureParams& p, const ChiMatrix& chi) {
    return frozen_coupling_hessian(n, p.g11 + chi.chi11, p.g22 + chi.chi22, p.g12 + chi.chi12, true);
}

inline double max_abs(const ChiMatrix& c) {
    return std::max({std::abs(c.chi11), std::abs(c.chi12), std::abs(c.chi22)});
}

inline double dot(const ChiMatrix& a, const ChiMatrix& b) {
    return a.chi11 * b.chi11 + a.chi12 * b.chi12 + a.chi22 * b.chi22;
}

}  // namespace detail

/// E_C at one density with renormalised couplings g + chi.
inline double correlation_energy(const DensityPair& n, const MixtureParams& p, const ChiMatrix& chi) {
    return correlation_energy_from_speeds(sound_speeds(n, p, chi));
}

inline CorrelationTable solve_self_consistent(const MixtureParams& p, const DensityGrid& grid,
                                              const SelfConsistentOptions& opt = {}) {
    grid.validate();
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ValidationError("self-consistent: damping must lie in (0, 1]");
    if (!(opt.tol > 0.0)) throw ValidationError("self-consistent: tol must be positive");

    CorrelationTable t;
    t.grid1 = DensityGrid::linspace(grid.n1_min, grid.n1_max, grid.points1);
    t.grid2 = DensityGrid::linspace(grid.n2_min, grid.n2_max, grid.points2);
    const std::size_t m1 = grid.points1, m2 = grid.points2, total = m1 * m2;
    const double h1 = (grid.n1_max - grid.n1_min) / static_cast<double>(m1 - 1);
    const double h2 = (grid.n2_max - grid.n2_min) / static_cast<double>(m2 - 1);
    const detail::GridHessian hessian(m1, m2, h1, h2);
    const bool newton = opt.method == FixedPointMethod::newton;

    t.ec.assign(total, 0.0);
    std::vector<ChiMatrix> weights(newton ? total : 0);
    std::vector<ChiMatrix> update(total);
    std::vector<ChiMatrix> r(total);

    auto density = [&](std::size_t k) { return DensityPair{t.grid1[k / m2], t.grid2[k % m2]}; };
    auto interior = [&](std::size_t k) { return t.interior(k / m2, k % m2); };
    auto evaluate = [&] {
        parallel_for(total, opt.threads, [&](std::size_t k) {
            const auto n = density(k);
            t.ec[k] = correlation_energy(n, p, t.chi[k]);
            if (newton) weights[k] = detail::correlation_energy_gradient(n, p, t.chi[k]);
        });
    };

    t.chi.assign(total, ChiMatrix{});
    evaluate();
    while (t.iterations < opt.max_iter) {
        // r = H[E(chi)] - chi; edges use the frozen-coupling Hessian.
        parallel_for(total, opt.threads, [&](std::size_t k) {
            const auto h = interior(k) ? hessian.apply(t.ec, k / m2, k % m2) : detail::edge_hessian(density(k), p, t.chi[k]);
            r[k] = h + (-1.0) * t.chi[k];
        });

        if (newton) {
            // (I - sum_k w_k D_k) s = w . r on the interior; s = w . delta on the edges.
            using SpMat = Eigen::SparseMatrix<double>;
            std::vector<Eigen::Triplet<double>> triplets;
            triplets.reserve(total * 9);
            Eigen::VectorXd rhs(static_cast<Eigen::Index>(total));
            for (std::size_t k = 0; k < total; ++k) {
                const auto& w = weights[k];
                const auto row = static_cast<int>(k);
                if (!interior(k)) {
                    triplets.emplace_back(row, row, 1.0);
                    rhs[row] = detail::dot(w, r[k]);
                    continue;
                }
                hessian.for_each_tap(k / m2, k % m2, [&](std::size_t col, double c11, double c12, double c22) {
                    const double v = -(w.chi11 * c11 + w.chi12 * c12 + w.chi22 * c22);
                    triplets.emplace_back(row, static_cast<int>(col), col == k ? 1.0 + v : v);
                });
                rhs[row] = detail::dot(w, r[k]);
            }
            SpMat a(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
            a.setFromTriplets(triplets.begin(), triplets.end());
            Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
            lu.compute(a);
            if (lu.info() != Eigen::Success)
                throw IterationLimit("self-consistent: linearised update is singular", t.residual_history);
            const Eigen::VectorXd s = lu.solve(rhs);
            const std::vector<double> s_field(s.data(), s.data() + total);
            parallel_for(total, opt.threads, [&](std::size_t k) {
                update[k] = interior(k) ? opt.damping * (r[k] + hessian.apply(s_field, k / m2, k % m2))
                                        : opt.damping * r[k];
            });
        } else {
            for (std::size_t k = 0; k < total; ++k) update[k] = opt.damping * r[k];
        }

        double res = 0.0;
        for (std::size_t k = 0; k < total; ++k) {
            t.chi[k] = t.chi[k] + update[k];
            const double d = detail::max_abs(update[k]) / p.g11;
            res = std::isnan(d) ? d : std::max(res, d);
        }
        ++t.iterations;
        t.residual = res;
        t.residual_history.push_back(res);
        evaluate();
        if (!std::isfinite(res)) throw IterationLimit("self-consistent: iteration diverged", t.residual_history);
        if (res < opt.tol) {
            t.converged = true;
            break;
        }
    }
    if (opt.max_iter > 0 && !t.converged)
        throw IterationLimit("self-consistent: no convergence after " + std::to_string(opt.max_iter) +
                                 " iterations, residual " + csv::format_number(t.residual),
                             t.residual_history);

    const auto& hist = t.residual_history;
    for (std::size_t k = hist.size() > 10 ? hist.size() - 10 : 1; k < hist.size(); ++k)
        if (hist[k] > hist[k - 1]) t.residual_monotone_tail = false;

    for (std::size_t i = 1; i + 1 < m1; ++i)
        for (std::size_t j = 1; j + 1 < m2; ++j) {
            const DensityPair n{t.grid1[i], t.grid2[j]};
            const double soft = sound_speeds(n, p, t.chi_at(i, j)).soft_squared();
            if (soft < -opt.tol_soft_rel * p.g11 * (n.n1 + n.n2)) ++t.soft_mode_violations;
        }
    t.soft_mode_ok = t.soft_mode_violations == 0;
    return t;
}

/// Column units for table export; internal units use the length unit `l`.
struct TableUnits {
    std::string density = "[l^-3]";
    std::string energy_density = "[hbar^2/(m*l^5)]";
    std::string coupling = "[hbar^2*l/m]";
};

inline void write_table_csv(std::ostream& out, const CorrelationTable& t, const TableUnits& u = {}) {
    csv::write_header(out, {"n1" + u.density, "n2" + u.density, "ec" + u.energy_density, "chi11" + u.coupling,
                            "chi12" + u.coupling, "chi22" + u.coupling});
    for (std::size_t i = 0; i < t.size1(); ++i)
        for (std::size_t j = 0; j < t.size2(); ++j) {
            const auto& c = t.chi_at(i, j);
            csv::write_row(out, {t.grid1[i], t.grid2[j], t.ec_at(i, j), c.chi11, c.chi12, c.chi22});
        }
}

}  // namespace droplet_dft
