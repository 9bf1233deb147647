#pragma once

// JSON run configurations for the droplet-dft tool. A configuration is
//
//   { "command": "...", "params": {...}, "output_path": "...",
//     "reference_data_path": "...", "reference_x_scale": 1, "reference_y_scale": 1 }
//
// where only "params" is required. Lengths are given in Bohr radii and
// densities carry an explicit unit. Results are produced as in-memory CSV
// text so that nothing is written unless the whole run succeeds.

#include <nlohmann/json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "droplet_dft/binary_mixture.hpp"
#include "droplet_dft/csv.hpp"
#include "droplet_dft/dipolar.hpp"
#include "droplet_dft/droplet_profile.hpp"
#include "droplet_dft/errors.hpp"
#include "droplet_dft/parallel.hpp"
#include "droplet_dft/reference_data.hpp"
#include "droplet_dft/self_consistent.hpp"
#include "droplet_dft/units.hpp"

namespace droplet_dft::cli {

using json = nlohmann::json;

enum ExitCode : int { ok = 0, io_error = 1, validation = 2, non_convergence = 3, unstable = 4 };

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"eos",      "speeds",    "selfconsistent", "gprime",
                                                "depletion", "spectrum", "stability",      "profile"};
    return names;
}

/// Keyed access to a JSON object that rejects unknown and non-finite entries.
class Params {
public:
    Params(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError("'" + path_ + "' must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_number()) throw ValidationError("'" + name(key) + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError("'" + name(key) + "' must be finite");
        return x;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    double positive(const std::string& key) {
        const double x = number(key);
        if (!(x > 0.0)) throw ValidationError("'" + name(key) + "' must be positive");
        return x;
    }
    double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : fallback; }

    std::size_t count(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 1)
            throw ValidationError("'" + name(key) + "' must be a positive integer");
        return static_cast<std::size_t>(v.get<long long>());
    }
    std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : fallback; }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_string()) throw ValidationError("'" + name(key) + "' must be a string");
        return v.get<std::string>();
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_boolean()) throw ValidationError("'" + name(key) + "' must be true or false");
        return v.get<bool>();
    }

    Params object(const std::string& key) { return Params(at(key), name(key)); }

    const json& raw(const std::string& key) { return at(key); }

    /// Every key must have been read.
    void finish() const {
        for (const auto& item : j_.items())
            if (!used_.count(item.key())) throw ValidationError("unknown key '" + name(item.key()) + "'");
    }

    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& at(const std::string& key) {
        if (!j_.contains(key)) throw ValidationError("missing key '" + name(key) + "'");
        used_.insert(key);
        return j_.at(key);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

/// Physical density of one unit tag in m^-3; "internal" means the length unit cubed.
inline double density_unit_si(const std::string& unit, double length_unit_m, const std::string& key) {
    if (unit == "m^-3") return 1.0;
    if (unit == "cm^-3") return 1e6;
    if (unit == "um^-3") return 1e18;
    if (unit == "internal") return 1.0 / (length_unit_m * length_unit_m * length_unit_m);
    throw ValidationError("'" + key + "': unknown density unit '" + unit + "' (m^-3, cm^-3, um^-3, internal)");
}

struct RunContext {
    PhysicalConstants constants = PhysicalConstants::codata2018();
    unsigned threads = 0;
    std::optional<ReferenceDataset> reference;
};

struct RunOutput {
    std::string csv;
    std::optional<std::string> reference_csv;
    json meta = json::object();
};

namespace detail {

// Uniform or logarithmic range {min, max, points, spacing}.
inline std::vector<double> range(Params p, double scale = 1.0) {
    const double lo = p.number("min");
    const double hi = p.number("max");
    const std::size_t n = p.count("points");
    const std::string spacing = p.text("spacing", "linear");
    p.finish();
    if (n > 1 && !(hi > lo)) throw ValidationError("'" + p.name("max") + "' must exceed min");
    std::vector<double> v(n);
    if (spacing == "linear") {
        for (std::size_t i = 0; i < n; ++i)
            v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    } else if (spacing == "log") {
        if (!(lo > 0.0)) throw ValidationError("'" + p.name("min") + "' must be positive for log spacing");
        for (std::size_t i = 0; i < n; ++i)
            v[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    } else {
        throw ValidationError("'" + p.name("spacing") + "' must be linear or log");
    }
    for (double& x : v) x *= scale;
    return v;
}

// Density range with a "unit" key, converted to internal units.
inline std::vector<double> density_range(Params p, double length_unit_m) {
    const std::string unit = p.text("unit", "internal");
    const double scale = density_unit_si(unit, length_unit_m, p.name("unit")) * std::pow(length_unit_m, 3);
    auto v = range(p, scale);
    for (double x : v)
        if (!(x > 0.0)) throw ValidationError("'" + p.name("min") + "': densities must be positive");
    return v;
}

inline double density_value(Params p, double length_unit_m) {
    const double value = p.positive("value");
    const std::string unit = p.text("unit", "internal");
    const double scale = density_unit_si(unit, length_unit_m, p.name("unit")) * std::pow(length_unit_m, 3);
    p.finish();
    return value * scale;
}

struct DipolarSetup {
    DipolarParams params;
    double length_unit_m;
};

// a_bohr plus either eps_dd or {mass_u, moment_bohr_magnetons}; internal length unit is a.
inline DipolarSetup dipolar_setup(Params& p, const PhysicalConstants& c) {
    const double a_bohr = p.positive("a_bohr");
    const double a_m = a_bohr * c.bohr_radius;
    double eps = 0.0;
    if (p.has("eps_dd") == p.has("dipole"))
        throw ValidationError("'params': give exactly one of 'eps_dd' or 'dipole'");
    if (p.has("eps_dd")) {
        eps = p.number("eps_dd");
        if (eps < 0.0) throw ValidationError("'params.eps_dd' must be non-negative");
    } else {
        auto d = p.object("dipole");
        const double mass = d.positive("mass_u", isotopes::dy162_mass_u) * c.atomic_mass_unit;
        const double moment = d.positive("moment_bohr_magnetons", isotopes::dy162_moment_bohr_magnetons) * c.bohr_magneton;
        d.finish();
        eps = epsilon_dd_from_dipole(mass, moment, a_m, c);
    }
    return {DipolarParams(1.0, eps), a_m};
}

inline double to_per_um3(double n_internal, double length_unit_m) {
    return n_internal / std::pow(length_unit_m, 3) * 1e-18;
}

template <class Model>
std::string reference_csv(const ReferenceDataset& ref, const std::string& x_col, const std::string& y_col,
                          Model model) {
    std::ostringstream out;
    csv::write_header(out, {x_col, y_col + "_ref", y_col + "_model"});
    for (const auto& row : ref.rows) csv::write_row(out, {row.x, row.y, model(row.x)});
    return out.str();
}

inline void require_no_reference(const RunContext& ctx, const std::string& command) {
    if (ctx.reference) throw ValidationError("command '" + command + "' does not take reference data");
}

// ---------------------------------------------------------------- commands

inline RunOutput run_eos(Params p, const RunContext& ctx) {
    const double a11_bohr = p.positive("a11_bohr");
    const double a12_bohr = p.number("a12_bohr");
    const double length = a11_bohr * ctx.constants.bohr_radius;
    const auto densities = density_range(p.object("density"), length);
    p.finish();
    const double a12 = a12_bohr / a11_bohr;
    const auto coeff = eos_coefficients(1.0, a12);

    RunOutput out;
    std::ostringstream csv_out;
    csv::write_header(csv_out, {"n[a11^-3]", "n[um^-3]", "E_per_N[hbar^2/(m*a11^2)]"});
    for (double n : densities) csv::write_row(csv_out, {n, to_per_um3(n, length), coeff.energy_per_particle(n)});
    out.csv = csv_out.str();
    out.meta["A[hbar^2*a11/m]"] = coeff.a;
    out.meta["B[hbar^2*a11^(5/2)/m]"] = coeff.b;
    if (a12 < -1.0) {
        const double n_eq = equilibrium_density(1.0, a12);
        out.meta["n_eq[a11^-3]"] = n_eq;
        out.meta["E_per_N_eq[hbar^2/(m*a11^2)]"] = coeff.energy_per_particle(n_eq);
    }
    if (ctx.reference)
        out.reference_csv = reference_csv(*ctx.reference, "n[a11^-3]", "E_per_N[hbar^2/(m*a11^2)]",
                                          [&](double n) { return coeff.energy_per_particle(n); });
    return out;
}

inline RunOutput run_speeds(Params p, const RunContext& ctx) {
    require_no_reference(ctx, "speeds");
    const double a11_bohr = p.positive("a11_bohr");
    const double a22 = p.positive("a22_bohr") / a11_bohr;
    const double a12 = p.number("a12_bohr") / a11_bohr;
    const double length = a11_bohr * ctx.constants.bohr_radius;
    const auto mixture = MixtureParams::from_scattering_lengths(1.0, a22, a12);
    auto dens = p.object("densities");
    const std::string unit = dens.text("unit", "internal");
    const double scale = density_unit_si(unit, length, dens.name("unit")) * std::pow(length, 3);
    const json& pairs = dens.raw("pairs");
    dens.finish();
    ChiMatrix chi;
    if (p.has("chi")) {
        auto c = p.object("chi");
        chi = {c.number("chi11", 0.0), c.number("chi12", 0.0), c.number("chi22", 0.0)};
        c.finish();
    }
    p.finish();
    if (!pairs.is_array()) throw ValidationError("'params.densities.pairs' must be an array of [n1, n2]");

    std::ostringstream csv_out;
    csv::write_header(csv_out, {"n1[a11^-3]", "n2[a11^-3]", "c_hard[hbar/(m*a11)]", "c_soft[hbar/(m*a11)]",
                                "soft_real[1]", "ec[hbar^2/(m*a11^5)]", "ec_dilute[hbar^2/(m*a11^5)]"});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& pr = pairs[i];
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number())
            throw ValidationError("'params.densities.pairs[" + std::to_string(i) + "]' must be [n1, n2]");
        const DensityPair n{pr[0].get<double>() * scale, pr[1].get<double>() * scale};
        if (!(n.n1 >= 0.0) || !(n.n2 >= 0.0) || !std::isfinite(n.n1) || !std::isfinite(n.n2))
            throw ValidationError("'params.densities.pairs[" + std::to_string(i) + "]' must be non-negative");
        const auto s = sound_speeds(n, mixture, chi);
        csv::write_row(csv_out, {n.n1, n.n2, s.c_hard, s.c_soft, s.soft_mode_real ? 1.0 : 0.0,
                                 correlation_energy_from_speeds(s), lhy_dilute(n, mixture)});
    }
    RunOutput out;
    out.csv = csv_out.str();
    return out;
}

inline RunOutput run_selfconsistent(Params p, const RunContext& ctx) {
    require_no_reference(ctx, "selfconsistent");
    const double a11_bohr = p.positive("a11_bohr");
    const double a22 = p.positive("a22_bohr") / a11_bohr;
    const double a12 = p.number("a12_bohr") / a11_bohr;
    const double length = a11_bohr * ctx.constants.bohr_radius;
    const auto mixture = MixtureParams::from_scattering_lengths(1.0, a22, a12);

    DensityGrid grid;
    auto g = p.object("grid");
    if (g.flag("droplet_default", false)) {
        grid = DensityGrid::droplet_default(1.0, a12, g.count("points", 201));
    } else {
        const std::string unit = g.text("unit", "internal");
        const double scale = density_unit_si(unit, length, g.name("unit")) * std::pow(length, 3);
        auto axis = [&](const char* key, double& lo, double& hi, std::size_t& pts) {
            auto ax = g.object(key);
            lo = ax.positive("min") * scale;
            hi = ax.positive("max") * scale;
            pts = ax.count("points");
            ax.finish();
        };
        axis("n1", grid.n1_min, grid.n1_max, grid.points1);
        axis("n2", grid.n2_min, grid.n2_max, grid.points2);
    }
    g.finish();

    SelfConsistentOptions opt;
    const std::string method = p.text("method", "newton");
    if (method == "newton") opt.method = FixedPointMethod::newton;
    else if (method == "picard") opt.method = FixedPointMethod::picard;
    else throw ValidationError("'params.method' must be newton or picard");
    opt.damping = p.positive("damping", opt.method == FixedPointMethod::picard ? 0.5 : 1.0);
    opt.tol = p.positive("tol", opt.tol);
    opt.tol_soft_rel = p.positive("tol_soft_rel", opt.tol_soft_rel);
    opt.max_iter = p.has("max_iter") ? (p.raw("max_iter") == 0 ? 0 : p.count("max_iter")) : opt.max_iter;
    p.finish();
    opt.threads = ctx.threads;

    const auto table = solve_self_consistent(mixture, grid, opt);
    RunOutput out;
    std::ostringstream csv_out;
    write_table_csv(csv_out, table, {"[a11^-3]", "[hbar^2/(m*a11^5)]", "[hbar^2*a11/m]"});
    out.csv = csv_out.str();
    out.meta["converged"] = table.converged;
    out.meta["iterations"] = table.iterations;
    out.meta["residual"] = table.residual;
    out.meta["residual_history"] = table.residual_history;
    out.meta["soft_mode_ok"] = table.soft_mode_ok;
    out.meta["soft_mode_violations"] = table.soft_mode_violations;
    out.meta["residual_monotone_tail"] = table.residual_monotone_tail;
    return out;
}

inline RunOutput run_gprime(Params p, const RunContext& ctx) {
    require_no_reference(ctx, "gprime");
    const auto setup = dipolar_setup(p, ctx.constants);
    const auto densities = density_range(p.object("density"), setup.length_unit_m);
    const double tol = p.positive("tol", 1e-12);
    p.finish();

    std::vector<std::optional<SelfConsistentCoupling>> rows(densities.size());
    parallel_for(densities.size(), ctx.threads, [&](std::size_t i) {
        try {
            rows[i] = solve_g_prime(densities[i], setup.params, tol);
        } catch (const NoStableSolution&) {
        }
    });
    std::ostringstream csv_out;
    csv::write_header(csv_out, {"n[a^-3]", "n[um^-3]", "stable[1]", "g_prime[hbar^2*a/m]", "eps_dd_prime[1]",
                                "a_prime[a]", "chi[hbar^2*a/m]", "residual[1]"});
    std::size_t unstable_rows = 0;
    const double nan = std::nan("");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double n = densities[i];
        if (const auto& r = rows[i]) {
            csv::write_row(csv_out, {n, to_per_um3(n, setup.length_unit_m), 1.0, r->g_prime, r->eps_dd_prime,
                                     r->a_prime, r->chi, r->residual});
        } else {
            ++unstable_rows;
            csv::write_row(csv_out, {n, to_per_um3(n, setup.length_unit_m), 0.0, nan, nan, nan, nan, nan});
        }
    }
    RunOutput out;
    out.csv = csv_out.str();
    out.meta["eps_dd"] = setup.params.eps_dd;
    out.meta["unstable_rows"] = unstable_rows;
    out.meta["n_critical[a^-3]"] = stability_boundary(setup.params.eps_dd);
    return out;
}

inline RunOutput run_depletion(Params p, const RunContext& ctx) {
    const auto setup = dipolar_setup(p, ctx.constants);
    const auto densities = density_range(p.object("density"), setup.length_unit_m);
    p.finish();

    struct Row {
        Depletion bogoliubov;
        std::optional<Depletion> corrected;
    };
    std::vector<Row> rows(densities.size());
    parallel_for(densities.size(), ctx.threads, [&](std::size_t i) {
        rows[i].bogoliubov = depletion(densities[i], setup.params, DepletionMode::bogoliubov);
        try {
            rows[i].corrected = depletion(densities[i], setup.params, DepletionMode::corrected);
        } catch (const NoStableSolution&) {
        }
    });
    std::ostringstream csv_out;
    csv::write_header(csv_out, {"n[a^-3]", "n[um^-3]", "bogoliubov_re[1]", "bogoliubov_im[1]", "stable[1]",
                                "corrected[1]"});
    std::size_t unstable_rows = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.corrected) ++unstable_rows;
        csv::write_row(csv_out, {densities[i], to_per_um3(densities[i], setup.length_unit_m), r.bogoliubov.fraction,
                                 r.bogoliubov.imag, r.corrected ? 1.0 : 0.0,
                                 r.corrected ? r.corrected->fraction : std::nan("")});
    }
    RunOutput out;
    out.csv = csv_out.str();
    out.meta["eps_dd"] = setup.params.eps_dd;
    out.meta["unstable_rows"] = unstable_rows;
    out.meta["n_critical[a^-3]"] = stability_boundary(setup.params.eps_dd);
    if (ctx.reference)
        out.reference_csv = reference_csv(*ctx.reference, "n[a^-3]", "depletion[1]", [&](double n) {
            try {
                return depletion(n, setup.params, DepletionMode::corrected).fraction;
            } catch (const NoStableSolution&) {
                return std::nan("");
            }
        });
    return out;
}

inline RunOutput run_spectrum(Params p, const RunContext& ctx) {
    require_no_reference(ctx, "spectrum");
    const auto setup = dipolar_setup(p, ctx.constants);
    const double n = density_value(p.object("density"), setup.length_unit_m);
    const auto ks = range(p.object("k"));
    const auto phis = range(p.object("phi"));
    const std::string mode_name = p.text("mode", "renormalized");
    p.finish();
    SpectrumMode mode;
    if (mode_name == "bogoliubov") mode = SpectrumMode::bogoliubov;
    else if (mode_name == "renormalized") mode = SpectrumMode::renormalized;
    else throw ValidationError("'params.mode' must be bogoliubov or renormalized");
    for (double k : ks)
        if (k < 0.0) throw ValidationError("'params.k': wavenumbers must be non-negative");

    std::ostringstream csv_out;
    csv::write_header(csv_out, {"k[a^-1]", "phi_k[rad]", "energy[hbar^2/(m*a^2)]", "is_real[1]"});
    std::size_t imaginary = 0;
    for (double phi : phis)
        for (double k : ks) {
            const auto s = spectrum(k, phi, n, setup.params, mode);
            if (!s.is_real) ++imaginary;
            csv::write_row(csv_out, {s.k, s.phi_k, s.energy, s.is_real ? 1.0 : 0.0});
        }
    RunOutput out;
    out.csv = csv_out.str();
    out.meta["eps_dd"] = setup.params.eps_dd;
    out.meta["imaginary_points"] = imaginary;
    return out;
}

inline RunOutput run_stability(Params p, const RunContext& ctx) {
    require_no_reference(ctx, "stability");
    const auto eps = range(p.object("eps_dd"));
    const double tol = p.positive("tol", 1e-10);
    const double a_bohr = p.positive("a_bohr", 0.0);  // 0: no physical column
    p.finish();
    for (double e : eps)
        if (e < 0.0) throw ValidationError("'params.eps_dd': values must be non-negative");

    const auto diagram = stability_diagram(eps, 1.0, tol, ctx.threads);
    std::ostringstream csv_out;
    std::vector<std::string> header{"eps_dd[1]", "n_critical[a^-3]"};
    if (a_bohr > 0.0) header.emplace_back("n_critical[um^-3]");
    csv::write_header(csv_out, header);
    for (const auto& pt : diagram) {
        std::vector<double> row{pt.eps_dd, pt.n_critical};
        if (a_bohr > 0.0) row.push_back(to_per_um3(pt.n_critical, a_bohr * ctx.constants.bohr_radius));
        csv::write_row(csv_out, row);
    }
    RunOutput out;
    out.csv = csv_out.str();
    return out;
}

inline RunOutput run_profile(Params p, const RunContext& ctx) {
    require_no_reference(ctx, "profile");
    const double a11_bohr = p.positive("a11_bohr");
    const double a12 = p.number("a12_bohr") / a11_bohr;
    const double atom_number = p.positive("atom_number");
    const std::string functional = p.text("functional", "dilute");

    ProfileGrid grid;
    if (p.has("grid")) {
        auto g = p.object("grid");
        if (g.has("r_max") || g.has("n_points")) {
            grid = {g.positive("r_max"), g.count("n_points")};
        } else {
            grid = ProfileGrid::for_droplet(atom_number, 1.0, a12, g.positive("points_per_healing", 8.0));
        }
        g.finish();
    } else {
        grid = ProfileGrid::for_droplet(atom_number, 1.0, a12);
    }
    RelaxOptions opt;
    opt.step = p.positive("step", 0.0);
    opt.tol = p.positive("tol", opt.tol);
    opt.max_steps = p.count("max_steps", opt.max_steps);
    const std::size_t table_points = p.count("table_points", 65);
    p.finish();

    const double n_eq = equilibrium_density(1.0, a12);
    const DiluteFunctional dilute(1.0, a12);
    const double mu_eq = dilute.potential(n_eq);
    const double radius = std::cbrt(3.0 * atom_number / (4.0 * std::numbers::pi * n_eq));

    DensityProfile prof;
    RunOutput out;
    if (functional == "dilute") {
        prof = relax(atom_number, dilute, mu_eq, grid, opt, nullptr, radius);
    } else if (functional == "tabulated") {
        const auto mixture = MixtureParams::from_scattering_lengths(1.0, 1.0, a12);
        SelfConsistentOptions sc;
        sc.threads = ctx.threads;
        const auto table = solve_self_consistent(mixture, DensityGrid::droplet_default(1.0, a12, table_points), sc);
        prof = relax(atom_number, TabulatedFunctional(table, mixture), mu_eq, grid, opt, nullptr, radius);
        const auto reference = relax(atom_number, dilute, mu_eq, grid, opt, nullptr, radius);
        out.meta["E_dilute[hbar^2/(m*a11^2)]"] = reference.E;
        out.meta["E_difference_rel"] = (prof.E - reference.E) / std::abs(reference.E);
    } else {
        throw ValidationError("'params.functional' must be dilute or tabulated");
    }

    std::ostringstream csv_out;
    write_profile_csv(csv_out, prof, "[a11]", "[a11^-3]");
    out.csv = csv_out.str();
    out.meta["N"] = prof.N;
    out.meta["mu[hbar^2/(m*a11^2)]"] = prof.mu;
    out.meta["E[hbar^2/(m*a11^2)]"] = prof.E;
    out.meta["E_kinetic[hbar^2/(m*a11^2)]"] = prof.E_kinetic;
    out.meta["E_interaction[hbar^2/(m*a11^2)]"] = prof.E_interaction;
    out.meta["self_bound"] = prof.self_bound;
    out.meta["converged"] = prof.converged;
    out.meta["residual"] = prof.residual;
    out.meta["iterations"] = prof.iterations;
    out.meta["n_eq[a11^-3]"] = n_eq;
    out.meta["grid"] = {{"r_max[a11]", grid.r_max}, {"n_points", grid.n_points}};
    return out;
}

}  // namespace detail

/// Dispatches one command. Throws the library error types; see exit_code().
inline RunOutput run(const std::string& command, const json& config, const RunContext& ctx = {}) {
    if (!config.is_object()) throw ValidationError("configuration must be a JSON object");
    if (config.contains("command")) {
        if (!config["command"].is_string() || config["command"].get<std::string>() != command)
            throw ValidationError("'command' in the configuration does not match '" + command + "'");
    }
    static const std::set<std::string> top{"command", "params", "output_path", "reference_data_path",
                                           "reference_x_scale", "reference_y_scale"};
    for (const auto& item : config.items())
        if (!top.count(item.key())) throw ValidationError("unknown key '" + item.key() + "'");
    if (!config.contains("params")) throw ValidationError("missing key 'params'");
    Params p(config["params"], "params");

    RunOutput out;
    if (command == "eos") out = detail::run_eos(std::move(p), ctx);
    else if (command == "speeds") out = detail::run_speeds(std::move(p), ctx);
    else if (command == "selfconsistent") out = detail::run_selfconsistent(std::move(p), ctx);
    else if (command == "gprime") out = detail::run_gprime(std::move(p), ctx);
    else if (command == "depletion") out = detail::run_depletion(std::move(p), ctx);
    else if (command == "spectrum") out = detail::run_spectrum(std::move(p), ctx);
    else if (command == "stability") out = detail::run_stability(std::move(p), ctx);
    else if (command == "profile") out = detail::run_profile(std::move(p), ctx);
    else throw ValidationError("unknown command '" + command + "'");

    out.meta["command"] = command;
    out.meta["config"] = config;
    return out;
}

/// Exit status for an exception escaping run().
inline int exit_code(const std::exception& e) {
    if (dynamic_cast<const NoStableSolution*>(&e)) return unstable;
    if (dynamic_cast<const IterationLimit*>(&e)) return non_convergence;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const json::exception*>(&e))
        return validation;
    return io_error;
}

}  // namespace droplet_dft::cli
