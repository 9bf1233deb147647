#pragma once

// Internal units: hbar = m = 1 and a chosen length unit (usually a11 or a).
// Physical units only enter at the command-line boundary.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include "droplet_dft/errors.hpp"

namespace droplet_dft {

struct PhysicalConstants {
    double hbar;                 // J s
    double bohr_radius;          // m
    double atomic_mass_unit;     // kg
    double vacuum_permeability;  // N A^-2
    double bohr_magneton;        // J T^-1

    /// CODATA 2018 values; must match data/constants.txt.
    static constexpr PhysicalConstants codata2018() {
        return {1.054571817e-34, 5.29177210903e-11, 1.66053906660e-27, 1.25663706212e-6,
                9.2740100783e-24};
    }
};

/// Parses `key = value` lines with `#` comments. All five keys are required.
inline PhysicalConstants parse_constants(std::istream& in) {
    std::map<std::string, double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        auto blank = line.find_first_not_of(" \t\r");
        if (blank == std::string::npos) continue;
        if (eq == std::string::npos) throw ParseError("constants: expected key = value", lineno);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(val, &used);
        } catch (const std::exception&) {
            throw ParseError("constants: non-numeric value for '" + key + "'", lineno);
        }
        if (used != val.size()) throw ParseError("constants: trailing characters for '" + key + "'", lineno);
        if (!(v > 0.0) || !std::isfinite(v)) throw ParseError("constants: '" + key + "' must be positive", lineno);
        values[key] = v;
    }
    auto get = [&](const char* key) {
        auto it = values.find(key);
        if (it == values.end()) throw ValidationError(std::string("constants: missing key '") + key + "'");
        return it->second;
    };
    return {get("hbar"), get("bohr_radius"), get("atomic_mass_unit"), get("vacuum_permeability"),
            get("bohr_magneton")};
}

inline PhysicalConstants load_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open constants file '" + path + "'");
    return parse_constants(in);
}

enum class UnitTag { length, density, energy, wavenumber, speed };

inline UnitTag parse_unit_tag(std::string_view name) {
    if (name == "length") return UnitTag::length;
    if (name == "density") return UnitTag::density;
    if (name == "energy") return UnitTag::energy;
    if (name == "wavenumber") return UnitTag::wavenumber;
    if (name == "speed") return UnitTag::speed;
    throw ValidationError("unknown unit tag '" + std::string(name) + "'");
}

/// SI scale of one internal unit for each quantity kind.
class UnitSystem {
public:
    UnitSystem(double length_unit, double mass_unit,
               const PhysicalConstants& c = PhysicalConstants::codata2018())
        : length_(length_unit), mass_(mass_unit), hbar_(c.hbar) {
        if (!(length_unit > 0.0) || !(mass_unit > 0.0))
            throw DomainError("unit system: length and mass units must be positive");
        energy_ = hbar_ * hbar_ / (mass_ * length_ * length_);
    }

    /// Length unit = `a_bohr` Bohr radii, mass = `mass_u` atomic mass units.
    static UnitSystem atomic(double a_bohr, double mass_u,
                             const PhysicalConstants& c = PhysicalConstants::codata2018()) {
        return UnitSystem(a_bohr * c.bohr_radius, mass_u * c.atomic_mass_unit, c);
    }

    double length_unit() const noexcept { return length_; }
    double mass_unit() const noexcept { return mass_; }
    double energy_unit() const noexcept { return energy_; }
    double density_unit() const noexcept { return 1.0 / (length_ * length_ * length_); }
    double wavenumber_unit() const noexcept { return 1.0 / length_; }
    double speed_unit() const noexcept { return hbar_ / (mass_ * length_); }
    double hbar() const noexcept { return hbar_; }

    double scale(UnitTag tag) const noexcept {
        switch (tag) {
            case UnitTag::length: return length_unit();
            case UnitTag::density: return density_unit();
            case UnitTag::energy: return energy_unit();
            case UnitTag::wavenumber: return wavenumber_unit();
            case UnitTag::speed: return speed_unit();
        }
        return 1.0;
    }

private:
    double length_;
    double mass_;
    double hbar_;
    double energy_;
};

/// SI value -> internal units.
inline double to_internal(double value, UnitTag tag, const UnitSystem& u) { return value / u.scale(tag); }
inline double to_internal(double value, std::string_view tag, const UnitSystem& u) {
    return to_internal(value, parse_unit_tag(tag), u);
}

/// Internal units -> SI value.
inline double from_internal(double value, UnitTag tag, const UnitSystem& u) { return value * u.scale(tag); }
inline double from_internal(double value, std::string_view tag, const UnitSystem& u) {
    return from_internal(value, parse_unit_tag(tag), u);
}

/// eps_dd = a_dd / a with a_dd = mu0 mu^2 m / (12 pi hbar^2). All arguments SI.
inline double epsilon_dd_from_dipole(double mass, double dipole_moment, double a,
                                     const PhysicalConstants& c = PhysicalConstants::codata2018()) {
    if (!(a > 0.0)) throw DomainError("epsilon_dd: scattering length must be positive");
    const double a_dd = c.vacuum_permeability * dipole_moment * dipole_moment * mass /
                        (12.0 * std::numbers::pi * c.hbar * c.hbar);
    return a_dd / a;
}

// Isotope defaults (configuration inputs; override from the command line config).
namespace isotopes {
inline constexpr double dy162_mass_u = 161.9268056;
inline constexpr double dy162_moment_bohr_magnetons = 9.93;
inline constexpr double k39_mass_u = 38.9637064864;
}  // namespace isotopes

}  // namespace droplet_dft
