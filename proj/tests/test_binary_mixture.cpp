#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "droplet_dft/binary_mixture.hpp"
#include "oracles.hpp"

using namespace droplet_dft;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(BinaryMixture, ParamsValidation) {
    EXPECT_THROW(MixtureParams(0.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(MixtureParams(1.0, -1.0, 0.0), DomainError);
    const auto p = MixtureParams::from_scattering_lengths(1.0, 2.0, -0.5);
    EXPECT_DOUBLE_EQ(p.g11, 4.0 * pi);
    EXPECT_DOUBLE_EQ(p.a22(), 2.0);
    EXPECT_DOUBLE_EQ(p.a12(), -0.5);
    EXPECT_TRUE(p.miscible());
    EXPECT_FALSE(MixtureParams::from_scattering_lengths(1.0, 1.0, -1.1).miscible());
}

TEST(BinaryMixture, SingleComponentSpeed) {
    const MixtureParams p(3.0, 2.0, 0.0);
    const auto s = sound_speeds({0.7, 0.0}, p);
    EXPECT_NEAR(s.c_hard, std::sqrt(3.0 * 0.7), 1e-15);
    EXPECT_DOUBLE_EQ(s.c_soft, 0.0);
    EXPECT_TRUE(s.soft_mode_real);
}

TEST(BinaryMixture, VacuumSpeeds) {
    const auto s = sound_speeds({0.0, 0.0}, MixtureParams(1.0, 1.0, 0.5));
    EXPECT_EQ(s.c_hard, 0.0);
    EXPECT_EQ(s.c_soft, 0.0);
    EXPECT_EQ(correlation_energy_from_speeds(s), 0.0);
}

TEST(BinaryMixture, SymmetricReduction) {
    const double g = 2.0, n = 0.3;
    for (double g12 : {-0.5, -1.5, -2.5}) {
        const auto s = sound_speeds({n, n}, MixtureParams(g, g, g12));
        EXPECT_NEAR(s.hard_squared(), n * (g + std::abs(g12)), 1e-14);
        EXPECT_NEAR(s.soft_squared(), n * (g - std::abs(g12)), 1e-14);
        EXPECT_EQ(s.soft_mode_real, std::abs(g12) <= g);
        EXPECT_GE(s.c_hard, s.c_soft);
    }
}

TEST(BinaryMixture, RenormalizedCouplingsShiftSpeeds) {
    const MixtureParams p(1.0, 1.0, -1.2);
    const DensityPair n{0.5, 0.5};
    EXPECT_FALSE(sound_speeds(n, p).soft_mode_real);
    EXPECT_TRUE(sound_speeds(n, p, {0.3, 0.0, 0.3}).soft_mode_real);
    EXPECT_THROW(sound_speeds({-1.0, 0.0}, p), DomainError);
}

TEST(BinaryMixture, SingleGasLhyDensity) {
    const double a = 0.37, n = 0.013;
    const MixtureParams p = MixtureParams::from_scattering_lengths(a, 1.0, 0.0);
    const double expected = 256.0 * std::sqrt(pi) / 15.0 * std::pow(a, 2.5) * std::pow(n, 2.5);
    EXPECT_NEAR(correlation_energy_from_speeds(sound_speeds({n, 0.0}, p)) / expected, 1.0, 1e-12);
    EXPECT_NEAR(lhy_dilute({n, 0.0}, p) / expected, 1.0, 1e-12);
}

TEST(BinaryMixture, BareCorrelationEnergyMatchesBothBranches) {
    for (double g12 : {0.5, -0.3, -0.99, -1.05}) {
        const MixtureParams p(1.0, 1.3, g12);
        for (DensityPair n : {DensityPair{1e-3, 2e-3}, DensityPair{0.4, 0.1}, DensityPair{1.0, 1.0}}) {
            const double ec = correlation_energy_from_speeds(sound_speeds(n, p));
            const double ref = oracle::lhy_two_branch(n.n1, n.n2, p.g11, p.g22, p.g12);
            EXPECT_NEAR(ec / ref, 1.0, 1e-12) << g12;
        }
    }
}

TEST(BinaryMixture, DiluteFormIsHardBranch) {
    const MixtureParams p(1.0, 1.3, -1.2);
    const DensityPair n{0.2, 0.3};
    const auto s = sound_speeds(n, p);
    const double hard = 8.0 / (15.0 * pi * pi) * std::pow(s.c_hard, 5);
    EXPECT_NEAR(lhy_dilute(n, p) / hard, 1.0, 1e-12);
    EXPECT_EQ(lhy_dilute({0.0, 0.0}, p), 0.0);
}

TEST(BinaryMixture, DiluteHomogeneity) {
    const MixtureParams p(1.0, 0.8, -0.9);
    const DensityPair n{0.02, 0.05};
    for (double lambda : {0.1, 3.0, 17.0}) {
        const double scaled = lhy_dilute({lambda * n.n1, lambda * n.n2}, p);
        EXPECT_NEAR(scaled / (std::pow(lambda, 2.5) * lhy_dilute(n, p)), 1.0, 1e-12);
        const auto c = chi_dilute({lambda * n.n1, lambda * n.n2}, p);
        const auto c0 = chi_dilute(n, p);
        EXPECT_NEAR(c.chi11 / (std::sqrt(lambda) * c0.chi11), 1.0, 1e-12);
        EXPECT_NEAR(c.chi12 / (std::sqrt(lambda) * c0.chi12), 1.0, 1e-12);
        EXPECT_NEAR(c.chi22 / (std::sqrt(lambda) * c0.chi22), 1.0, 1e-12);
    }
}

TEST(BinaryMixture, ChiDiluteMatchesFiniteDifferences) {
    for (double g12 : {0.5, -0.9, -1.1}) {
        const MixtureParams p(1.0, 1.2, g12);
        for (DensityPair n : {DensityPair{0.01, 0.02}, DensityPair{0.3, 0.05}}) {
            auto f = [&](double a, double b) { return lhy_dilute({a, b}, p); };
            const auto fd = oracle::fd_hessian(f, n.n1, n.n2, 1e-4);
            const auto c = chi_dilute(n, p);
            EXPECT_NEAR(c.chi11 / fd.h11, 1.0, 1e-5);
            EXPECT_NEAR(c.chi12 / fd.h12, 1.0, 1e-5);
            EXPECT_NEAR(c.chi22 / fd.h22, 1.0, 1e-5);
        }
    }
}

TEST(BinaryMixture, ChiDiluteSingularAtVacuum) {
    EXPECT_THROW(chi_dilute({0.0, 0.0}, MixtureParams(1.0, 1.0, 0.5)), DomainError);
}

TEST(BinaryMixture, MeanFieldEnergy) {
    const MixtureParams p(2.0, 3.0, -1.0);
    EXPECT_DOUBLE_EQ(mean_field_energy({1.0, 2.0}, p), 0.5 * (2.0 + 12.0) - 2.0);
}

TEST(BinaryMixture, EosReducesFromDiluteForm) {
    // n1 = n2 = n/2, g22 = g11: mean field plus lhy_dilute per particle.
    for (double a12 : {-1.05, -1.3}) {
        const auto p = MixtureParams::from_scattering_lengths(1.0, 1.0, a12);
        for (double n : {1e-6, 3e-4}) {
            const DensityPair half{0.5 * n, 0.5 * n};
            const double per_particle = (mean_field_energy(half, p) + lhy_dilute(half, p)) / n;
            EXPECT_NEAR(eos_symmetric(n, 1.0, a12) / per_particle, 1.0, 1e-12);
        }
    }
}

TEST(BinaryMixture, EosSpecialCases) {
    EXPECT_EQ(eos_symmetric(0.0, 1.0, -1.1), 0.0);
    const double n = 2e-5;
    const double expected = 32.0 * std::sqrt(2.0 * pi) / 15.0 * std::pow(2.0, 2.5) * std::pow(n, 1.5);
    EXPECT_NEAR(eos_symmetric(n, 1.0, -1.0) / expected, 1.0, 1e-13);
    EXPECT_THROW(eos_symmetric(1e-3, 1.0, 1.5), DomainError);
    EXPECT_THROW(eos_symmetric(-1.0, 1.0, -1.1), DomainError);
    EXPECT_THROW(eos_coefficients(0.0, -1.0), DomainError);
}

TEST(BinaryMixture, EquilibriumDensity) {
    for (double a12 : {-1.02, -1.1, -1.5}) {
        const double n_eq = equilibrium_density(1.0, a12);
        EXPECT_NEAR(n_eq / oracle::eos_minimum(1.0, a12), 1.0, 1e-8);
        EXPECT_LT(eos_symmetric(n_eq, 1.0, a12), 0.0);
    }
    EXPECT_LT(equilibrium_density(1.0, -1.0001), equilibrium_density(1.0, -1.01));
    EXPECT_THROW(equilibrium_density(1.0, -1.0), NoDroplet);
    EXPECT_THROW(equilibrium_density(1.0, 0.5), NoDroplet);
}

TEST(BinaryMixture, EquilibriumScalesWithLength) {
    // n_eq a11^3 depends only on a12 / a11.
    EXPECT_NEAR(equilibrium_density(2.0, -2.2) * 8.0 / equilibrium_density(1.0, -1.1), 1.0, 1e-12);
}
