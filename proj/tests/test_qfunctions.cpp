#include <gtest/gtest.h>

#include <cmath>

#include "droplet_dft/qfunctions.hpp"
#include "oracles.hpp"

using namespace droplet_dft;

namespace {

// 30-digit values of the integral representation.
struct Frozen {
    double x, q5, q3;
};
constexpr Frozen frozen[] = {
    {0.25, 1.0957884976405025, 1.0184146733898506},
    {0.5, 1.3899258805456407, 1.0730804135125853},
    {0.9, 2.2897579618148911, 1.2394371096700844},
};

}  // namespace

TEST(QFunctions, FrozenValues) {
    for (const auto& f : frozen) {
        EXPECT_NEAR(q5(f.x).re, f.q5, 1e-14) << f.x;
        EXPECT_NEAR(q3(f.x).re, f.q3, 1e-14) << f.x;
        EXPECT_TRUE(q5(f.x).is_real());
    }
}

TEST(QFunctions, EndpointClosedForms) {
    EXPECT_DOUBLE_EQ(q5(0.0).re, 1.0);
    EXPECT_DOUBLE_EQ(q3(0.0).re, 1.0);
    EXPECT_NEAR(q5(1.0).re, std::pow(3.0, 2.5) / 6.0, 1e-12);
    EXPECT_NEAR(q3(1.0).re, std::pow(3.0, 1.5) / 4.0, 1e-12);
}

TEST(QFunctions, AgreesWithAdaptiveQuadrature) {
    for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        EXPECT_NEAR(q5(x).re, oracle::q_integral(5, x).real(), 1e-12) << x;
        EXPECT_NEAR(q3(x).re, oracle::q_integral(3, x).real(), 1e-12) << x;
    }
}

TEST(QFunctions, SmallArgumentBranchIsContinuous) {
    for (double x : {1e-9, 5e-7, 9.99e-7, 1e-6, 1.01e-6, 1e-5}) {
        EXPECT_NEAR(q5(x).re, oracle::q_integral(5, x).real(), 1e-13) << x;
        EXPECT_NEAR(q3(x).re, oracle::q_integral(3, x).real(), 1e-13) << x;
    }
}

TEST(QFunctions, PrincipalBranchAboveOne) {
    for (double x : {1.05, 1.3, 2.0, 3.0}) {
        const auto z5 = oracle::q_integral(5, x);
        const auto z3 = oracle::q_integral(3, x);
        EXPECT_NEAR(q5(x).re, z5.real(), 1e-11) << x;
        EXPECT_NEAR(q5(x).im, z5.imag(), 1e-11) << x;
        EXPECT_NEAR(q3(x).re, z3.real(), 1e-11) << x;
        EXPECT_NEAR(q3(x).im, z3.imag(), 1e-11) << x;
        EXPECT_GT(q5(x).im, 0.0);
        EXPECT_LT(q3(x).im, 0.0);
    }
    EXPECT_NEAR(q5(1.3).re, 3.7164116, 1e-7);
    EXPECT_NEAR(q5(1.3).im, 0.0067112, 1e-7);
    EXPECT_NEAR(q3(1.3).re, 1.5276010, 1e-7);
    EXPECT_NEAR(q3(1.3).im, -0.0268449, 1e-7);
}

TEST(QFunctions, OracleMatchesClosedForm) {
    for (int i = 0; i < 200; ++i) {
        const double x = i / 199.0;
        EXPECT_NEAR(qfunctions::q_oracle(5, x), q5(x).re, 1e-10);
        EXPECT_NEAR(qfunctions::q_oracle(3, x), q3(x).re, 1e-10);
    }
}

TEST(QFunctions, DomainErrors) {
    EXPECT_THROW(q5(-0.1), DomainError);
    EXPECT_THROW(q3(std::nan("")), DomainError);
    EXPECT_THROW(qfunctions::q_oracle(4, 0.5), DomainError);
    EXPECT_THROW(qfunctions::q_oracle(5, 1.5), DomainError);
}

TEST(QFunctions, MonotoneOnUnitInterval) {
    double prev5 = q5(0.0).re, prev3 = q3(0.0).re;
    for (int i = 1; i <= 100; ++i) {
        const double x = i / 100.0;
        EXPECT_GT(q5(x).re, prev5);
        EXPECT_GT(q3(x).re, prev3);
        prev5 = q5(x).re;
        prev3 = q3(x).re;
    }
}
