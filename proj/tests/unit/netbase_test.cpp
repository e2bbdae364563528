#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "oracles.hpp"
#include "wppsc/errors.hpp"
#include "wppsc/netbase.hpp"

using namespace wppsc;

TEST(ImpedanceFromScr, PurelyResistiveUnit) {
    const Impedance z = impedance_from_scr_xr({1.0, 0.0});
    EXPECT_DOUBLE_EQ(z.r, 1.0);
    EXPECT_DOUBLE_EQ(z.x, 0.0);
}

TEST(ImpedanceFromScr, GridCasesMatchOracle) {
    struct Case {
        double scr, x_r, r, x, mag;
    };
    for (const Case& c : {Case{1.6, 5.0, 0.12257, 0.61287, 0.625},
                          Case{3.2, 14.8, 0.021067, 0.31179, 0.3125}}) {
        const Impedance z = impedance_from_scr_xr({c.scr, c.x_r});
        const auto ref = oracle::rl_from_scr(c.scr, c.x_r);
        EXPECT_NEAR(z.r, ref[0], 1e-14);
        EXPECT_NEAR(z.x, ref[1], 1e-14);
        // Reference values are quoted to five significant figures.
        EXPECT_NEAR(z.r, c.r, 1e-5);
        EXPECT_NEAR(z.x, c.x, 1e-5);
        EXPECT_NEAR(z.magnitude(), c.mag, 1e-14);
        EXPECT_NEAR(z.x_over_r(), c.x_r, 1e-12);
    }
}

TEST(ImpedanceFromScr, RejectsNonPositiveScr) {
    EXPECT_THROW(impedance_from_scr_xr({0.0, 5.0}), DomainError);
    EXPECT_THROW(impedance_from_scr_xr({-1.6, 5.0}), DomainError);
    EXPECT_THROW(impedance_from_scr_xr({std::numeric_limits<double>::infinity(), 5.0}),
                 DomainError);
}

TEST(ParallelMagnitude, Examples) {
    EXPECT_DOUBLE_EQ(parallel_magnitude(0.5, 0.5), 0.25);
    EXPECT_NEAR(parallel_magnitude(0.6, 0.3), 0.2, 1e-15);
    EXPECT_NEAR(parallel_magnitude(0.5, 1e9), 0.5, 1e-9);
}

TEST(ParallelMagnitude, RejectsNonPositive) {
    EXPECT_THROW(parallel_magnitude(0.0, 1.0), DomainError);
    EXPECT_THROW(parallel_magnitude(1.0, -0.1), DomainError);
}

TEST(ParallelMagnitude, SymmetricAndBelowSmallerBranch) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng), b = u(rng);
        EXPECT_DOUBLE_EQ(parallel_magnitude(a, b), parallel_magnitude(b, a));
        EXPECT_LT(parallel_magnitude(a, b), std::min(a, b));
    }
}

TEST(ParallelComplex, Examples) {
    auto expect = [](Impedance z, double r, double x) {
        EXPECT_NEAR(z.r, r, 1e-15);
        EXPECT_NEAR(z.x, x, 1e-15);
    };
    expect(parallel_complex({0.0, 0.5}, {0.0, 0.5}), 0.0, 0.25);
    expect(parallel_complex({1.0, 0.0}, {0.0, 1.0}), 0.5, 0.5);
    expect(parallel_complex({0.1, 0.5}, {0.1, 0.5}), 0.05, 0.25);
}

TEST(ParallelComplex, SingularCombination) {
    EXPECT_THROW(parallel_complex({0.0, 0.5}, {0.0, -0.5}), SingularCombination);
}

TEST(ParallelComplex, AgreesWithComplexArithmetic) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int k = 0; k < 200; ++k) {
        const std::complex<double> a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const std::complex<double> ref = a * b / (a + b);
        const Impedance z = parallel_complex(Impedance::from_complex(a), Impedance::from_complex(b));
        EXPECT_NEAR(z.r, ref.real(), 1e-13);
        EXPECT_NEAR(z.x, ref.imag(), 1e-13);
    }
}
