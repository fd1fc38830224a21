#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "softscat/specfun.hpp"
#include "softscat/testing/oracles.hpp"

namespace sf = softscat::specfun;
namespace oracle = softscat::oracle;

namespace {

const double kSamples[] = {0.5, 1.0, 4.0, 20.0, 100.0};

TEST(BesselJ, ValuesAtZero) {
    EXPECT_EQ(sf::bessel_j(0, 0.0), 1.0);
    EXPECT_EQ(sf::bessel_j(1, 0.0), 0.0);
    EXPECT_EQ(sf::bessel_j(-3, 0.0), 0.0);
}

TEST(BesselJ, J0AtOne) {
    // power-series oracle, summed in long double
    EXPECT_NEAR(oracle::bessel_j_series(0, 1.0), 0.765197686557967, 1e-15);
    EXPECT_NEAR(sf::bessel_j(0, 1.0), 0.765197686557967, 1e-12);
}

TEST(BesselJ, MatchesSeriesOracle) {
    // The long-double series is trustworthy while (t/2)^2 stays moderate.
    for (double t : {0.001, 0.3, 1.0, 2.0, 2.5, 5.0, 8.0, 12.0}) {
        for (int m = 0; m <= 40; ++m) {
            EXPECT_NEAR(sf::bessel_j(m, t), oracle::bessel_j_series(m, t), 1e-12) << "m=" << m << " t=" << t;
        }
    }
}

TEST(BesselJ, ReflectionParity) {
    for (double t : kSamples) {
        for (int m = 0; m <= 16; ++m) {
            const double sign = (m % 2) ? -1.0 : 1.0;
            EXPECT_EQ(sf::bessel_j(-m, t), sign * sf::bessel_j(m, t));
        }
    }
}

TEST(BesselJ, NegativeArgumentRejected) {
    EXPECT_THROW(sf::bessel_j(0, -1.0), std::domain_error);
    EXPECT_THROW(sf::bessel_j(0, std::nan("")), std::domain_error);
}

TEST(BesselY, LowOrdersAtOne) {
    EXPECT_NEAR(oracle::bessel_y0_series(1.0), 0.088256964215677, 1e-15);
    EXPECT_NEAR(oracle::bessel_y1_series(1.0), -0.781212821300289, 1e-15);
    EXPECT_NEAR(sf::bessel_y(0, 1.0), 0.088256964215677, 1e-12);
    EXPECT_NEAR(sf::bessel_y(1, 1.0), -0.781212821300289, 1e-12);
    EXPECT_NEAR(sf::bessel_y(2, 1.0), 2.0 * sf::bessel_y(1, 1.0) - sf::bessel_y(0, 1.0), 1e-14);
}

TEST(BesselY, MatchesLogSeriesOracle) {
    for (double t : {1e-3, 0.01, 0.2, 1.0, 3.0, 6.0, 9.0}) {
        EXPECT_NEAR(sf::bessel_y(0, t), oracle::bessel_y0_series(t), 1e-10) << t;
        EXPECT_NEAR(sf::bessel_y(1, t), oracle::bessel_y1_series(t), 1e-10 * std::max(1.0, std::abs(oracle::bessel_y1_series(t))))
            << t;
    }
}

TEST(BesselY, SingularAtZero) {
    EXPECT_THROW(sf::bessel_y(0, 0.0), std::domain_error);
    EXPECT_THROW(sf::hankel1(2, 0.0), std::domain_error);
    EXPECT_THROW(sf::hankel1_deriv(2, 0.0), std::domain_error);
}

TEST(Order, GuardRejectsLargeOrders) {
    EXPECT_NO_THROW(sf::bessel_j(64, 1.0));
    EXPECT_THROW(sf::bessel_j(65, 1.0), std::invalid_argument);
    EXPECT_THROW(sf::hankel1(-65, 1.0), std::invalid_argument);
}

TEST(Invariants, Wronskian) {
    for (double t : kSamples) {
        for (int m = 0; m <= 16; ++m) {
            const double j = sf::bessel_j(m, t);
            const double y = sf::bessel_y(m, t);
            const auto dh = sf::hankel1_deriv(m, t);
            const double w = j * dh.imag() - dh.real() * y;
            const double expect = 2.0 / (std::numbers::pi * t);
            EXPECT_NEAR(w / expect, 1.0, 1e-9) << "m=" << m << " t=" << t;
        }
    }
}

TEST(Invariants, ThreeTermRecurrence) {
    for (double t : kSamples) {
        for (int m = 1; m <= 16; ++m) {
            const double jn = (2.0 * m / t) * sf::bessel_j(m, t) - sf::bessel_j(m - 1, t);
            const double yn = (2.0 * m / t) * sf::bessel_y(m, t) - sf::bessel_y(m - 1, t);
            const double jr = sf::bessel_j(m + 1, t), yr = sf::bessel_y(m + 1, t);
            // relative where the value is not near a zero, absolute floor otherwise
            EXPECT_NEAR(jn, jr, 1e-9 * std::max(std::abs(jr), 1e-3)) << "J m=" << m << " t=" << t;
            EXPECT_NEAR(yn, yr, 1e-9 * std::max(std::abs(yr), 1e-3)) << "Y m=" << m << " t=" << t;
        }
    }
}

TEST(Invariants, LargeArgumentReference) {
    // frozen values from an arbitrary-precision evaluation
    struct Ref {
        int m;
        double t, j, y;
    };
    const Ref refs[] = {
        {0, 30, -0.086367983581040211, -0.11729573168666403},
        {1, 30, -0.11875106261662294, 0.084425570661747235},
        {7, 30, 0.14518518957232827, 0.027202118395205592},
        {30, 30, 0.14393585001030721, -0.24937439396697415},
        {0, 75, 0.034643913805097056, -0.08536904764777561},
        {1, 75, -0.085139995044829104, -0.035213785160580486},
        {7, 75, 0.069877916884678132, 0.060351914443739681},
        {30, 75, -0.017771347381650632, 0.094578355935160668},
        {64, 75, -0.12713058896533581, -0.0073314692710625545},
        {0, 150, -0.00077409037539429125, -0.065142221509037355},
        {1, 150, -0.06514516365772736, 0.00055695634956083998},
        {7, 150, 0.064435954968208054, 0.0098358786524885266},
        {30, 150, -0.0094074649928818193, -0.065139212079078124},
        {64, 150, 0.065897347715264459, -0.018712841740893111},
        {0, 200, -0.015437439930565092, -0.054265775249817911},
        {1, 200, -0.054304538182378223, 0.015301824580389989},
        {7, 200, 0.055762660213175077, -0.008692870092287339},
        {30, 200, -0.052122279029882832, -0.022422775512171563},
        {64, 200, -0.034059764963014577, 0.046900697548580261},
    };
    for (const auto& r : refs) {
        EXPECT_NEAR(sf::bessel_j(r.m, r.t), r.j, 1e-12) << "m=" << r.m << " t=" << r.t;
        EXPECT_NEAR(sf::bessel_y(r.m, r.t), r.y, 1e-11) << "m=" << r.m << " t=" << r.t;
    }
    EXPECT_NEAR(sf::bessel_j(64, 30.0) / 4.1750753524406153e-16, 1.0, 1e-10);
    EXPECT_NEAR(sf::bessel_y(64, 30.0) / -13486781885522.075, 1.0, 1e-10);
}

TEST(Hankel, CombinesJAndY) {
    const auto h = sf::hankel1(0, 1.0);
    EXPECT_NEAR(h.real(), 0.765197686557967, 1e-12);
    EXPECT_NEAR(h.imag(), 0.088256964215677, 1e-12);
    EXPECT_EQ(sf::hankel1(-1, 1.0), -sf::hankel1(1, 1.0));
    EXPECT_EQ(sf::hankel1(-4, 3.0), sf::hankel1(4, 3.0));
}

TEST(Hankel, DerivativeIdentities) {
    for (double t : {0.3, 1.0, 7.0}) EXPECT_EQ(sf::hankel1_deriv(0, t), -sf::hankel1(1, t));
    const auto d1 = sf::hankel1_deriv(1, 1.0);
    const auto expect = 0.5 * (sf::hankel1(0, 1.0) - sf::hankel1(2, 1.0));
    EXPECT_NEAR(std::abs(d1 - expect), 0.0, 1e-14);
}

TEST(Hankel, DerivativeMatchesCentralDifference) {
    const double h = 1e-5;
    for (int m : {0, 1, 3, 8, -5}) {
        for (double t : {0.8, 2.0, 20.0}) {
            const auto fd = (sf::hankel1(m, t + h) - sf::hankel1(m, t - h)) / (2.0 * h);
            const auto d = sf::hankel1_deriv(m, t);
            EXPECT_LT(std::abs(fd - d), 1e-6 * std::max(1.0, std::abs(d))) << "m=" << m << " t=" << t;
        }
    }
}

TEST(Hankel, ModulusDecaysLikeInverseSqrt) {
    // sqrt(pi t / 2) |H_0(t)| -> 1
    for (double t : {50.0, 100.0, 200.0}) {
        EXPECT_NEAR(std::sqrt(std::numbers::pi * t / 2.0) * std::abs(sf::hankel1(0, t)), 1.0, 5e-3) << t;
    }
}

TEST(Hankel, SequenceAgreesWithPointwise) {
    const auto seq = sf::hankel1_sequence(20, 3.5);
    // Miller's start index depends on the top order, so agreement is to rounding.
    for (int m = 0; m <= 20; ++m) {
        const auto h = sf::hankel1(m, 3.5);
        EXPECT_LT(std::abs(seq[static_cast<size_t>(m)] - h), 1e-13 * std::abs(h)) << m;
    }
}

}  // namespace
