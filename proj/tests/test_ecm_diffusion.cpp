#include "oracles.hpp"

#include "mcdds/ecm_diffusion.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mcdds;
using namespace mcdds::ecm;

TEST(Erfc, MatchesTheWidePrecisionOracle) {
    for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 2.49, 2.5, 3.0, 5.0, 8.0, 10.0}) {
        EXPECT_NEAR(ecm::erfc(x), oracle::erfc_wide(x), 1e-12) << "x=" << x;
    }
}

TEST(Erfc, RelativeAccuracyInTheTail) {
    for (double x : {3.0, 5.0, 10.0, 20.0, 26.0}) {
        const double want = oracle::erfc_wide(x);
        EXPECT_NEAR(ecm::erfc(x) / want, 1.0, 1e-13) << "x=" << x;
    }
}

TEST(Erfc, ReflectionAndLimits) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(gen);
        EXPECT_NEAR(ecm::erfc(x) + ecm::erfc(-x), 2.0, 1e-13);
    }
    EXPECT_EQ(ecm::erfc(0.0), 1.0);
    EXPECT_EQ(ecm::erfc(40.0), 0.0);
    EXPECT_EQ(ecm::erfc(-40.0), 2.0);
    EXPECT_TRUE(std::isnan(ecm::erfc(std::nan(""))));
}

TEST(EcmParams, HardAndSoftBounds) {
    EXPECT_THROW((void)validate(EcmParams{0.0, 0.2, 1.6}), std::invalid_argument);
    EXPECT_THROW((void)validate(EcmParams{15.0, 0.0, 1.6}), std::invalid_argument);
    EXPECT_THROW((void)validate(EcmParams{15.0, 0.2, 0.9}), std::invalid_argument);
    EXPECT_TRUE(validate(EcmParams{}).empty());
    EXPECT_EQ(validate(EcmParams{15.0, 0.05, 1.6}).size(), 1u);
}

TEST(Tortuosity, RoundTripsWithEffectiveDiffusivity) {
    EXPECT_DOUBLE_EQ(tortuosity(15.0, effective_diffusivity(15.0, 1.6)), 1.6);
    EXPECT_DOUBLE_EQ(volume_fraction(0.2, 1.0), 0.2);
    EXPECT_THROW((void)tortuosity(15.0, 20.0), std::invalid_argument);
}

TEST(SteadyState, SpotValue) {
    const EcmParams p;
    const double c = steady_state(p, 1.0, 1000.0);
    EXPECT_NEAR(c, oracle::ecm_steady(1.0, 15.0, 0.2, 1.6, 1000.0), 1e-18);
    EXPECT_NEAR(c, 6.791e-5, 6.791e-8);
}

TEST(Concentration, MatchesTheOracleAndEdgeCases) {
    const EcmParams p;
    for (double r : {1000.0, 1300.0, 1500.0}) {
        for (double t : {1.0, 1e3, 1e5, 1e7}) {
            const double want = oracle::ecm_conc(1.0, 15.0, 0.2, 1.6, r, t);
            EXPECT_NEAR(concentration(p, {1.0, r, t}), want, 1e-12 * oracle::ecm_steady(1, 15, 0.2, 1.6, r));
        }
    }
    EXPECT_EQ(concentration(p, {1.0, 1000.0, 0.0}), 0.0);
    EXPECT_EQ(concentration(p, {0.0, 1000.0, 10.0}), 0.0);
    EXPECT_THROW((void)concentration(p, {1.0, 0.0, 10.0}), std::invalid_argument);
    EXPECT_THROW((void)concentration(p, {1.0, 1000.0, -1.0}), std::invalid_argument);
    EXPECT_THROW((void)concentration(p, {-1.0, 1000.0, 1.0}), std::invalid_argument);
}

TEST(Concentration, SaturatesToTheSteadyState) {
    const EcmParams p;
    for (double r : {1000.0, 1500.0}) {
        const double c = concentration(p, {1.0, r, 1e14});
        EXPECT_NEAR(c / steady_state(p, 1.0, r), 1.0, 1e-3);
    }
}

TEST(Concentration, AtTenMillionSecondsFollowsTheErfcFactor) {
    // Far from saturation at this distance: the ratio to c_inf is the erfc factor itself.
    const EcmParams p;
    const double ratio = concentration(p, {1.0, 1000.0, 1e7}) / steady_state(p, 1.0, 1000.0);
    EXPECT_NEAR(ratio, oracle::erfc_wide(1000.0 * 1.6 / (2.0 * std::sqrt(15.0 * 1e7))), 1e-12);
    EXPECT_LT(ratio, 0.95);
}

TEST(TimeProfile, OrderedByDistanceAndMonotoneInTime) {
    const EcmParams p;
    const TimeGrid grid = make_time_grid(0.0, 1e7, 1e4, units::second);
    std::vector<TimeSeries> curves;
    for (double r : {1000.0, 1200.0, 1300.0, 1400.0, 1500.0}) curves.push_back(time_profile(p, 1.0, r, grid));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        for (std::size_t k = 1; k < curves.size(); ++k) EXPECT_GT(curves[k - 1][i], curves[k][i]);
        EXPECT_GE(curves[0][i], curves[0][i - 1]);
    }
    EXPECT_THROW((void)time_profile(p, 1.0, 1000.0, make_time_grid(0, 1, 0.1, units::hour)),
                 std::invalid_argument);
}

TEST(Superpose, MatchesBruteForceSum) {
    const EcmParams p;
    const TimeGrid grid(0.0, 10.0, 300, units::second);
    std::vector<double> q(grid.size(), 0.0);
    for (std::size_t j = 0; j < 120; ++j) q[j] = 1e6 * std::sin(0.05 * static_cast<double>(j)) + 1e6;
    const TimeSeries out = superpose_source(TimeSeries(grid, q, units::molecules), p, 300.0);
    for (std::size_t m = 0; m < grid.size(); m += 13) {
        double want = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            want += oracle::ecm_conc(q[j], 15.0, 0.2, 1.6, 300.0, grid.time(m) - grid.time(j));
        }
        EXPECT_NEAR(out[m], want, 1e-10 * std::max(want, 1.0)) << m;
    }
}

TEST(Superpose, SingleReleaseIsTheShiftedProfileAndNegativeSourceThrows) {
    const EcmParams p;
    const TimeGrid grid(0.0, 5.0, 100, units::second);
    std::vector<double> q(grid.size(), 0.0);
    q[10] = 7.0;
    const TimeSeries out = superpose_source(TimeSeries(grid, q, units::molecules), p, 100.0);
    for (std::size_t m = 0; m <= 10; ++m) EXPECT_EQ(out[m], 0.0);
    for (std::size_t m = 11; m < grid.size(); ++m) {
        EXPECT_NEAR(out[m], concentration(p, {7.0, 100.0, grid.time(m - 10)}), 1e-15);
    }
    q[3] = -1.0;
    EXPECT_THROW((void)superpose_source(TimeSeries(grid, q, units::molecules), p, 100.0), std::invalid_argument);
}
