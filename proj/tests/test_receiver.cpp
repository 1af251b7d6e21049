#include "oracles.hpp"

#include "mcdds/errors.hpp"
#include "mcdds/receiver.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace mcdds;
using namespace mcdds::rx;

namespace {

struct DrawStats {
    double mean = 0.0;
    double variance = 0.0;
    double chi2 = 0.0;
    double chi2_critical = 0.0;
};

// Chi-square goodness of fit against the Poisson pmf, merging tail cells until
// each expected count is at least 5.
DrawStats draw_stats(double lambda, std::size_t n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    std::map<std::uint64_t, std::size_t> hist;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = sample_arrivals(lambda, rng);
        ++hist[k];
        sum += static_cast<double>(k);
        sum2 += static_cast<double>(k) * static_cast<double>(k);
    }
    DrawStats s;
    s.mean = sum / static_cast<double>(n);
    s.variance = (sum2 - static_cast<double>(n) * s.mean * s.mean) / static_cast<double>(n - 1);

    const boost::math::poisson_distribution<double> pois(lambda);
    const auto nn = static_cast<double>(n);
    std::vector<std::pair<double, double>> cells;  // (observed, expected)
    double obs = 0.0;
    double expct = 0.0;
    const auto kmax = static_cast<std::uint64_t>(lambda + 12.0 * std::sqrt(lambda) + 20.0);
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        obs += static_cast<double>(hist.count(k) ? hist[k] : 0);
        expct += nn * boost::math::pdf(pois, static_cast<double>(k));
        if (expct >= 5.0) {
            cells.emplace_back(obs, expct);
            obs = expct = 0.0;
        }
    }
    double tail_obs = obs;
    for (const auto& [k, c] : hist) {
        if (k > kmax) tail_obs += static_cast<double>(c);
    }
    const double tail_exp = nn * boost::math::cdf(boost::math::complement(pois, static_cast<double>(kmax))) + expct;
    if (!cells.empty()) {
        cells.back().first += tail_obs;
        cells.back().second += tail_exp;
    }
    for (const auto& [o, e] : cells) s.chi2 += (o - e) * (o - e) / e;
    const boost::math::chi_squared_distribution<double> chi(static_cast<double>(cells.size() - 1));
    s.chi2_critical = boost::math::quantile(boost::math::complement(chi, 0.001));
    return s;
}

}  // namespace

TEST(PObs, SpotValue) {
    const ReceiverParams p;
    EXPECT_NEAR(p_obs(p, 1.0, 1.0), oracle::p_obs(1.0, 15.0, 1.0, 1.0), 1e-18);
    EXPECT_NEAR(p_obs(p, 1.0, 1.0) / 1.6186e-3, 1.0, 1e-4);
    EXPECT_THROW((void)p_obs(p, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW((void)p_obs(p, -1.0, 1.0), std::invalid_argument);
}

TEST(LambdaRx, DirectSumMatchesOracleAndIncrementalState) {
    ReceiverParams p;
    p.lambda_noise = 0.25;
    const TimeGrid grid(5.0, p.Ts, 400, units::second);
    std::vector<double> c(grid.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 + std::sin(0.03 * static_cast<double>(i));
    const TimeSeries trace(grid, c, units::molecules_per_um3);

    const TimeSeries incremental = lambda_rx_trace(p, trace);
    ASSERT_EQ(incremental.size(), grid.size());
    for (std::size_t m = 0; m < grid.size(); m += 37) {
        const double want = oracle::lambda_sum(c, p.d_rx, p.D, p.Ts, p.lambda_noise, m);
        EXPECT_NEAR(lambda_rx(p, trace, grid.time(m)), want, 1e-12 * want);
        EXPECT_NEAR(incremental[m], want, 1e-12 * want);
    }
    EXPECT_EQ(lambda_rx(p, trace, grid.t_start()), p.lambda_noise);
    EXPECT_THROW((void)lambda_rx(p, trace, grid.t_end() + 1.0), std::out_of_range);
}

TEST(LambdaRx, NoiseOnlyWithoutConcentration) {
    ReceiverParams p;
    p.lambda_noise = 3.0;
    const TimeSeries zero = TimeSeries::zeros(TimeGrid(0.0, p.Ts, 50, units::second), units::molecules_per_um3);
    const TimeSeries lam = lambda_rx_trace(p, zero);
    for (std::size_t i = 0; i < lam.size(); ++i) EXPECT_EQ(lam[i], 3.0);
}

TEST(ReceiverState, RejectsNegativeSamplesAndEmptyReads) {
    ReceiverState s(ReceiverParams{});
    EXPECT_THROW((void)s.intensity(), std::logic_error);
    EXPECT_THROW(s.push(-1.0), std::invalid_argument);
}

TEST(Arrivals, PoissonStatistics) {
    const std::size_t n = 100000;
    for (double lambda : {0.5, 4.0, 20.0, 45.0, 1000.0}) {
        const DrawStats s = draw_stats(lambda, n, 2024);
        EXPECT_NEAR(s.mean, lambda, 3.0 * std::sqrt(lambda / static_cast<double>(n))) << lambda;
        EXPECT_NEAR(s.variance / lambda, 1.0, 0.05) << lambda;
        EXPECT_LT(s.chi2, s.chi2_critical) << lambda;
    }
}

TEST(Arrivals, DeterministicPerSeedAndBounded) {
    EXPECT_EQ(sample_arrivals(7.5, RngSeed{99}), sample_arrivals(7.5, RngSeed{99}));
    EXPECT_EQ(sample_arrivals(0.0, RngSeed{1}), 0u);
    const double big = 1e15;
    const auto k = sample_arrivals(big, RngSeed{3});
    EXPECT_NEAR(static_cast<double>(k), big, 10.0 * std::sqrt(big));
    EXPECT_THROW((void)sample_arrivals(-1.0, RngSeed{1}), std::invalid_argument);
    EXPECT_THROW((void)sample_arrivals(std::nan(""), RngSeed{1}), std::invalid_argument);
    EXPECT_THROW((void)sample_arrivals(1e19, RngSeed{1}), NumericError);
}

TEST(Reception, SeededRunsAreIdentical) {
    const ReceiverParams p;
    const TimeSeries c(TimeGrid(0.0, 1.0, 31, units::second), std::vector<double>(31, 500.0),
                       units::molecules_per_um3);
    const ReceptionTrace a = simulate_reception(p, c, RngSeed{5});
    const ReceptionTrace b = simulate_reception(p, c, RngSeed{5});
    EXPECT_EQ(a.arrivals, b.arrivals);
    EXPECT_EQ(a.lambda.size(), 301u);
    std::ostringstream os;
    write_csv(os, a);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t_s,lambda,arrivals");
}
