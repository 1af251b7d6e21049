#pragma once

// Least-squares identification of the plasma-stage (G1) parameters from
// sampled plasma levels.
//
// The search runs a Nelder-Mead simplex over x = (log k, log T1, log T2, T0).
// The log coordinates keep k, T1 and T2 positive; T0 is clamped at 0 when the
// objective is evaluated. The two-exponential form is symmetric in (T1, T2),
// so results are reported with T1 < T2.

#include "mcdds/pk_lti.hpp"
#include "mcdds/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mcdds::fit {

struct PlasmaSample {
    double t_h = 0.0;
    double value = 0.0;
};

struct FitOptions {
    double xtol = 1e-8;   ///< simplex diameter in search coordinates
    double ftol = 1e-12;  ///< spread of objective values across the simplex
    std::size_t max_iterations = 5000;
    std::size_t max_restarts = 4;  ///< fresh simplices around the best point after convergence
    bool record_history = false;   ///< keep the best objective after every iteration
};

struct FitResult {
    pk::G1Params params;
    double sse = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> best_history;  ///< filled when FitOptions::record_history is set
};

/// Minimum number of samples accepted by fit_g1().
inline constexpr std::size_t kMinSamples = 6;
/// Minimum time span (hours) of the samples accepted by fit_g1().
inline constexpr double kMinSpanH = 3.0;

/// Sum of squared residuals against the closed-form G1 response.
/// Throws std::invalid_argument for empty data.
[[nodiscard]] double sse(const pk::G1Params& params, std::span<const PlasmaSample> data,
                         double dose_mg);

/// Throws std::invalid_argument for too few points, a span shorter than
/// kMinSpanH, non-finite or negative times, or non-finite values. When the
/// iteration budget runs out the best point found is returned with
/// converged = false.
[[nodiscard]] FitResult fit_g1(std::span<const PlasmaSample> data, double dose_mg,
                               const pk::G1Params& init, const FitOptions& opts = {});

/// Runs fit_g1() from every start concurrently and returns the lowest-sse
/// result. Ties go to the earliest start, so the answer does not depend on
/// scheduling.
[[nodiscard]] FitResult fit_g1_multistart(std::span<const PlasmaSample> data, double dose_mg,
                                          std::span<const pk::G1Params> starts,
                                          const FitOptions& opts = {});

/// `count` starting points with each parameter scaled by an independent
/// uniform factor in [1 - spread, 1 + spread].
[[nodiscard]] std::vector<pk::G1Params> perturbed_starts(const pk::G1Params& center,
                                                         std::size_t count, double spread,
                                                         RngSeed seed);

/// Closed-form values times (1 + noise_rel * N(0, 1)). Throws
/// std::invalid_argument for negative noise_rel or negative times.
[[nodiscard]] std::vector<PlasmaSample> simulate_observations(const pk::G1Params& params,
                                                              double dose_mg,
                                                              std::span<const double> times_h,
                                                              double noise_rel, RngSeed seed);

/// 25 sample times on [0, 5] h: 13 evenly spaced over the first hour, where
/// the fast time constant and the delay are identifiable, and 12 over the tail.
[[nodiscard]] std::vector<double> dense_early_schedule();

}  // namespace mcdds::fit
