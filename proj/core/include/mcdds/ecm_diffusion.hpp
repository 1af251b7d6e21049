#pragma once

// Transport through the brain extracellular matrix (ECM). An instantaneous
// point release of Q molecules observed at distance r obeys
//
//   c(r, t) = Q lambda^2 / (4 pi D alpha r) * erfc(r lambda / (2 sqrt(D t)))
//
// with D the free diffusion coefficient, alpha the ECM volume fraction and
// lambda the tortuosity. There is no uptake term, so c tends to the nonzero
// limit Q lambda^2 / (4 pi D alpha r) instead of decaying back to zero.
//
// Units: micrometres, seconds, molecules.

#include "mcdds/quantities.hpp"

#include <string>
#include <vector>

namespace mcdds::ecm {

/// Complementary error function, absolute error <= 1e-12 on |x| <= 10.
/// Power series for |x| < 2.5, Lentz continued fraction beyond; negative
/// arguments use erfc(-x) = 2 - erfc(x).
[[nodiscard]] double erfc(double x) noexcept;

/// Physiological range of the ECM volume fraction.
inline constexpr double kAlphaMin = 0.1;
inline constexpr double kAlphaMax = 0.3;

struct EcmParams {
    double D = 15.0;            ///< free diffusion coefficient, um^2/s
    double alpha = 0.2;         ///< volume fraction
    double lambda_tort = 1.6;   ///< tortuosity
};

/// Throws std::invalid_argument for D <= 0, alpha outside (0, 1] or
/// lambda < 1. Returns soft warnings, e.g. alpha outside [0.1, 0.3].
std::vector<std::string> validate(const EcmParams& p);

struct EcmQuery {
    double Q = 1.0;     ///< released amount, molecules
    double r = 1300.0;  ///< distance from the source, um
    double t = 0.0;     ///< elapsed time since release, s
};

/// alpha = V_ecm / V_tissue.
[[nodiscard]] double volume_fraction(double v_ecm, double v_tissue);

/// lambda = sqrt(D / D*); requires 0 < D* <= D.
[[nodiscard]] double tortuosity(double D, double D_star);

/// D* = D / lambda^2, the inverse of tortuosity().
[[nodiscard]] double effective_diffusivity(double D, double lambda_tort);

/// Concentration (molecules/um^3) of an instantaneous release; 0 at t = 0.
/// Throws std::invalid_argument for r <= 0, t < 0 or Q < 0.
[[nodiscard]] double concentration(const EcmParams& p, const EcmQuery& q);

/// t -> infinity limit Q lambda^2 / (4 pi D alpha r).
[[nodiscard]] double steady_state(const EcmParams& p, double Q, double r);

/// concentration() across a grid in seconds (times are absolute elapsed times).
[[nodiscard]] TimeSeries time_profile(const EcmParams& p, double Q, double r,
                                      const TimeGrid& grid);

/// c(t_n) = sum_{j <= n} source[j] * g(t_n - t_j) where source[j] is the number
/// of molecules released during step j and g is the unit-Q point response.
/// Requires a seconds grid and a nonnegative source.
[[nodiscard]] TimeSeries superpose_source(const TimeSeries& source, const EcmParams& p,
                                          double r);

}  // namespace mcdds::ecm
