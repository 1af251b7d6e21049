#pragma once

// Linear pharmacokinetic chain from oral dose to the brain side of the
// blood-brain barrier:
//
//   plasma       G1(s) = k e^{-T0 s} / ((1 + s T1)(1 + s T2))
//   circulation  G2(s) = a e^{-T3 s}
//   BBB          G3(s) = beta / (s + beta)
//
// Every stage works on hour-based grids. Doses are impulses whose weight is
// dose / 125 mg, so the reference parameters reproduce the 125 mg Levodopa
// plasma curve at unit weight.

#include "mcdds/quantities.hpp"

#include <vector>

namespace mcdds::pk {

/// Dose at which the G1 parameters were identified.
inline constexpr double kReferenceDoseMg = 125.0;

/// Below this separation |T1 - T2| (hours) the poles are treated as confluent.
inline constexpr double kConfluentTolerance = 1e-12;

struct G1Params {
    double k = 1418.0;   ///< amplification coefficient, mg
    double T1 = 0.0547;  ///< hours
    double T2 = 0.6073;  ///< hours
    double T0 = 0.2461;  ///< absorption delay, hours
};

struct G2Params {
    double a = 0.5;   ///< attenuation, 0 < a < 1
    double T3 = 0.2;  ///< circulation delay, hours
};

struct G3Params {
    double beta = 1.0;  ///< 1/hours
};

/// Throw std::invalid_argument naming the violated bound.
void validate(const G1Params& p);
void validate(const G2Params& p);
void validate(const G3Params& p);

struct DoseEvent {
    double time_h = 0.0;
    double dose_mg = kReferenceDoseMg;
};

/// Dose events ordered by time. An empty regimen is valid and produces zero traces.
class Regimen {
public:
    Regimen() = default;
    /// Throws std::invalid_argument on non-positive doses or decreasing times.
    explicit Regimen(std::vector<DoseEvent> events);

    static Regimen single(double dose_mg, double time_h = 0.0) {
        return Regimen({DoseEvent{time_h, dose_mg}});
    }

    [[nodiscard]] const std::vector<DoseEvent>& events() const noexcept { return events_; }
    [[nodiscard]] bool empty() const noexcept { return events_.empty(); }

private:
    std::vector<DoseEvent> events_;
};

/// Closed-form G1 impulse response for `dose_mg` given at t = 0, evaluated at
/// `t_h` hours.
[[nodiscard]] double g1_value(const G1Params& p, double dose_mg, double t_h);

/// Time of the G1 maximum: T0 + T1 T2 / (T2 - T1) ln(T2 / T1).
[[nodiscard]] double g1_peak_time(const G1Params& p);

/// G1 impulse response sampled on an hour grid.
[[nodiscard]] TimeSeries g1_impulse_response(const G1Params& p, double dose_mg,
                                             const TimeGrid& grid);

/// a * input(t - T3); samples before t_start + T3 are zero. Integral delays use
/// an index shift, fractional ones linear interpolation.
[[nodiscard]] TimeSeries g2_apply(const TimeSeries& input, const G2Params& p);

/// beta e^{-beta t} on an hour grid starting at 0.
[[nodiscard]] TimeSeries g3_impulse_kernel(const G3Params& p, const TimeGrid& grid);

/// Causal convolution of g3's kernel with `input`, on the input's grid, by the
/// trapezoid rule. `breakpoints` (hours, same clock as the grid) are times where
/// the input's slope jumps, such as the onset of a delayed dose response; the
/// grid cell holding each one is split there so the quadrature stays second
/// order. The input value at a breakpoint is extrapolated from the left.
[[nodiscard]] TimeSeries g3_apply(const TimeSeries& input, const G3Params& p,
                                  std::span<const double> breakpoints = {});

enum class Quadrature {
    /// dt * sum f[m] g[n-m]. A single sample of height 1/dt is the identity.
    rectangle,
    /// Rectangle sum minus half of each end term; second-order accurate for
    /// kernels with a jump at the origin.
    trapezoid,
};

/// Discrete convolution on a shared step, truncated to f's length. Both traces
/// are read as starting at relative time 0. Throws on mismatched steps or
/// time units.
[[nodiscard]] TimeSeries convolve(const TimeSeries& f, const TimeSeries& g,
                                  Quadrature rule = Quadrature::trapezoid);

/// Traces at each stage boundary of the chain.
struct CascadeStages {
    TimeSeries plasma;       ///< G1 output, summed over doses
    TimeSeries circulation;  ///< after G2
    TimeSeries bbb;          ///< after G3: DAC just inside the barrier
};

/// Superposes every dose of the regimen through G1 -> G2 -> G3. Throws
/// std::out_of_range if a dose lies outside the grid.
[[nodiscard]] CascadeStages cascade_stages(const Regimen& regimen, const G1Params& g1,
                                           const G2Params& g2, const G3Params& g3,
                                           const TimeGrid& grid);

/// The post-BBB trace of cascade_stages().
[[nodiscard]] TimeSeries cascade_response(const Regimen& regimen, const G1Params& g1,
                                          const G2Params& g2, const G3Params& g3,
                                          const TimeGrid& grid);

/// Closed-form impulse response of G1 G2 G3 at unit dose weight.
///
/// With poles p1 = 1/T1, p2 = 1/T2, p3 = beta the cascade is
///
///   H(s) = C e^{-(T0+T3) s} / ((s + p1)(s + p2)(s + p3)),  C = k a beta / (T1 T2)
///
/// and, for tau = t - T0 - T3 > 0,
///
///   h(t) = C * sum_i r_i e^{-p_i tau},  r_i = 1 / prod_{j != i} (p_j - p_i)
///
/// where r_i is the residue lim_{s -> -p_i} (s + p_i) / prod_j (s + p_j).
/// Throws std::invalid_argument if two poles coincide within 1e-9 (relative).
[[nodiscard]] double analytic_cascade_impulse(const G1Params& g1, const G2Params& g2,
                                              const G3Params& g3, double t_h);

}  // namespace mcdds::pk
