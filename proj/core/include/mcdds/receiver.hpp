#pragma once

// Stochastic reception at a spherical receiver of radius d_Rx.
//
// The number of molecules counted by time t is Poisson with a time-varying mean
//
//   lambda_Rx(t) = lambda_noise + sum_{j=1}^{floor(t/Ts)+1} P_obs(c_j, t - (j-1) Ts)
//
// where c_j is the ambient concentration at the j-th sampling instant and
//
//   P_obs(c, tau) = V_Rx / (4 pi D tau)^{3/2} * c * V_norm,  V_Rx = 4/3 pi d_Rx^3.
//
// V_norm (default 1 um^3) turns the concentration into a molecule count so
// P_obs is a dimensionless expected count. Terms with zero elapsed time are
// skipped because the kernel is singular there.

#include "mcdds/quantities.hpp"
#include "mcdds/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mcdds::rx {

struct ReceiverParams {
    double d_rx = 1.0;          ///< receiver radius, um
    double Ts = 0.1;            ///< sampling period, s
    double lambda_noise = 0.0;  ///< static noise, counts per sample
    double D = 15.0;            ///< diffusion coefficient, um^2/s
    double v_norm = 1.0;        ///< concentration-to-count reference volume, um^3
};

/// Throws std::invalid_argument naming the violated bound.
void validate(const ReceiverParams& p);

/// 4/3 pi d^3 (um^3).
[[nodiscard]] double receiver_volume(double d_rx);

/// Expected count from concentration `c` (molecules/um^3) after `elapsed` seconds.
/// Throws std::invalid_argument for elapsed <= 0 or c < 0.
[[nodiscard]] double p_obs(const ReceiverParams& p, double c, double elapsed);

/// Intensity at time `t` (seconds on the trace's clock). Concentrations at the
/// sampling instants t_start + (j-1) Ts are read from `c_trace` by linear
/// interpolation. Throws std::out_of_range when t lies outside the trace.
[[nodiscard]] double lambda_rx(const ReceiverParams& p, const TimeSeries& c_trace, double t);

/// Intensity at every sampling instant t_start + m Ts inside the trace.
[[nodiscard]] TimeSeries lambda_rx_trace(const ReceiverParams& p, const TimeSeries& c_trace);

/// Incremental form of lambda_rx_trace(): push one concentration sample per
/// sampling period and read the intensity at the newest instant.
class ReceiverState {
public:
    explicit ReceiverState(ReceiverParams params);

    void push(double concentration);

    /// lambda_Rx at the newest instant. Requires at least one pushed sample.
    [[nodiscard]] double intensity() const;

    [[nodiscard]] std::size_t index() const noexcept { return history_.size() - 1; }
    [[nodiscard]] const std::vector<double>& history() const noexcept { return history_; }

private:
    ReceiverParams params_;
    std::vector<double> history_;
    std::vector<double> kernel_;  // kernel_[k] = P_obs per unit concentration at lag k Ts
};

/// One Poisson draw with mean `lambda`, from a fresh stream seeded by `seed`.
[[nodiscard]] std::uint64_t sample_arrivals(double lambda, RngSeed seed);

/// One Poisson draw with mean `lambda` from an existing stream.
[[nodiscard]] std::uint64_t sample_arrivals(double lambda, Rng& rng);

/// Intensity and sampled counts on the receiver's sampling grid.
struct ReceptionTrace {
    TimeSeries lambda;
    std::vector<std::uint64_t> arrivals;
};

[[nodiscard]] ReceptionTrace simulate_reception(const ReceiverParams& p,
                                                const TimeSeries& c_trace, RngSeed seed);

/// CSV with columns `t_s,lambda,arrivals`.
void write_csv(std::ostream& out, const ReceptionTrace& trace);

}  // namespace mcdds::rx
