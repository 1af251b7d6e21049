#include "mcdds/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mcdds::rx {

namespace {

// Slack, in sampling periods, for deciding that t sits on a sampling instant.
constexpr double kInstantSlack = 1e-9;

double kernel_per_unit(const ReceiverParams& p, double elapsed) {
    return receiver_volume(p.d_rx) / std::pow(4.0 * std::numbers::pi * p.D * elapsed, 1.5) *
           p.v_norm;
}

void require_seconds(const TimeSeries& c_trace) {
    if (!(c_trace.grid().unit() == units::second)) {
        throw std::invalid_argument("receiver: concentration trace must be on a seconds grid");
    }
}

}  // namespace

void validate(const ReceiverParams& p) {
    if (!(p.d_rx > 0.0)) throw std::invalid_argument("receiver.d_rx must be > 0");
    if (!(p.Ts > 0.0)) throw std::invalid_argument("receiver.Ts must be > 0");
    if (!(p.lambda_noise >= 0.0)) throw std::invalid_argument("receiver.lambda_noise must be >= 0");
    if (!(p.D > 0.0)) throw std::invalid_argument("receiver.D must be > 0");
    if (!(p.v_norm > 0.0)) throw std::invalid_argument("receiver.v_norm must be > 0");
}

double receiver_volume(double d_rx) {
    if (!(d_rx > 0.0)) throw std::invalid_argument("receiver radius must be > 0");
    return 4.0 / 3.0 * std::numbers::pi * d_rx * d_rx * d_rx;
}

double p_obs(const ReceiverParams& p, double c, double elapsed) {
    if (!(elapsed > 0.0)) throw std::invalid_argument("P_obs is singular at elapsed time <= 0");
    if (!(c >= 0.0)) throw std::invalid_argument("P_obs needs a nonnegative concentration");
    return kernel_per_unit(p, elapsed) * c;
}

double lambda_rx(const ReceiverParams& p, const TimeSeries& c_trace, double t) {
    validate(p);
    require_seconds(c_trace);
    const double t0 = c_trace.grid().t_start();
    if (t < t0 || t > c_trace.grid().t_end()) {
        throw std::out_of_range("lambda_rx: t lies outside the concentration trace");
    }
    const double rel = t - t0;
    const auto last_j = static_cast<std::size_t>(std::floor(rel / p.Ts + kInstantSlack)) + 1;

    double lambda = p.lambda_noise;
    for (std::size_t j = 1; j <= last_j; ++j) {
        const double instant = static_cast<double>(j - 1) * p.Ts;
        const double elapsed = rel - instant;
        if (elapsed <= kInstantSlack * p.Ts) {
            continue;
        }
        const double c = sample_at(c_trace, t0 + std::min(instant, rel));
        lambda += p_obs(p, c, elapsed);
    }
    return lambda;
}

TimeSeries lambda_rx_trace(const ReceiverParams& p, const TimeSeries& c_trace) {
    validate(p);
    require_seconds(c_trace);
    const TimeGrid& src = c_trace.grid();
    const TimeGrid grid = make_time_grid(src.t_start(), src.t_end(), p.Ts, units::second);
    const TimeSeries c = resample(c_trace, grid);

    ReceiverState state(p);
    std::vector<double> out(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        state.push(c[m]);
        out[m] = state.intensity();
    }
    return TimeSeries(grid, std::move(out), units::counts);
}

ReceiverState::ReceiverState(ReceiverParams params) : params_(params) {
    validate(params_);
    kernel_.push_back(0.0);
}

void ReceiverState::push(double concentration) {
    if (!(concentration >= 0.0)) {
        throw std::invalid_argument("receiver: concentration samples must be >= 0");
    }
    history_.push_back(concentration);
    const std::size_t lag = history_.size() - 1;
    if (kernel_.size() <= lag) {
        kernel_.push_back(kernel_per_unit(params_, static_cast<double>(lag) * params_.Ts));
    }
}

double ReceiverState::intensity() const {
    if (history_.empty()) {
        throw std::logic_error("receiver: intensity requested before any sample");
    }
    const std::size_t m = history_.size() - 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sum += history_[i] * kernel_[m - i];
    }
    return params_.lambda_noise + sum;
}

std::uint64_t sample_arrivals(double lambda, RngSeed seed) {
    Rng rng(seed);
    return sample_poisson(lambda, rng);
}

std::uint64_t sample_arrivals(double lambda, Rng& rng) {
    return sample_poisson(lambda, rng);
}

ReceptionTrace simulate_reception(const ReceiverParams& p, const TimeSeries& c_trace,
                                  RngSeed seed) {
    TimeSeries lambda = lambda_rx_trace(p, c_trace);
    Rng rng(seed);
    std::vector<std::uint64_t> arrivals(lambda.size());
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        arrivals[i] = sample_poisson(lambda[i], rng);
    }
    return ReceptionTrace{std::move(lambda), std::move(arrivals)};
}

void write_csv(std::ostream& out, const ReceptionTrace& trace) {
    out << "t_s,lambda,arrivals\n";
    for (std::size_t i = 0; i < trace.arrivals.size(); ++i) {
        out << format_double(trace.lambda.time(i)) << ',' << format_double(trace.lambda[i]) << ','
            << trace.arrivals[i] << '\n';
    }
}

}  // namespace mcdds::rx
