#include "mcdds/idrm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mcdds::idrm {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    return b > max - a ? max : a + b;
}

std::uint64_t release_request(const IdrmConfig& cfg, double endogenous) {
    if (cfg.release_law == ReleaseLaw::quantum) {
        return cfg.release_quantum;
    }
    const double scaled =
        static_cast<double>(cfg.release_quantum) * endogenous / cfg.detection_threshold;
    if (scaled >= static_cast<double>(cfg.capacity)) {
        return cfg.capacity;
    }
    return static_cast<std::uint64_t>(std::llround(scaled));
}

}  // namespace

void validate(const IdrmConfig& cfg) {
    if (cfg.capacity == 0) throw std::invalid_argument("idrm.capacity must be > 0");
    if (cfg.release_quantum == 0 || cfg.release_quantum > cfg.capacity) {
        throw std::invalid_argument("idrm.release_quantum must lie in (0, capacity]");
    }
    if (!(cfg.detection_threshold > 0.0)) {
        throw std::invalid_argument("idrm.detection_threshold must be > 0");
    }
    if (cfg.initial_stored > cfg.capacity) {
        throw std::invalid_argument("idrm.initial_stored exceeds capacity");
    }
    rx::validate(cfg.receiver);
}

StepOutcome step(const IdrmState& state, const IdrmConfig& cfg, double ambient_dac,
                 double endogenous, Rng& rng) {
    if (state.stored > cfg.capacity) {
        throw std::invalid_argument("idrm step: stored amount exceeds capacity");
    }
    if (!(ambient_dac >= 0.0)) {
        throw std::invalid_argument("idrm step: ambient concentration must be >= 0");
    }

    StepOutcome out{state, 0, 0, 0};
    IdrmState& s = out.state;

    const double lambda =
        cfg.receiver.lambda_noise + rx::p_obs(cfg.receiver, ambient_dac, cfg.receiver.Ts);
    out.arrivals = rx::sample_arrivals(lambda, rng);
    out.absorbed = std::min(out.arrivals, cfg.capacity - s.stored);
    s.stored += out.absorbed;
    s.absorbed_total += out.absorbed;
    s.overflow_total = saturating_add(s.overflow_total, out.arrivals - out.absorbed);

    if (detect(endogenous, cfg.detection_threshold)) {
        out.released = std::min(release_request(cfg, endogenous), s.stored);
        s.stored -= out.released;
        s.released_total += out.released;
    }
    return out;
}

EndogenousPulseTrain::EndogenousPulseTrain(std::vector<EndogenousPulse> pulses)
    : pulses_(std::move(pulses)) {
    for (std::size_t i = 0; i < pulses_.size(); ++i) {
        if (!(pulses_[i].amplitude > 0.0)) {
            throw std::invalid_argument("pulse amplitudes must be > 0");
        }
        if (i > 0 && !(pulses_[i].time_s > pulses_[i - 1].time_s)) {
            throw std::invalid_argument("pulse times must be strictly increasing");
        }
    }
}

EndogenousPulseTrain EndogenousPulseTrain::periodic(double first_s, double period_s,
                                                    double last_s, double amplitude) {
    if (!(period_s > 0.0)) throw std::invalid_argument("pulse period must be > 0");
    std::vector<EndogenousPulse> pulses;
    for (std::size_t i = 0;; ++i) {
        const double t = first_s + static_cast<double>(i) * period_s;
        if (t > last_s) break;
        pulses.push_back({t, amplitude});
    }
    return EndogenousPulseTrain(std::move(pulses));
}

TimeSeries IdrmRun::storage_trace() const {
    std::vector<double> v(records.size());
    std::transform(records.begin(), records.end(), v.begin(),
                   [](const StepRecord& r) { return static_cast<double>(r.stored); });
    return TimeSeries(grid, std::move(v), units::molecules);
}

TimeSeries IdrmRun::release_trace() const {
    std::vector<double> v(records.size());
    std::transform(records.begin(), records.end(), v.begin(),
                   [](const StepRecord& r) { return static_cast<double>(r.released_this_step); });
    return TimeSeries(grid, std::move(v), units::molecules);
}

IdrmRun simulate(const IdrmConfig& cfg, const TimeSeries& ambient_trace,
                 const EndogenousPulseTrain& pulses, RngSeed seed) {
    validate(cfg);
    const TimeGrid& src = ambient_trace.grid();
    if (!(src.unit() == units::second)) {
        throw std::invalid_argument("idrm: ambient trace must be on a seconds grid");
    }
    const TimeGrid grid = make_time_grid(src.t_start(), src.t_end(), cfg.receiver.Ts, units::second);
    const TimeSeries ambient = resample(ambient_trace, grid);

    std::vector<double> endogenous(grid.size(), 0.0);
    for (const EndogenousPulse& p : pulses.pulses()) {
        const double pos = (p.time_s - grid.t_start()) / grid.dt();
        if (pos < -0.5 || pos > static_cast<double>(grid.size()) - 0.5) {
            throw std::out_of_range("endogenous pulse at " + format_double(p.time_s) +
                                    " s lies outside the ambient trace");
        }
        const auto idx = static_cast<std::size_t>(std::llround(std::max(pos, 0.0)));
        endogenous[idx] = std::max(endogenous[idx], p.amplitude);
    }

    Rng rng(seed);
    IdrmState state = IdrmState::initial(cfg);
    std::vector<StepRecord> records(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const StepOutcome o = step(state, cfg, ambient[i], endogenous[i], rng);
        state = o.state;
        records[i] = StepRecord{state.stored, o.released, state.absorbed_total, state.released_total};
    }
    return IdrmRun{grid, std::move(records), std::move(endogenous), state};
}

void write_csv(std::ostream& out, const IdrmRun& run) {
    out << "t_s,stored,released_this_step,absorbed_total,released_total\n";
    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const StepRecord& r = run.records[i];
        out << format_double(run.grid.time(i)) << ',' << r.stored << ',' << r.released_this_step
            << ',' << r.absorbed_total << ',' << r.released_total << '\n';
    }
}

}  // namespace mcdds::idrm
