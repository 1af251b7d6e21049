#pragma once

// Discrete-event model of the dopamine rate modulator (IDRM): a receiver that
// charges a vesicle store from ambient DAC, a sensor that detects endogenous
// dopamine against a threshold, and a release stage that empties part of the
// store on detection.
//
// Molecule counts are integers throughout, so the balance
//
//   absorbed_total - released_total == stored - initial_stored
//
// holds exactly after every step.

#include "mcdds/quantities.hpp"
#include "mcdds/receiver.hpp"
#include "mcdds/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mcdds::idrm {

enum class ReleaseLaw {
    quantum,       ///< release_quantum molecules per detection
    proportional,  ///< release_quantum * level / threshold molecules per detection
};

struct IdrmConfig {
    std::uint64_t capacity = 1'000'000;        ///< S_max, molecules
    std::uint64_t release_quantum = 10'000;    ///< q, molecules
    double detection_threshold = 1e-6;         ///< theta, molecules/um^3
    ReleaseLaw release_law = ReleaseLaw::quantum;
    std::uint64_t initial_stored = 0;
    rx::ReceiverParams receiver{};
};

/// Throws std::invalid_argument unless 0 < q <= S_max, theta > 0 and the
/// initial store fits the capacity.
void validate(const IdrmConfig& cfg);

struct IdrmState {
    std::uint64_t stored = 0;
    std::uint64_t initial_stored = 0;
    std::uint64_t absorbed_total = 0;
    std::uint64_t released_total = 0;
    std::uint64_t overflow_total = 0;  ///< arrivals discarded at full capacity (saturating)

    static IdrmState initial(const IdrmConfig& cfg) {
        return IdrmState{cfg.initial_stored, cfg.initial_stored, 0, 0, 0};
    }
};

/// True iff the endogenous level reaches the threshold (boundary inclusive).
[[nodiscard]] constexpr bool detect(double endogenous_level, double theta) noexcept {
    return endogenous_level >= theta;
}

struct StepOutcome {
    IdrmState state;
    std::uint64_t arrivals = 0;
    std::uint64_t absorbed = 0;
    std::uint64_t released = 0;
};

/// One sampling period: draw arrivals ~ Poisson(lambda_noise + P_obs(ambient,
/// Ts)), store what fits and discard the rest, then release on detection.
[[nodiscard]] StepOutcome step(const IdrmState& state, const IdrmConfig& cfg, double ambient_dac,
                               double endogenous, Rng& rng);

struct EndogenousPulse {
    double time_s = 0.0;
    double amplitude = 0.0;  ///< molecules/um^3
};

/// Pulses with strictly increasing times and positive amplitudes.
class EndogenousPulseTrain {
public:
    EndogenousPulseTrain() = default;
    explicit EndogenousPulseTrain(std::vector<EndogenousPulse> pulses);

    /// Pulses of equal amplitude every `period_s`, starting at `first_s`, up to `last_s`.
    static EndogenousPulseTrain periodic(double first_s, double period_s, double last_s,
                                         double amplitude);

    [[nodiscard]] const std::vector<EndogenousPulse>& pulses() const noexcept { return pulses_; }

private:
    std::vector<EndogenousPulse> pulses_;
};

struct StepRecord {
    std::uint64_t stored = 0;
    std::uint64_t released_this_step = 0;
    std::uint64_t absorbed_total = 0;
    std::uint64_t released_total = 0;
};

struct IdrmRun {
    TimeGrid grid;                    ///< seconds, step = receiver Ts
    std::vector<StepRecord> records;  ///< one per grid sample
    std::vector<double> endogenous;   ///< level presented to the sensor per step
    IdrmState final_state;

    [[nodiscard]] TimeSeries storage_trace() const;
    [[nodiscard]] TimeSeries release_trace() const;
};

/// Steps the IDRM across the ambient trace (resampled to the receiver's Ts).
/// Each pulse is presented at the nearest step. Throws std::out_of_range for
/// pulses outside the trace.
[[nodiscard]] IdrmRun simulate(const IdrmConfig& cfg, const TimeSeries& ambient_trace,
                               const EndogenousPulseTrain& pulses, RngSeed seed);

/// CSV with columns `t_s,stored,released_this_step,absorbed_total,released_total`.
void write_csv(std::ostream& out, const IdrmRun& run);

}  // namespace mcdds::idrm
