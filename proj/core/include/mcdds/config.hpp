#pragma once

// JSON configuration for end-to-end runs. Omitted fields take the reference
// parameter values; see README.md for the schema.

#include "mcdds/ecm_diffusion.hpp"
#include "mcdds/idrm.hpp"
#include "mcdds/pk_lti.hpp"
#include "mcdds/receiver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcdds::pipeline {

/// Avogadro's constant over the molar mass of dopamine (153.18 g/mol), per mg.
inline constexpr double kDefaultMgToMolecules = 6.02214076e23 / 153.18 * 1e-3;

struct Sweeps {
    std::vector<double> a{0.25, 0.35, 0.50, 0.60, 0.75};
    std::vector<double> beta{0.5, 0.75, 1.0, 1.25, 1.5};  ///< 1/h
};

struct EcmSection {
    ecm::EcmParams params{};
    std::vector<double> r_mm{1.0, 1.2, 1.3, 1.4, 1.5};
    double r_idrm_mm = 1.3;  ///< distance of the IDRM from the barrier
};

struct ReceiverSection {
    double d_rx_um = 1.0;
    double Ts_s = 0.1;
    double lambda_noise = 0.0;
    double v_norm_um3 = 1.0;
    double window_s = 600.0;  ///< receiver and IDRM run over the last window_s of the horizon
};

struct IdrmSection {
    std::uint64_t capacity = 1'000'000;
    std::uint64_t release_quantum = 10'000;
    double detection_threshold = 1e-6;
    idrm::ReleaseLaw release_law = idrm::ReleaseLaw::quantum;
    std::uint64_t initial_stored = 0;
    /// Explicit pulses (seconds on the run clock). When empty, a periodic
    /// train of pulse_amplitude every pulse_period_s covers the window.
    std::vector<idrm::EndogenousPulse> pulses;
    double pulse_period_s = 60.0;
    double pulse_amplitude = 1e-5;
};

struct Grids {
    double pk_dt_h = 1e-3;
    double ecm_dt_s = 10.0;
    double horizon_h = 12.0;
    double fig6_horizon_h = 30.0;
    double fig7_dt_s = 1e4;
    double fig7_horizon_s = 1e7;

    [[nodiscard]] double horizon_s() const noexcept { return horizon_h * 3600.0; }
};

struct PipelineConfig {
    pk::Regimen regimen = pk::Regimen::single(pk::kReferenceDoseMg);
    pk::G1Params g1{};
    pk::G2Params g2{};
    pk::G3Params g3{};
    Sweeps sweeps{};
    EcmSection ecm{};
    ReceiverSection receiver{};
    IdrmSection idrm{};
    double mg_to_molecules = kDefaultMgToMolecules;
    Grids grids{};
    std::uint64_t seed = 1;
    std::string rng{kRngName};
    std::string output_dir = "mcdds_out";

    /// Soft-bound notices collected during validation (not part of the echo).
    std::vector<std::string> warnings;

    [[nodiscard]] rx::ReceiverParams receiver_params() const;
    [[nodiscard]] idrm::IdrmConfig idrm_config() const;
    [[nodiscard]] idrm::EndogenousPulseTrain pulse_train() const;
    [[nodiscard]] double window_start_s() const noexcept {
        return grids.horizon_s() - receiver.window_s;
    }
};

/// Parses and validates. Throws ConfigError listing every violation, each
/// addressed by its dotted path; malformed JSON is reported at path "".
[[nodiscard]] PipelineConfig validate_config(std::string_view raw);
[[nodiscard]] PipelineConfig validate_config(const nlohmann::json& raw);
[[nodiscard]] inline PipelineConfig validate_config(const char* raw) {
    return validate_config(std::string_view(raw));
}

/// Complete echo of a configuration; validate_config(to_json(c)) reproduces c.
[[nodiscard]] nlohmann::json to_json(const PipelineConfig& cfg);

/// Applies one `dotted.path=value` assignment. The value is parsed as JSON
/// and taken as a plain string when that fails. Numeric path segments index
/// into arrays. Throws ConfigError on a malformed assignment.
void apply_override(nlohmann::json& raw, std::string_view assignment);

}  // namespace mcdds::pipeline
