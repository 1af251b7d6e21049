#pragma once

// End-to-end runs of the delivery chain
//
//   regimen -> G1 -> G2 -> G3 -> mg to molecules -> ECM at each r
//           -> receiver intensity -> arrivals -> IDRM
//
// and the figure families built from it. Every output is a CSV file; a run
// also writes manifest.json holding the full config, the seed and a SHA-256
// of every CSV, which is enough to repeat the run.

#include "mcdds/config.hpp"
#include "mcdds/idrm.hpp"
#include "mcdds/pk_lti.hpp"
#include "mcdds/receiver.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mcdds::pipeline {

struct EcmTrace {
    double r_mm = 0.0;
    TimeSeries concentration;
};

struct PipelineOutput {
    pk::CascadeStages stages;       ///< hours
    TimeSeries source;              ///< molecules crossing the barrier per ECM step, seconds
    std::vector<EcmTrace> ecm;      ///< one per configured r
    TimeSeries ecm_at_idrm;         ///< concentration at r_idrm over the full horizon
    rx::ReceptionTrace reception;   ///< receiver window, step Ts
    idrm::IdrmRun idrm;             ///< receiver window, step Ts
};

/// Runs every stage in memory. Deterministic given the config.
[[nodiscard]] PipelineOutput compute_pipeline(const PipelineConfig& cfg);

/// Molecules released into the ECM during each ECM step, from the post-BBB
/// trace read as a rate in mg/h.
[[nodiscard]] TimeSeries barrier_source(const TimeSeries& bbb, const PipelineConfig& cfg);

/// File name for a per-distance trace, e.g. "ecm_r1.3mm.csv".
[[nodiscard]] std::string distance_label(std::string_view prefix, double r_mm);

struct WrittenFile {
    std::string name;  ///< relative to the output directory
    std::string sha256;
};

/// compute_pipeline() plus CSV and manifest output under `out_dir`. Returns the
/// manifest. Throws IoError when the directory or a file cannot be written.
nlohmann::json run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

/// The config stored in a manifest, validated.
[[nodiscard]] PipelineConfig config_from_manifest(const nlohmann::json& manifest);

inline constexpr std::string_view kFigureNames[] = {"fig5", "fig_circ", "fig6", "fig7", "fig8"};

/// Writes one CSV per curve of the named figure family into `out_dir` and
/// returns the written files. Throws std::invalid_argument for an unknown name.
std::vector<WrittenFile> reproduce_figure(std::string_view name, const PipelineConfig& cfg,
                                          const std::filesystem::path& out_dir);

/// Curves of each family, without touching the filesystem.
[[nodiscard]] TimeSeries fig5_curve(const PipelineConfig& cfg);
[[nodiscard]] std::vector<TimeSeries> fig_circ_curves(const PipelineConfig& cfg);
[[nodiscard]] std::vector<TimeSeries> fig6_curves(const PipelineConfig& cfg);
[[nodiscard]] std::vector<TimeSeries> fig7_curves(const PipelineConfig& cfg);

/// Lowercase hex SHA-256 of a byte string.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Reads a whole file, throwing IoError on failure.
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

}  // namespace mcdds::pipeline
