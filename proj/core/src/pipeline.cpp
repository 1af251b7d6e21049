#include "mcdds/pipeline.hpp"

#include "mcdds/ecm_diffusion.hpp"
#include "mcdds/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#ifndef MCDDS_VERSION_STRING
#define MCDDS_VERSION_STRING "unknown"
#endif

namespace mcdds::pipeline {

using nlohmann::json;

namespace {

constexpr double kSecondsPerHour = 3600.0;
constexpr double kUmPerMm = 1000.0;

std::string shortest(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

template <typename F>
auto parallel_map(std::size_t n, F f) {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::future<R>> jobs;
    jobs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) jobs.push_back(std::async(std::launch::async, f, i));
    std::vector<R> out;
    out.reserve(n);
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

TimeGrid pk_grid(const PipelineConfig& cfg, double horizon_h) {
    return make_time_grid(0.0, horizon_h, cfg.grids.pk_dt_h, units::hour);
}

template <typename Writer>
std::string render(Writer&& w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_)) {
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    void add(const std::string& name, const std::string& text) {
        write_text(dir_ / name, text);
        files_.push_back({name, sha256_hex(text)});
    }

    void add_series(const std::string& name, const TimeSeries& s) {
        add(name, render([&](std::ostream& os) { write_csv(os, s); }));
    }

    [[nodiscard]] const std::vector<WrittenFile>& files() const noexcept { return files_; }
    [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<WrittenFile> files_;
};

std::vector<WrittenFile> write_run(const PipelineConfig& cfg, const PipelineOutput& out,
                                   OutputDir& dir) {
    dir.add_series("plasma.csv", out.stages.plasma);
    dir.add_series("circulation.csv", out.stages.circulation);
    dir.add_series("bbb.csv", out.stages.bbb);
    dir.add_series("source.csv", out.source);
    for (const EcmTrace& e : out.ecm) dir.add_series(distance_label("ecm_", e.r_mm), e.concentration);
    dir.add_series(distance_label("ecm_idrm_", cfg.ecm.r_idrm_mm), out.ecm_at_idrm);
    dir.add("receiver.csv", render([&](std::ostream& os) { rx::write_csv(os, out.reception); }));
    dir.add("idrm.csv", render([&](std::ostream& os) { idrm::write_csv(os, out.idrm); }));
    return dir.files();
}

}  // namespace

std::string distance_label(std::string_view prefix, double r_mm) {
    return std::string(prefix) + "r" + shortest(r_mm) + "mm.csv";
}

TimeSeries barrier_source(const TimeSeries& bbb, const PipelineConfig& cfg) {
    if (!(bbb.grid().unit() == units::hour)) {
        throw std::invalid_argument("barrier_source: post-BBB trace must be on an hour grid");
    }
    const TimeGrid grid = make_time_grid(0.0, cfg.grids.horizon_s(), cfg.grids.ecm_dt_s, units::second);
    const double step_h = cfg.grids.ecm_dt_s / kSecondsPerHour;
    std::vector<double> q(grid.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double t_h = std::min(grid.time(j) / kSecondsPerHour, bbb.grid().t_end());
        q[j] = std::max(sample_at(bbb, t_h), 0.0) * step_h * cfg.mg_to_molecules;
    }
    return TimeSeries(grid, std::move(q), units::molecules);
}

PipelineOutput compute_pipeline(const PipelineConfig& cfg) {
    pk::CascadeStages stages =
        pk::cascade_stages(cfg.regimen, cfg.g1, cfg.g2, cfg.g3, pk_grid(cfg, cfg.grids.horizon_h));
    TimeSeries source = barrier_source(stages.bbb, cfg);

    std::vector<double> radii = cfg.ecm.r_mm;
    const auto idrm_pos = std::find(radii.begin(), radii.end(), cfg.ecm.r_idrm_mm);
    const std::size_t idrm_index = static_cast<std::size_t>(idrm_pos - radii.begin());
    if (idrm_pos == radii.end()) radii.push_back(cfg.ecm.r_idrm_mm);

    std::vector<TimeSeries> conc = parallel_map(radii.size(), [&](std::size_t i) {
        return ecm::superpose_source(source, cfg.ecm.params, radii[i] * kUmPerMm);
    });
    std::vector<EcmTrace> ecm;
    for (std::size_t i = 0; i < cfg.ecm.r_mm.size(); ++i) ecm.push_back({radii[i], conc[i]});
    TimeSeries at_idrm = conc[idrm_index];

    const TimeGrid window = make_time_grid(cfg.window_start_s(), cfg.grids.horizon_s(),
                                           cfg.receiver.Ts_s, units::second);
    const TimeSeries ambient = resample(at_idrm, window);
    rx::ReceptionTrace reception =
        rx::simulate_reception(cfg.receiver_params(), ambient, RngSeed{cfg.seed});
    idrm::IdrmRun run =
        idrm::simulate(cfg.idrm_config(), ambient, cfg.pulse_train(), RngSeed{cfg.seed + 1});

    return PipelineOutput{std::move(stages), std::move(source), std::move(ecm), std::move(at_idrm),
                          std::move(reception), std::move(run)};
}

json run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
    const PipelineOutput out = compute_pipeline(cfg);
    OutputDir dir(out_dir);
    write_run(cfg, out, dir);

    PipelineConfig echo = cfg;
    echo.output_dir = out_dir.string();
    json files = json::array();
    for (const WrittenFile& f : dir.files()) files.push_back({{"name", f.name}, {"sha256", f.sha256}});
    json manifest = {
        {"generator", "mcdds"},
        {"version", MCDDS_VERSION_STRING},
        {"seed", cfg.seed},
        {"rng", cfg.rng},
        {"config", to_json(echo)},
        {"warnings", cfg.warnings},
        {"files", std::move(files)},
    };
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

PipelineConfig config_from_manifest(const json& manifest) {
    if (!manifest.is_object() || !manifest.contains("config")) {
        throw ConfigError({ConfigIssue{"config", "manifest has no config section"}});
    }
    return validate_config(manifest.at("config"));
}

TimeSeries fig5_curve(const PipelineConfig& cfg) {
    return pk::g1_impulse_response(cfg.g1, pk::kReferenceDoseMg, pk_grid(cfg, cfg.grids.horizon_h));
}

std::vector<TimeSeries> fig_circ_curves(const PipelineConfig& cfg) {
    const TimeSeries plasma = fig5_curve(cfg);
    std::vector<TimeSeries> out;
    for (double a : cfg.sweeps.a) out.push_back(pk::g2_apply(plasma, pk::G2Params{a, cfg.g2.T3}));
    return out;
}

std::vector<TimeSeries> fig6_curves(const PipelineConfig& cfg) {
    const TimeGrid grid = pk_grid(cfg, cfg.grids.fig6_horizon_h);
    const pk::Regimen dose = pk::Regimen::single(pk::kReferenceDoseMg);
    return parallel_map(cfg.sweeps.beta.size(), [&](std::size_t i) {
        return pk::cascade_response(dose, cfg.g1, cfg.g2, pk::G3Params{cfg.sweeps.beta[i]}, grid);
    });
}

std::vector<TimeSeries> fig7_curves(const PipelineConfig& cfg) {
    const TimeGrid grid =
        make_time_grid(0.0, cfg.grids.fig7_horizon_s, cfg.grids.fig7_dt_s, units::second);
    std::vector<TimeSeries> out;
    for (double r : cfg.ecm.r_mm) out.push_back(ecm::time_profile(cfg.ecm.params, 1.0, r * kUmPerMm, grid));
    return out;
}

std::vector<WrittenFile> reproduce_figure(std::string_view name, const PipelineConfig& cfg,
                                          const std::filesystem::path& out_dir) {
    if (std::find(std::begin(kFigureNames), std::end(kFigureNames), name) == std::end(kFigureNames)) {
        throw std::invalid_argument("unknown figure '" + std::string(name) +
                                    "'; expected fig5, fig_circ, fig6, fig7 or fig8");
    }
    if (name == "fig8") {
        const json manifest = run_pipeline(cfg, out_dir);
        std::vector<WrittenFile> files;
        for (const json& f : manifest.at("files")) files.push_back({f.at("name"), f.at("sha256")});
        return files;
    }

    OutputDir dir(out_dir);
    if (name == "fig5") {
        dir.add_series("fig5_plasma.csv", fig5_curve(cfg));
    } else if (name == "fig_circ") {
        const auto curves = fig_circ_curves(cfg);
        for (std::size_t i = 0; i < curves.size(); ++i) {
            dir.add_series("fig_circ_a" + shortest(cfg.sweeps.a[i]) + ".csv", curves[i]);
        }
    } else if (name == "fig6") {
        const auto curves = fig6_curves(cfg);
        for (std::size_t i = 0; i < curves.size(); ++i) {
            dir.add_series("fig6_beta" + shortest(cfg.sweeps.beta[i]) + ".csv", curves[i]);
        }
    } else {
        const auto curves = fig7_curves(cfg);
        for (std::size_t i = 0; i < curves.size(); ++i) {
            dir.add_series(distance_label("fig7_", cfg.ecm.r_mm[i]), curves[i]);
        }
    }
    return dir.files();
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("failed reading " + path.string());
    return ss.str();
}

}  // namespace mcdds::pipeline
