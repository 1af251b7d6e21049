// mcdds: command-line front end for the delivery-chain simulator.
//
//   mcdds pipeline      [--config f | --manifest f] [--out d] [--seed n] [--set k=v]...
//   mcdds figure NAME   [--config f] [--out d] [--set k=v]...
//   mcdds fit CSV       [--dose mg] [--starts n] [--out d]
//   mcdds receiver-demo [--config f] [--concentration c] [--duration s] [--out d]
//   mcdds idrm-demo     [--config f] [--concentration c] [--steps n] [--out d]
//
// Exit codes: 0 ok, 2 configuration or usage error, 3 numeric failure, 4 I/O error.

#include "mcdds/config.hpp"
#include "mcdds/ecm_diffusion.hpp"
#include "mcdds/errors.hpp"
#include "mcdds/estimation.hpp"
#include "mcdds/idrm.hpp"
#include "mcdds/pipeline.hpp"
#include "mcdds/receiver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcdds;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct CommonOptions {
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_manifest) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    if (with_manifest) {
        cmd->add_option("--manifest", o.manifest_path, "repeat the run recorded in a manifest.json")
            ->check(CLI::ExistingFile);
    }
    cmd->add_option("--out", o.out_dir, "output directory (overrides output_dir)");
    cmd->add_option("--seed", o.seed, "RNG seed (overrides seed)");
    cmd->add_option("--set", o.overrides, "dotted-path override, e.g. --set g2.a=0.35");
}

pipeline::PipelineConfig load_config(const CommonOptions& o) {
    json raw = json::object();
    if (!o.manifest_path.empty()) {
        const json manifest = json::parse(pipeline::read_text(o.manifest_path), nullptr, false);
        if (manifest.is_discarded() || !manifest.contains("config")) {
            throw ConfigError({ConfigIssue{"", o.manifest_path + " is not a run manifest"}});
        }
        raw = manifest.at("config");
    } else if (!o.config_path.empty()) {
        raw = json::parse(pipeline::read_text(o.config_path), nullptr, false);
        if (raw.is_discarded()) {
            throw ConfigError({ConfigIssue{"", o.config_path + " is not valid JSON"}});
        }
    }
    for (const std::string& kv : o.overrides) pipeline::apply_override(raw, kv);
    if (o.seed) raw["seed"] = *o.seed;
    if (!o.out_dir.empty() && raw.is_object()) raw["output_dir"] = o.out_dir;
    pipeline::PipelineConfig cfg = pipeline::validate_config(raw);
    for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    return cfg;
}

int cmd_pipeline(const CommonOptions& o) {
    const pipeline::PipelineConfig cfg = load_config(o);
    const json manifest = pipeline::run_pipeline(cfg, cfg.output_dir);
    for (const json& f : manifest.at("files")) {
        std::cout << f.at("sha256").get<std::string>() << "  " << f.at("name").get<std::string>() << '\n';
    }
    std::cout << "wrote " << manifest.at("files").size() << " traces and manifest.json to "
              << cfg.output_dir << '\n';
    return kOk;
}

int cmd_figure(const std::string& name, const CommonOptions& o) {
    const pipeline::PipelineConfig cfg = load_config(o);
    for (const pipeline::WrittenFile& f : pipeline::reproduce_figure(name, cfg, cfg.output_dir)) {
        std::cout << f.sha256 << "  " << (fs::path(cfg.output_dir) / f.name).string() << '\n';
    }
    return kOk;
}

std::vector<fit::PlasmaSample> read_samples(const std::string& path) {
    std::istringstream in(pipeline::read_text(path));
    std::string line;
    std::vector<fit::PlasmaSample> out;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        double t = 0.0;
        double v = 0.0;
        const bool ok = comma != std::string::npos &&
                        std::from_chars(line.data(), line.data() + comma, t).ec == std::errc{} &&
                        std::from_chars(line.data() + comma + 1, line.data() + line.size(), v).ec ==
                            std::errc{};
        if (!ok) {
            if (lineno == 1) continue;  // header, normally "t_hours,value"
            throw ConfigError({ConfigIssue{path + ":" + std::to_string(lineno),
                                           "expected two numbers separated by a comma"}});
        }
        out.push_back({t, v});
    }
    return out;
}

int cmd_fit(const std::string& csv, double dose, std::size_t starts, std::uint64_t seed,
            const std::string& out_dir) {
    const std::vector<fit::PlasmaSample> data = read_samples(csv);
    std::vector<pk::G1Params> inits{pk::G1Params{}};
    if (starts > 1) {
        auto more = fit::perturbed_starts(pk::G1Params{}, starts - 1, 0.5, RngSeed{seed});
        inits.insert(inits.end(), more.begin(), more.end());
    }
    const fit::FitResult r = fit::fit_g1_multistart(data, dose, inits);
    const json j = {{"k", r.params.k},   {"T1", r.params.T1},   {"T2", r.params.T2},
                    {"T0", r.params.T0}, {"sse", r.sse},        {"converged", r.converged},
                    {"iterations", r.iterations}};
    std::cout << j.dump(2) << '\n';
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        pipeline::write_text(fs::path(out_dir) / "fit.json", j.dump(2) + "\n");
    }
    return kOk;
}

TimeSeries constant_trace(double start_s, double duration_s, double dt_s, double c) {
    const TimeGrid grid = make_time_grid(start_s, start_s + duration_s, dt_s, units::second);
    return TimeSeries(grid, std::vector<double>(grid.size(), c), units::molecules_per_um3);
}

double default_concentration(const pipeline::PipelineConfig& cfg) {
    return ecm::steady_state(cfg.ecm.params, 1.0, cfg.ecm.r_idrm_mm * 1000.0);
}

int cmd_receiver_demo(const CommonOptions& o, std::optional<double> conc, double duration) {
    const pipeline::PipelineConfig cfg = load_config(o);
    const double c = conc.value_or(default_concentration(cfg));
    const TimeSeries trace = constant_trace(0.0, duration, cfg.receiver.Ts_s, c);
    const rx::ReceptionTrace rec = rx::simulate_reception(cfg.receiver_params(), trace, RngSeed{cfg.seed});
    fs::create_directories(cfg.output_dir);
    std::ostringstream os;
    rx::write_csv(os, rec);
    pipeline::write_text(fs::path(cfg.output_dir) / "receiver_demo.csv", os.str());
    std::uint64_t total = 0;
    for (std::uint64_t a : rec.arrivals) total += a;
    std::cout << json{{"concentration", c},
                      {"samples", rec.arrivals.size()},
                      {"final_lambda", rec.lambda[rec.lambda.size() - 1]},
                      {"total_arrivals", total}}
                     .dump(2)
              << '\n';
    return kOk;
}

int cmd_idrm_demo(const CommonOptions& o, std::optional<double> conc, std::size_t steps) {
    const pipeline::PipelineConfig cfg = load_config(o);
    const double c = conc.value_or(default_concentration(cfg));
    const double ts = cfg.receiver.Ts_s;
    const double duration = static_cast<double>(steps - 1) * ts;
    const TimeSeries trace = constant_trace(0.0, duration, ts, c);
    const auto pulses = idrm::EndogenousPulseTrain::periodic(
        cfg.idrm.pulse_period_s, cfg.idrm.pulse_period_s, trace.grid().t_end(), cfg.idrm.pulse_amplitude);
    const idrm::IdrmRun run = idrm::simulate(cfg.idrm_config(), trace, pulses, RngSeed{cfg.seed});
    fs::create_directories(cfg.output_dir);
    std::ostringstream os;
    idrm::write_csv(os, run);
    pipeline::write_text(fs::path(cfg.output_dir) / "idrm_demo.csv", os.str());
    const idrm::IdrmState& s = run.final_state;
    std::cout << json{{"steps", run.records.size()},
                      {"stored", s.stored},
                      {"absorbed_total", s.absorbed_total},
                      {"released_total", s.released_total},
                      {"overflow_total", s.overflow_total}}
                     .dump(2)
              << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate drug delivery from oral dose to an implanted dopamine modulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(MCDDS_VERSION_STRING));

    CommonOptions common;

    CLI::App* pipe = app.add_subcommand("pipeline", "run the full chain and write every trace");
    add_common(pipe, common, true);

    std::string figure_name;
    CLI::App* figure = app.add_subcommand("figure", "write the curves of one figure family");
    figure->add_option("name", figure_name, "fig5, fig_circ, fig6, fig7 or fig8")->required();
    add_common(figure, common, false);

    std::string fit_csv;
    double fit_dose = pk::kReferenceDoseMg;
    std::size_t fit_starts = 1;
    std::uint64_t fit_seed = 1;
    std::string fit_out;
    CLI::App* fitcmd = app.add_subcommand("fit", "fit plasma parameters to t_hours,value samples");
    fitcmd->add_option("csv", fit_csv, "CSV file with columns t_hours,value")
        ->required()
        ->check(CLI::ExistingFile);
    fitcmd->add_option("--dose", fit_dose, "dose behind the samples, mg")->check(CLI::PositiveNumber);
    fitcmd->add_option("--starts", fit_starts, "number of starting points")->check(CLI::Range(1, 64));
    fitcmd->add_option("--seed", fit_seed, "seed for the extra starting points");
    fitcmd->add_option("--out", fit_out, "also write fit.json into this directory");

    std::optional<double> demo_conc;
    double demo_duration = 60.0;
    std::size_t demo_steps = 10000;
    CLI::App* rxdemo = app.add_subcommand("receiver-demo", "reception under a constant concentration");
    add_common(rxdemo, common, false);
    rxdemo->add_option("--concentration", demo_conc, "molecules/um^3 (default: unit-source steady state)");
    rxdemo->add_option("--duration", demo_duration, "seconds")->check(CLI::PositiveNumber);

    CLI::App* idemo = app.add_subcommand("idrm-demo", "IDRM under a constant concentration");
    add_common(idemo, common, false);
    idemo->add_option("--concentration", demo_conc, "molecules/um^3 (default: unit-source steady state)");
    idemo->add_option("--steps", demo_steps, "number of sampling periods")->check(CLI::Range(2, 100000000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*pipe) return cmd_pipeline(common);
        if (*figure) return cmd_figure(figure_name, common);
        if (*fitcmd) return cmd_fit(fit_csv, fit_dose, fit_starts, fit_seed, fit_out);
        if (*rxdemo) return cmd_receiver_demo(common, demo_conc, demo_duration);
        if (*idemo) return cmd_idrm_demo(common, demo_conc, demo_steps);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error:\n";
        for (const ConfigIssue& i : e.issues()) {
            std::cerr << "  " << (i.path.empty() ? "<root>" : i.path) << ": " << i.message << '\n';
        }
        return kConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}
