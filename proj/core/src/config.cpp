#include "mcdds/config.hpp"

#include "mcdds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>

namespace mcdds::pipeline {

using nlohmann::json;

namespace {

std::string join(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

class Reader {
public:
    explicit Reader(std::vector<ConfigIssue>& issues) : issues_(issues) {}

    void fail(const std::string& path, std::string message) {
        issues_.push_back({path, std::move(message)});
    }

    void check(bool ok, const std::string& path, std::string message) {
        if (!ok) fail(path, std::move(message));
    }

    /// The object at `key`, or nullptr when absent. Flags non-objects and unknown keys.
    const json* section(const json& parent, const std::string& path, std::string_view key,
                        std::initializer_list<std::string_view> allowed) {
        const std::string p = join(path, key);
        const auto it = parent.find(key);
        if (it == parent.end()) return nullptr;
        if (!it->is_object()) {
            fail(p, "must be an object");
            return nullptr;
        }
        unknown_keys(*it, p, allowed);
        return &*it;
    }

    void unknown_keys(const json& obj, const std::string& path,
                      std::initializer_list<std::string_view> allowed) {
        for (const auto& [key, value] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(join(path, key), "unknown key");
            }
        }
    }

    void number(const json* obj, const std::string& path, std::string_view key, double& out) {
        if (obj == nullptr) return;
        const auto it = obj->find(key);
        if (it == obj->end()) return;
        if (!it->is_number()) {
            fail(join(path, key), "must be a number");
            return;
        }
        const double v = it->get<double>();
        if (!std::isfinite(v)) {
            fail(join(path, key), "must be finite");
            return;
        }
        out = v;
    }

    void count(const json* obj, const std::string& path, std::string_view key, std::uint64_t& out) {
        if (obj == nullptr) return;
        const auto it = obj->find(key);
        if (it == obj->end()) return;
        if (auto v = as_count(*it)) {
            out = *v;
        } else {
            fail(join(path, key), "must be a nonnegative integer");
        }
    }

    void string(const json* obj, const std::string& path, std::string_view key, std::string& out) {
        if (obj == nullptr) return;
        const auto it = obj->find(key);
        if (it == obj->end()) return;
        if (!it->is_string()) {
            fail(join(path, key), "must be a string");
            return;
        }
        out = it->get<std::string>();
    }

    void numbers(const json* obj, const std::string& path, std::string_view key,
                 std::vector<double>& out) {
        if (obj == nullptr) return;
        const auto it = obj->find(key);
        if (it == obj->end()) return;
        const std::string p = join(path, key);
        if (!it->is_array()) {
            fail(p, "must be an array of numbers");
            return;
        }
        std::vector<double> v;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& e = (*it)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(p + "." + std::to_string(i), "must be a finite number");
                return;
            }
            v.push_back(e.get<double>());
        }
        out = std::move(v);
    }

    static std::optional<std::uint64_t> as_count(const json& v) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            const auto i = v.get<std::int64_t>();
            if (i >= 0) return static_cast<std::uint64_t>(i);
            return std::nullopt;
        }
        // 1e6 parses as a float; accept it when it is an exact integer.
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && d <= 0x1.0p53 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
        }
        return std::nullopt;
    }

private:
    std::vector<ConfigIssue>& issues_;
};

void read_regimen(Reader& rd, const json& root, PipelineConfig& cfg) {
    const auto it = root.find("regimen");
    if (it == root.end()) return;
    if (!it->is_array()) {
        rd.fail("regimen", "must be an array of {time_h, dose_mg} objects");
        return;
    }
    std::vector<pk::DoseEvent> events;
    bool ok = true;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = "regimen." + std::to_string(i);
        const json& e = (*it)[i];
        if (!e.is_object()) {
            rd.fail(p, "must be an object");
            ok = false;
            continue;
        }
        rd.unknown_keys(e, p, {"time_h", "dose_mg"});
        pk::DoseEvent ev{0.0, pk::kReferenceDoseMg};
        rd.number(&e, p, "time_h", ev.time_h);
        rd.number(&e, p, "dose_mg", ev.dose_mg);
        if (!(ev.dose_mg > 0.0)) {
            rd.fail(p + ".dose_mg", "must be > 0");
            ok = false;
        }
        if (!(ev.time_h >= 0.0)) {
            rd.fail(p + ".time_h", "must be >= 0");
            ok = false;
        }
        if (!events.empty() && ev.time_h < events.back().time_h) {
            rd.fail(p + ".time_h", "dose times must be non-decreasing");
            ok = false;
        }
        events.push_back(ev);
    }
    if (ok) cfg.regimen = pk::Regimen(std::move(events));
}

void read_idrm(Reader& rd, const json& root, PipelineConfig& cfg) {
    const json* s = rd.section(root, "", "idrm",
                               {"capacity", "release_quantum", "detection_threshold",
                                "release_law", "initial_stored", "pulses", "pulse_period_s",
                                "pulse_amplitude"});
    IdrmSection& d = cfg.idrm;
    rd.count(s, "idrm", "capacity", d.capacity);
    rd.count(s, "idrm", "release_quantum", d.release_quantum);
    rd.number(s, "idrm", "detection_threshold", d.detection_threshold);
    rd.count(s, "idrm", "initial_stored", d.initial_stored);
    rd.number(s, "idrm", "pulse_period_s", d.pulse_period_s);
    rd.number(s, "idrm", "pulse_amplitude", d.pulse_amplitude);
    std::string law = d.release_law == idrm::ReleaseLaw::quantum ? "quantum" : "proportional";
    rd.string(s, "idrm", "release_law", law);
    if (law == "quantum") {
        d.release_law = idrm::ReleaseLaw::quantum;
    } else if (law == "proportional") {
        d.release_law = idrm::ReleaseLaw::proportional;
    } else {
        rd.fail("idrm.release_law", "must be \"quantum\" or \"proportional\"");
    }
    if (s == nullptr) return;
    const auto it = s->find("pulses");
    if (it == s->end()) return;
    if (!it->is_array()) {
        rd.fail("idrm.pulses", "must be an array of {time_s, amplitude} objects");
        return;
    }
    d.pulses.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = "idrm.pulses." + std::to_string(i);
        const json& e = (*it)[i];
        if (!e.is_object()) {
            rd.fail(p, "must be an object");
            continue;
        }
        rd.unknown_keys(e, p, {"time_s", "amplitude"});
        idrm::EndogenousPulse pulse{};
        pulse.amplitude = -1.0;
        pulse.time_s = std::numeric_limits<double>::quiet_NaN();
        rd.number(&e, p, "time_s", pulse.time_s);
        rd.number(&e, p, "amplitude", pulse.amplitude);
        rd.check(pulse.amplitude > 0.0, p + ".amplitude", "must be > 0");
        rd.check(std::isfinite(pulse.time_s), p + ".time_s", "is required");
        if (!d.pulses.empty() && std::isfinite(pulse.time_s)) {
            rd.check(pulse.time_s > d.pulses.back().time_s, p + ".time_s",
                     "pulse times must be strictly increasing");
        }
        d.pulses.push_back(pulse);
    }
}

void check_all(Reader& rd, PipelineConfig& cfg) {
    const pk::G1Params& g1 = cfg.g1;
    rd.check(g1.k > 0.0, "g1.k", "must be > 0");
    rd.check(g1.T1 > 0.0, "g1.T1", "must be > 0");
    rd.check(g1.T2 > 0.0, "g1.T2", "must be > 0");
    rd.check(g1.T0 >= 0.0, "g1.T0", "must be >= 0");
    rd.check(std::abs(g1.T1 - g1.T2) >= pk::kConfluentTolerance, "g1.T2",
             "must differ from g1.T1 (confluent poles are not supported)");
    rd.check(cfg.g2.a > 0.0 && cfg.g2.a < 1.0, "g2.a", "must lie in the open interval (0, 1)");
    rd.check(cfg.g2.T3 >= 0.0, "g2.T3", "must be >= 0");
    rd.check(cfg.g3.beta > 0.0, "g3.beta", "must be > 0");

    rd.check(!cfg.sweeps.a.empty(), "sweeps.a", "must not be empty");
    for (std::size_t i = 0; i < cfg.sweeps.a.size(); ++i) {
        const double a = cfg.sweeps.a[i];
        rd.check(a > 0.0 && a < 1.0, "sweeps.a." + std::to_string(i), "must lie in (0, 1)");
    }
    rd.check(!cfg.sweeps.beta.empty(), "sweeps.beta", "must not be empty");
    for (std::size_t i = 0; i < cfg.sweeps.beta.size(); ++i) {
        rd.check(cfg.sweeps.beta[i] > 0.0, "sweeps.beta." + std::to_string(i), "must be > 0");
    }

    const ecm::EcmParams& e = cfg.ecm.params;
    rd.check(e.D > 0.0, "ecm.D", "must be > 0");
    rd.check(e.alpha > 0.0 && e.alpha <= 1.0, "ecm.alpha", "must lie in (0, 1]");
    rd.check(e.lambda_tort >= 1.0, "ecm.lambda", "must be >= 1");
    if (e.alpha > 0.0 && e.alpha <= 1.0 && (e.alpha < ecm::kAlphaMin || e.alpha > ecm::kAlphaMax)) {
        cfg.warnings.push_back("ecm.alpha = " + format_double(e.alpha) +
                               " lies outside the physiological range [0.1, 0.3]");
    }
    rd.check(!cfg.ecm.r_mm.empty(), "ecm.r_mm", "must not be empty");
    for (std::size_t i = 0; i < cfg.ecm.r_mm.size(); ++i) {
        rd.check(cfg.ecm.r_mm[i] > 0.0, "ecm.r_mm." + std::to_string(i), "must be > 0");
    }
    rd.check(cfg.ecm.r_idrm_mm > 0.0, "ecm.r_idrm_mm", "must be > 0");

    const Grids& g = cfg.grids;
    rd.check(g.pk_dt_h > 0.0, "grids.pk_dt_h", "must be > 0");
    rd.check(g.ecm_dt_s > 0.0, "grids.ecm_dt_s", "must be > 0");
    rd.check(g.horizon_h > 0.0, "grids.horizon_h", "must be > 0");
    rd.check(g.fig6_horizon_h > 0.0, "grids.fig6_horizon_h", "must be > 0");
    rd.check(g.fig7_dt_s > 0.0, "grids.fig7_dt_s", "must be > 0");
    rd.check(g.fig7_horizon_s > g.fig7_dt_s, "grids.fig7_horizon_s", "must exceed grids.fig7_dt_s");
    if (g.pk_dt_h > 0.0 && g.horizon_h > 0.0) {
        rd.check(g.pk_dt_h < g.horizon_h, "grids.pk_dt_h", "must be smaller than grids.horizon_h");
        rd.check(g.pk_dt_h < g.fig6_horizon_h, "grids.pk_dt_h",
                 "must be smaller than grids.fig6_horizon_h");
    }
    if (g.ecm_dt_s > 0.0 && g.horizon_h > 0.0) {
        rd.check(g.ecm_dt_s < g.horizon_s(), "grids.ecm_dt_s", "must be smaller than the horizon");
    }
    if (!cfg.regimen.empty() && g.horizon_h > 0.0) {
        rd.check(cfg.regimen.events().back().time_h <= g.horizon_h, "regimen",
                 "last dose lies beyond grids.horizon_h");
    }

    const ReceiverSection& r = cfg.receiver;
    rd.check(r.d_rx_um > 0.0, "receiver.d_rx_um", "must be > 0");
    rd.check(r.Ts_s > 0.0, "receiver.Ts_s", "must be > 0");
    rd.check(r.lambda_noise >= 0.0, "receiver.lambda_noise", "must be >= 0");
    rd.check(r.v_norm_um3 > 0.0, "receiver.v_norm_um3", "must be > 0");
    rd.check(r.window_s > 0.0, "receiver.window_s", "must be > 0");
    if (r.window_s > 0.0 && g.horizon_h > 0.0) {
        rd.check(r.window_s <= g.horizon_s(), "receiver.window_s", "must not exceed the horizon");
    }
    if (r.window_s > 0.0 && r.Ts_s > 0.0) {
        rd.check(r.Ts_s < r.window_s, "receiver.Ts_s", "must be smaller than receiver.window_s");
    }

    const IdrmSection& d = cfg.idrm;
    rd.check(d.capacity > 0, "idrm.capacity", "must be > 0");
    rd.check(d.release_quantum > 0 && d.release_quantum <= d.capacity, "idrm.release_quantum",
             "must lie in (0, idrm.capacity]");
    rd.check(d.detection_threshold > 0.0, "idrm.detection_threshold", "must be > 0");
    rd.check(d.initial_stored <= d.capacity, "idrm.initial_stored", "must not exceed idrm.capacity");
    rd.check(d.pulse_period_s > 0.0, "idrm.pulse_period_s", "must be > 0");
    rd.check(d.pulse_amplitude > 0.0, "idrm.pulse_amplitude", "must be > 0");
    const double w0 = cfg.window_start_s();
    const double w1 = g.horizon_s();
    for (std::size_t i = 0; i < d.pulses.size(); ++i) {
        const double t = d.pulses[i].time_s;
        rd.check(!std::isfinite(t) || (t >= w0 && t <= w1), "idrm.pulses." + std::to_string(i) + ".time_s",
                 "must lie inside the receiver window [" + format_double(w0) + ", " +
                     format_double(w1) + "] s");
    }

    rd.check(cfg.mg_to_molecules > 0.0, "conversion.mg_to_molecules", "must be > 0");
    rd.check(cfg.rng == kRngName, "rng", "only \"" + std::string(kRngName) + "\" is supported");
    rd.check(!cfg.output_dir.empty(), "output_dir", "must not be empty");
}

}  // namespace

rx::ReceiverParams PipelineConfig::receiver_params() const {
    return rx::ReceiverParams{receiver.d_rx_um, receiver.Ts_s, receiver.lambda_noise, ecm.params.D,
                              receiver.v_norm_um3};
}

idrm::IdrmConfig PipelineConfig::idrm_config() const {
    return idrm::IdrmConfig{idrm.capacity,   idrm.release_quantum, idrm.detection_threshold,
                            idrm.release_law, idrm.initial_stored, receiver_params()};
}

idrm::EndogenousPulseTrain PipelineConfig::pulse_train() const {
    if (!idrm.pulses.empty()) return idrm::EndogenousPulseTrain(idrm.pulses);
    return idrm::EndogenousPulseTrain::periodic(window_start_s() + idrm.pulse_period_s,
                                                idrm.pulse_period_s, grids.horizon_s(),
                                                idrm.pulse_amplitude);
}

PipelineConfig validate_config(std::string_view raw) {
    json parsed;
    try {
        parsed = json::parse(raw.begin(), raw.end());
    } catch (const json::parse_error& e) {
        throw ConfigError({ConfigIssue{"", std::string("malformed JSON: ") + e.what()}});
    }
    return validate_config(parsed);
}

PipelineConfig validate_config(const json& root) {
    std::vector<ConfigIssue> issues;
    if (!root.is_object()) {
        throw ConfigError({ConfigIssue{"", "configuration must be a JSON object"}});
    }
    Reader rd(issues);
    PipelineConfig cfg;
    rd.unknown_keys(root, "",
                    {"regimen", "g1", "g2", "g3", "sweeps", "ecm", "receiver", "idrm",
                     "conversion", "grids", "seed", "rng", "output_dir"});

    read_regimen(rd, root, cfg);

    const json* g1 = rd.section(root, "", "g1", {"k", "T1", "T2", "T0"});
    rd.number(g1, "g1", "k", cfg.g1.k);
    rd.number(g1, "g1", "T1", cfg.g1.T1);
    rd.number(g1, "g1", "T2", cfg.g1.T2);
    rd.number(g1, "g1", "T0", cfg.g1.T0);
    const json* g2 = rd.section(root, "", "g2", {"a", "T3"});
    rd.number(g2, "g2", "a", cfg.g2.a);
    rd.number(g2, "g2", "T3", cfg.g2.T3);
    const json* g3 = rd.section(root, "", "g3", {"beta"});
    rd.number(g3, "g3", "beta", cfg.g3.beta);

    const json* sw = rd.section(root, "", "sweeps", {"a", "beta"});
    rd.numbers(sw, "sweeps", "a", cfg.sweeps.a);
    rd.numbers(sw, "sweeps", "beta", cfg.sweeps.beta);

    const json* ecm = rd.section(root, "", "ecm", {"D", "alpha", "lambda", "r_mm", "r_idrm_mm"});
    rd.number(ecm, "ecm", "D", cfg.ecm.params.D);
    rd.number(ecm, "ecm", "alpha", cfg.ecm.params.alpha);
    rd.number(ecm, "ecm", "lambda", cfg.ecm.params.lambda_tort);
    rd.numbers(ecm, "ecm", "r_mm", cfg.ecm.r_mm);
    rd.number(ecm, "ecm", "r_idrm_mm", cfg.ecm.r_idrm_mm);

    const json* rcv = rd.section(root, "", "receiver",
                                 {"d_rx_um", "Ts_s", "lambda_noise", "v_norm_um3", "window_s"});
    rd.number(rcv, "receiver", "d_rx_um", cfg.receiver.d_rx_um);
    rd.number(rcv, "receiver", "Ts_s", cfg.receiver.Ts_s);
    rd.number(rcv, "receiver", "lambda_noise", cfg.receiver.lambda_noise);
    rd.number(rcv, "receiver", "v_norm_um3", cfg.receiver.v_norm_um3);
    rd.number(rcv, "receiver", "window_s", cfg.receiver.window_s);

    read_idrm(rd, root, cfg);

    const json* conv = rd.section(root, "", "conversion", {"mg_to_molecules"});
    rd.number(conv, "conversion", "mg_to_molecules", cfg.mg_to_molecules);

    const json* grids = rd.section(root, "", "grids",
                                   {"pk_dt_h", "ecm_dt_s", "horizon_h", "fig6_horizon_h",
                                    "fig7_dt_s", "fig7_horizon_s"});
    rd.number(grids, "grids", "pk_dt_h", cfg.grids.pk_dt_h);
    rd.number(grids, "grids", "ecm_dt_s", cfg.grids.ecm_dt_s);
    rd.number(grids, "grids", "horizon_h", cfg.grids.horizon_h);
    rd.number(grids, "grids", "fig6_horizon_h", cfg.grids.fig6_horizon_h);
    rd.number(grids, "grids", "fig7_dt_s", cfg.grids.fig7_dt_s);
    rd.number(grids, "grids", "fig7_horizon_s", cfg.grids.fig7_horizon_s);

    rd.count(&root, "", "seed", cfg.seed);
    rd.string(&root, "", "rng", cfg.rng);
    rd.string(&root, "", "output_dir", cfg.output_dir);

    check_all(rd, cfg);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

json to_json(const PipelineConfig& cfg) {
    json regimen = json::array();
    for (const pk::DoseEvent& e : cfg.regimen.events()) {
        regimen.push_back({{"time_h", e.time_h}, {"dose_mg", e.dose_mg}});
    }
    json idrm = {
        {"capacity", cfg.idrm.capacity},
        {"release_quantum", cfg.idrm.release_quantum},
        {"detection_threshold", cfg.idrm.detection_threshold},
        {"release_law", cfg.idrm.release_law == idrm::ReleaseLaw::quantum ? "quantum" : "proportional"},
        {"initial_stored", cfg.idrm.initial_stored},
        {"pulse_period_s", cfg.idrm.pulse_period_s},
        {"pulse_amplitude", cfg.idrm.pulse_amplitude},
    };
    if (!cfg.idrm.pulses.empty()) {
        json pulses = json::array();
        for (const idrm::EndogenousPulse& p : cfg.idrm.pulses) {
            pulses.push_back({{"time_s", p.time_s}, {"amplitude", p.amplitude}});
        }
        idrm["pulses"] = std::move(pulses);
    }
    return json{
        {"regimen", std::move(regimen)},
        {"g1", {{"k", cfg.g1.k}, {"T1", cfg.g1.T1}, {"T2", cfg.g1.T2}, {"T0", cfg.g1.T0}}},
        {"g2", {{"a", cfg.g2.a}, {"T3", cfg.g2.T3}}},
        {"g3", {{"beta", cfg.g3.beta}}},
        {"sweeps", {{"a", cfg.sweeps.a}, {"beta", cfg.sweeps.beta}}},
        {"ecm",
         {{"D", cfg.ecm.params.D},
          {"alpha", cfg.ecm.params.alpha},
          {"lambda", cfg.ecm.params.lambda_tort},
          {"r_mm", cfg.ecm.r_mm},
          {"r_idrm_mm", cfg.ecm.r_idrm_mm}}},
        {"receiver",
         {{"d_rx_um", cfg.receiver.d_rx_um},
          {"Ts_s", cfg.receiver.Ts_s},
          {"lambda_noise", cfg.receiver.lambda_noise},
          {"v_norm_um3", cfg.receiver.v_norm_um3},
          {"window_s", cfg.receiver.window_s}}},
        {"idrm", std::move(idrm)},
        {"conversion", {{"mg_to_molecules", cfg.mg_to_molecules}}},
        {"grids",
         {{"pk_dt_h", cfg.grids.pk_dt_h},
          {"ecm_dt_s", cfg.grids.ecm_dt_s},
          {"horizon_h", cfg.grids.horizon_h},
          {"fig6_horizon_h", cfg.grids.fig6_horizon_h},
          {"fig7_dt_s", cfg.grids.fig7_dt_s},
          {"fig7_horizon_s", cfg.grids.fig7_horizon_s}}},
        {"seed", cfg.seed},
        {"rng", cfg.rng},
        {"output_dir", cfg.output_dir},
    };
}

void apply_override(json& raw, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError({ConfigIssue{std::string(assignment), "override must look like path.to.key=value"}});
    }
    const std::string path(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &raw;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError({ConfigIssue{path, "empty path segment in override"}});
        json* next = nullptr;
        if (node->is_array()) {
            const bool numeric = std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
            const std::size_t idx = numeric ? std::stoul(key) : node->size() + 1;
            if (!numeric || idx > node->size()) {
                throw ConfigError({ConfigIssue{path, "array index '" + key + "' is out of range"}});
            }
            if (idx == node->size()) node->push_back(json::object());
            next = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) {
                throw ConfigError({ConfigIssue{path, "cannot descend into a non-object at '" + key + "'"}});
            }
            next = &(*node)[key];
        }
        if (dot == std::string::npos) {
            *next = std::move(value);
            return;
        }
        node = next;
        start = dot + 1;
    }
}

}  // namespace mcdds::pipeline
