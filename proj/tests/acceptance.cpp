// Acceptance suite: one PASS/FAIL line per criterion.
//
//   mcdds_acceptance              run every criterion
//   mcdds_acceptance --criterion N
//
// Exit status is the number of failed criteria (capped at 1 per criterion run).

#include "oracles.hpp"

#include "mcdds/ecm_diffusion.hpp"
#include "mcdds/estimation.hpp"
#include "mcdds/idrm.hpp"
#include "mcdds/pipeline.hpp"
#include "mcdds/receiver.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace mcdds;
namespace fs = std::filesystem;

namespace {

// Tolerances, as stated by the criteria.
constexpr double kPeakTimeTol = 0.002;       // h
constexpr double kG1IntegralTol = 1e-3;      // relative
constexpr double kCascadeErrTol = 1e-3;      // times the peak
constexpr double kCascadeRatioMin = 3.0;
constexpr double kDcGainTol = 0.005;         // relative spread of integrals
constexpr double kSteadyTol = 1e-3;          // relative
constexpr double kErfcAbsTol = 1e-12;
constexpr double kReflectionTol = 1e-13;
constexpr double kVarianceTol = 0.05;        // relative
constexpr double kChiSquareAlpha = 0.001;
constexpr double kPObsRelTol = 1e-6;
constexpr double kFitNoiselessTol = 0.01;
constexpr double kFitNoisyTol = 0.10;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [X]");
        pass = pass && ok;
    }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

pipeline::PipelineConfig defaults() { return pipeline::validate_config("{}"); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    const auto c = defaults();
    o.check(c.g1.k == 1418.0 && c.g1.T1 == 0.0547 && c.g1.T2 == 0.6073 && c.g1.T0 == 0.2461,
            "G1 k/T1/T2/T0");
    o.check(c.g2.T3 == 0.2, "T3");
    o.check(c.sweeps.a == std::vector<double>{0.25, 0.35, 0.50, 0.60, 0.75}, "a sweep");
    o.check(c.sweeps.beta == std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5}, "beta sweep");
    o.check(c.ecm.params.alpha == 0.2 && c.ecm.params.D == 15.0 && c.ecm.params.lambda_tort == 1.6,
            "alpha/D/lambda");
    o.check(c.ecm.r_mm == std::vector<double>{1.0, 1.2, 1.3, 1.4, 1.5}, "r sweep");
    return o;
}

Outcome criterion2() {
    Outcome o;
    const pk::G1Params p;
    const TimeGrid grid = make_time_grid(0.0, 50.0, 1e-3);
    const TimeSeries g = pk::g1_impulse_response(p, pk::kReferenceDoseMg, grid);
    bool zero = true;
    std::size_t i = 0;
    for (; grid.time(i) <= p.T0; ++i) zero = zero && g[i] == 0.0;
    o.check(zero, "zero on [0, T0]");

    const std::size_t peak = g.argmax();
    bool unimodal = true;
    for (std::size_t j = i + 1; j <= peak; ++j) unimodal = unimodal && g[j] > g[j - 1];
    for (std::size_t j = peak + 1; j < g.size(); ++j) unimodal = unimodal && g[j] < g[j - 1];
    o.check(unimodal, "unimodal");

    const double t_closed = oracle::g1_peak(p.T0, p.T1, p.T2);
    const double t_grid = grid.time(peak);
    o.check(std::abs(t_closed - 0.3908) <= kPeakTimeTol && std::abs(t_grid - 0.3908) <= kPeakTimeTol,
            "peak " + fmt(t_grid, 5) + " h (closed form " + fmt(t_closed, 5) + ")");
    const double area = g.integral();
    o.check(rel(area, 1418.0) <= kG1IntegralTol, "integral " + fmt(area, 7));
    return o;
}

double cascade_error(double dt, double* peak) {
    const pk::G1Params g1;
    const pk::G2Params g2;
    const pk::G3Params g3;
    const TimeGrid grid = make_time_grid(0.0, 12.0, dt);
    const TimeSeries num = pk::cascade_response(pk::Regimen::single(pk::kReferenceDoseMg), g1, g2, g3, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err = std::max(err, std::abs(num[i] - pk::analytic_cascade_impulse(g1, g2, g3, grid.time(i))));
    }
    if (peak) *peak = num.max();
    return err;
}

Outcome criterion3() {
    Outcome o;
    double peak = 0.0;
    const double e1 = cascade_error(1e-3, &peak);
    const double e2 = cascade_error(5e-4, nullptr);
    o.check(e1 <= kCascadeErrTol * peak, "max err " + fmt(e1 / peak) + " x peak at dt=1e-3");
    o.check(e1 / e2 >= kCascadeRatioMin, "halving ratio " + fmt(e1 / e2, 3));
    return o;
}

int crossings(const TimeSeries& lo_beta, const TimeSeries& hi_beta, bool* oriented) {
    int count = 0;
    int last = 0;
    int first = 0;
    for (std::size_t i = 0; i < lo_beta.size(); ++i) {
        const double d = hi_beta[i] - lo_beta[i];
        const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (first == 0) first = s;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    *oriented = first == 1 && last == -1;
    return count;
}

Outcome criterion4() {
    Outcome o;
    const auto cfg = defaults();
    const auto curves = pipeline::fig6_curves(cfg);
    double lo = HUGE_VAL;
    double hi = -HUGE_VAL;
    for (const auto& c : curves) {
        lo = std::min(lo, c.integral());
        hi = std::max(hi, c.integral());
    }
    o.check(hi / lo - 1.0 <= kDcGainTol, "integral spread " + fmt(hi / lo - 1.0));
    bool single = true;
    for (std::size_t a = 0; a < curves.size(); ++a) {
        for (std::size_t b = a + 1; b < curves.size(); ++b) {
            bool oriented = false;
            const int n = crossings(curves[a], curves[b], &oriented);
            single = single && n == 1 && oriented;
        }
    }
    o.check(single, "one crossing per beta pair");
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto cfg = defaults();
    const auto curves = pipeline::fig7_curves(cfg);
    bool ordered = true;
    for (std::size_t i = 1; i < curves[0].size(); ++i) {
        for (std::size_t k = 1; k < curves.size(); ++k) ordered = ordered && curves[k - 1][i] > curves[k][i];
    }
    o.check(ordered, "pointwise ordered in r");

    const std::size_t last = curves[0].size() - 1;
    std::string ratios;
    bool saturated = true;
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const double r_um = cfg.ecm.r_mm[k] * 1000.0;
        const double c_inf = oracle::ecm_steady(1.0, 15.0, 0.2, 1.6, r_um);
        const double ratio = curves[k][last] / c_inf;
        saturated = saturated && std::abs(ratio - 1.0) <= kSteadyTol;
        ratios += (k ? "," : "") + fmt(ratio, 4);
    }
    o.check(saturated, "c(1e7 s)/c_inf = {" + ratios + "}");

    const double spot = ecm::steady_state(cfg.ecm.params, 1.0, 1000.0);
    o.check(rel(spot, 6.791e-5) <= kSteadyTol, "c_inf(1 mm) " + fmt(spot, 5));
    return o;
}

Outcome criterion6() {
    Outcome o;
    double worst = 0.0;
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.0, 5.0}) worst = std::max(worst, std::abs(ecm::erfc(x) - oracle::erfc_wide(x)));
    o.check(worst <= kErfcAbsTol, "max abs err " + fmt(worst, 3));

    Rng rng(RngSeed{6});
    double refl = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = -6.0 + 12.0 * rng.uniform();
        refl = std::max(refl, std::abs(ecm::erfc(x) + ecm::erfc(-x) - 2.0));
    }
    o.check(refl <= kReflectionTol, "reflection " + fmt(refl, 3));
    return o;
}

Outcome criterion7() {
    Outcome o;
    const std::size_t n = 100000;
    for (double lambda : {0.5, 4.0, 20.0}) {
        Rng rng(RngSeed{static_cast<std::uint64_t>(lambda * 1000)});
        std::map<std::uint64_t, double> hist;
        double sum = 0.0;
        double sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = rx::sample_arrivals(lambda, rng);
            hist[k] += 1.0;
            sum += static_cast<double>(k);
            sum2 += static_cast<double>(k) * static_cast<double>(k);
        }
        const double nn = static_cast<double>(n);
        const double mean = sum / nn;
        const double var = (sum2 - nn * mean * mean) / (nn - 1.0);

        const boost::math::poisson_distribution<double> pois(lambda);
        const auto kmax = static_cast<std::uint64_t>(lambda + 12.0 * std::sqrt(lambda) + 20.0);
        std::vector<std::pair<double, double>> cells;
        double obs = 0.0;
        double ex = 0.0;
        for (std::uint64_t k = 0; k <= kmax; ++k) {
            obs += hist.count(k) ? hist[k] : 0.0;
            ex += nn * boost::math::pdf(pois, static_cast<double>(k));
            if (ex >= 5.0) {
                cells.emplace_back(obs, ex);
                obs = ex = 0.0;
            }
        }
        for (const auto& [k, c] : hist) if (k > kmax) obs += c;
        cells.back().first += obs;
        cells.back().second += ex + nn * boost::math::cdf(boost::math::complement(pois, static_cast<double>(kmax)));
        double chi2 = 0.0;
        for (const auto& [ob, e] : cells) chi2 += (ob - e) * (ob - e) / e;
        const boost::math::chi_squared_distribution<double> dist(static_cast<double>(cells.size() - 1));
        const double crit = boost::math::quantile(boost::math::complement(dist, kChiSquareAlpha));

        const std::string tag = "lambda=" + fmt(lambda, 2) + ": ";
        o.check(std::abs(mean - lambda) <= 3.0 * std::sqrt(lambda / nn), tag + "mean " + fmt(mean, 6));
        o.check(std::abs(var / lambda - 1.0) <= kVarianceTol, tag + "var/lambda " + fmt(var / lambda, 4));
        o.check(chi2 <= crit, tag + "chi2 " + fmt(chi2, 4) + " <= " + fmt(crit, 4));
    }
    // The quoted 1.6186e-3 carries five significant digits, so the 1e-6
    // relative tolerance is applied against the defining expression, and the
    // result must round to the quoted value.
    const double p = rx::p_obs(rx::ReceiverParams{}, 1.0, 1.0);
    const double exact = oracle::p_obs(1.0, 15.0, 1.0, 1.0);
    const bool rounds = std::abs(std::round(p * 1e7) - 16186.0) < 0.5;
    o.check(rel(p, exact) <= kPObsRelTol && rounds, "P_obs " + fmt(p, 8));
    return o;
}

Outcome criterion8() {
    Outcome o;
    const pk::G1Params truth;
    std::vector<double> uniform(25);
    for (std::size_t i = 0; i < 25; ++i) uniform[i] = 5.0 * static_cast<double>(i) / 24.0;
    const auto clean = fit::simulate_observations(truth, 125.0, uniform, 0.0, RngSeed{1});

    double worst = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        auto f = [&](int bit) { return (mask >> bit) & 1 ? 1.2 : 0.8; };
        const pk::G1Params init{truth.k * f(0), truth.T1 * f(1), truth.T2 * f(2), truth.T0 * f(3)};
        const fit::FitResult r = fit::fit_g1(clean, 125.0, init);
        worst = std::max({worst, rel(r.params.k, truth.k), rel(r.params.T1, truth.T1),
                          rel(r.params.T2, truth.T2), rel(r.params.T0, truth.T0)});
    }
    o.check(worst <= kFitNoiselessTol, "noiseless worst rel err " + fmt(worst, 3) + " over 16 +-20% starts");

    const auto schedule = fit::dense_early_schedule();
    double noisy = 0.0;
    double sse_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = fit::simulate_observations(truth, 125.0, schedule, 0.01, RngSeed{1000 + seed});
        const pk::G1Params init{truth.k * 1.2, truth.T1 * 0.8, truth.T2 * 1.2, truth.T0 * 0.8};
        const fit::FitResult r = fit::fit_g1(data, 125.0, init);
        noisy = std::max({noisy, rel(r.params.k, truth.k), rel(r.params.T1, truth.T1),
                          rel(r.params.T2, truth.T2), rel(r.params.T0, truth.T0)});
        sse_ratio = std::max(sse_ratio, r.sse / fit::sse(truth, data, 125.0));
    }
    o.check(noisy <= kFitNoisyTol, "1% noise worst rel err " + fmt(noisy, 3) + " over 20 seeds");
    o.check(sse_ratio <= 2.0, "sse / noise floor <= " + fmt(sse_ratio, 3));
    return o;
}

Outcome criterion9() {
    Outcome o;
    constexpr std::size_t kSteps = 1'000'000;
    const double ts = 0.1;
    const TimeGrid grid(0.0, ts, kSteps, units::second);

    idrm::IdrmConfig cfg;
    cfg.initial_stored = 990'000;
    // About 20 arrivals per step for the first half, then nothing, so the store
    // both overflows and drains empty. Pulses every 100 s alternate above and
    // below threshold.
    const double c = 20.0 / rx::p_obs(cfg.receiver, 1.0, ts);
    std::vector<idrm::EndogenousPulse> pulses;
    for (std::size_t k = 1; 1000 * k < kSteps; ++k) {
        pulses.push_back({grid.time(1000 * k), k % 2 ? 1e-5 : 1e-7});
    }
    std::vector<double> drive(kSteps, 0.0);
    std::fill(drive.begin(), drive.begin() + kSteps / 2, c);
    const TimeSeries ambient(grid, drive, units::molecules_per_um3);
    const idrm::IdrmRun run = idrm::simulate(cfg, ambient, idrm::EndogenousPulseTrain(pulses), RngSeed{9});

    std::vector<char> above(kSteps, 0);
    for (const auto& p : pulses) above[static_cast<std::size_t>(std::llround(p.time_s / ts))] = p.amplitude >= cfg.detection_threshold;
    bool conserved = true;
    bool bounded = true;
    bool gated = true;
    bool emptied = false;
    for (std::size_t i = 0; i < kSteps; ++i) {
        const idrm::StepRecord& r = run.records[i];
        conserved = conserved && r.absorbed_total + cfg.initial_stored == r.released_total + r.stored;
        bounded = bounded && r.stored <= cfg.capacity;
        gated = gated && (r.released_this_step == 0 || above[i]);
        emptied = emptied || r.stored == 0;
    }
    const auto& s = run.final_state;
    o.check(conserved && s.absorbed_total - s.released_total == s.stored - s.initial_stored,
            "conservation over 1e6 steps (absorbed " + std::to_string(s.absorbed_total) + ", released " +
                std::to_string(s.released_total) + ")");
    o.check(bounded, "0 <= S <= S_max");
    o.check(gated && s.released_total > 0, "releases only at above-threshold pulses");
    o.check(s.overflow_total > 0 && emptied,
            "capacity and empty-store clamps exercised (overflow " + std::to_string(s.overflow_total) + ")");

    // Held at the unit-source steady state: long-run release never exceeds intake.
    const double c_inf = ecm::steady_state(ecm::EcmParams{}, 1.0, 1300.0);
    const TimeSeries steady(grid, std::vector<double>(kSteps, c_inf), units::molecules_per_um3);
    idrm::IdrmConfig plain;
    const auto train = idrm::EndogenousPulseTrain::periodic(60.0, 60.0, grid.t_end(), 1e-5);
    const idrm::IdrmRun calm = idrm::simulate(plain, steady, train, RngSeed{10});
    o.check(calm.final_state.released_total <= calm.final_state.absorbed_total,
            "steady-state release " + std::to_string(calm.final_state.released_total) + " <= intake " +
                std::to_string(calm.final_state.absorbed_total));
    return o;
}

Outcome criterion10() {
    Outcome o;
    const auto cfg = defaults();
    const fs::path base = fs::temp_directory_path() / "mcdds_acceptance";
    fs::remove_all(base);
    const auto m1 = pipeline::run_pipeline(cfg, base / "a");
    const auto m2 = pipeline::run_pipeline(cfg, base / "b");
    bool identical = m1.at("files") == m2.at("files");
    for (const auto& f : m1.at("files")) {
        const std::string name = f.at("name");
        identical = identical && pipeline::read_text(base / "a" / name) == pipeline::read_text(base / "b" / name);
    }
    o.check(identical, "byte-identical CSVs (" + std::to_string(m1.at("files").size()) + " files)");

    const auto out = pipeline::compute_pipeline(cfg);
    const double p = out.stages.plasma.max();
    const double c = out.stages.circulation.max();
    const double b = out.stages.bbb.max();
    o.check(p > c && c > b, "peaks " + fmt(p) + " > " + fmt(c) + " > " + fmt(b));

    std::size_t first = 0;
    while (first < out.stages.bbb.size() && out.stages.bbb[first] == 0.0) ++first;
    const double t_first = out.stages.bbb.time(first);
    o.check(std::abs(t_first - 0.4461) <= cfg.grids.pk_dt_h + 1e-12, "first nonzero at " + fmt(t_first, 6) + " h");
    fs::remove_all(base);
    return o;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "reference parameter fidelity", criterion1},
        {2, "plasma impulse shape", criterion2},
        {3, "analytic/numeric cascade agreement", criterion3},
        {4, "BBB sweep: unit DC gain and single crossings", criterion4},
        {5, "ECM sweep: ordering and steady state", criterion5},
        {6, "erfc against extended precision", criterion6},
        {7, "receiver statistics", criterion7},
        {8, "plasma fit round trip", criterion8},
        {9, "IDRM conservation", criterion9},
        {10, "pipeline determinism and stage ordering", criterion10},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    int failed = 0;
    int ran = 0;
    for (const Criterion& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d (%s): %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                    o.detail.c_str(), secs);
        failed += o.pass ? 0 : 1;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
