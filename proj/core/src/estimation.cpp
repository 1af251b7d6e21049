#include "mcdds/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mcdds::fit {

namespace {

constexpr std::size_t kDim = 4;
using Point = std::array<double, kDim>;

constexpr double kLogStep = 0.1;  // initial simplex offset in log coordinates
constexpr double kDelayStep = 0.05;  // hours

Point to_search(const pk::G1Params& p) {
    return {std::log(p.k), std::log(p.T1), std::log(p.T2), p.T0};
}

pk::G1Params from_search(const Point& x) {
    return pk::G1Params{std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::max(x[3], 0.0)};
}

pk::G1Params canonical(pk::G1Params p) {
    if (p.T1 > p.T2) std::swap(p.T1, p.T2);
    return p;
}

double sse_unchecked(const pk::G1Params& p, std::span<const PlasmaSample> data, double dose_mg) {
    double sum = 0.0;
    for (const PlasmaSample& s : data) {
        const double r = pk::g1_value(p, dose_mg, s.t_h) - s.value;
        sum += r * r;
    }
    return sum;
}

double objective(const Point& x, std::span<const PlasmaSample> data, double dose_mg) {
    const pk::G1Params p = from_search(x);
    if (!(p.k > 0.0 && p.T1 > 0.0 && p.T2 > 0.0) || !std::isfinite(p.k) ||
        std::abs(p.T1 - p.T2) < pk::kConfluentTolerance) {
        return std::numeric_limits<double>::infinity();
    }
    const double f = sse_unchecked(p, data, dose_mg);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
}

void check_data(std::span<const PlasmaSample> data, double dose_mg) {
    if (data.size() < kMinSamples) {
        throw std::invalid_argument("fit_g1: need at least " + std::to_string(kMinSamples) +
                                    " samples, got " + std::to_string(data.size()));
    }
    if (!(dose_mg > 0.0)) throw std::invalid_argument("fit_g1: dose must be > 0");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const PlasmaSample& s : data) {
        if (!std::isfinite(s.t_h) || !std::isfinite(s.value)) {
            throw std::invalid_argument("fit_g1: samples must be finite");
        }
        if (s.t_h < 0.0) throw std::invalid_argument("fit_g1: sample times must be >= 0");
        lo = std::min(lo, s.t_h);
        hi = std::max(hi, s.t_h);
    }
    if (hi - lo < kMinSpanH) {
        throw std::invalid_argument("fit_g1: samples must span at least 3 h");
    }
}

struct Simplex {
    std::array<Point, kDim + 1> x;
    std::array<double, kDim + 1> f;

    void sort() {
        std::array<std::size_t, kDim + 1> idx;
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        auto xs = x;
        auto fs = f;
        for (std::size_t i = 0; i <= kDim; ++i) {
            x[i] = xs[idx[i]];
            f[i] = fs[idx[i]];
        }
    }

    [[nodiscard]] double diameter() const {
        double d = 0.0;
        for (std::size_t i = 1; i <= kDim; ++i) {
            for (std::size_t j = 0; j < kDim; ++j) d = std::max(d, std::abs(x[i][j] - x[0][j]));
        }
        return d;
    }
};

// Relative spread test: sse values of a noisy fit can be in the thousands,
// where an absolute 1e-12 is below double resolution.
bool flat(const Simplex& s, double ftol) {
    return s.f[kDim] - s.f[0] <= ftol * (1.0 + s.f[0]);
}

Simplex build_simplex(const Point& x0, std::span<const PlasmaSample> data, double dose_mg) {
    Simplex s;
    s.x[0] = x0;
    for (std::size_t i = 0; i < kDim; ++i) {
        Point v = x0;
        v[i] += i == 3 ? std::max(kDelayStep, 0.1 * std::abs(x0[3])) : kLogStep;
        s.x[i + 1] = v;
    }
    for (std::size_t i = 0; i <= kDim; ++i) s.f[i] = objective(s.x[i], data, dose_mg);
    s.sort();
    return s;
}

Point affine(const Point& c, const Point& w, double t) {
    Point out;
    for (std::size_t i = 0; i < kDim; ++i) out[i] = c[i] + t * (w[i] - c[i]);
    return out;
}

}  // namespace

double sse(const pk::G1Params& params, std::span<const PlasmaSample> data, double dose_mg) {
    if (data.empty()) throw std::invalid_argument("sse: data must not be empty");
    pk::validate(params);
    return sse_unchecked(params, data, dose_mg);
}

FitResult fit_g1(std::span<const PlasmaSample> data, double dose_mg, const pk::G1Params& init,
                 const FitOptions& opts) {
    check_data(data, dose_mg);
    pk::validate(init);

    FitResult result;
    const Point x0 = to_search(init);
    const double f0 = objective(x0, data, dose_mg);
    // The objective is bounded below by 0, so nothing can improve on it by more than ftol.
    if (f0 <= opts.ftol) {
        result.params = canonical(from_search(x0));
        result.sse = f0;
        result.converged = true;
        return result;
    }

    Simplex s = build_simplex(x0, data, dose_mg);
    std::size_t restarts = 0;
    double restart_f = std::numeric_limits<double>::infinity();

    while (result.iterations < opts.max_iterations) {
        if (s.diameter() < opts.xtol && flat(s, opts.ftol)) {
            const bool stalled = restart_f - s.f[0] <= opts.ftol * (1.0 + s.f[0]);
            if (stalled || restarts >= opts.max_restarts) {
                result.converged = true;
                break;
            }
            restart_f = s.f[0];
            ++restarts;
            s = build_simplex(s.x[0], data, dose_mg);
        }
        ++result.iterations;

        Point centroid{};
        for (std::size_t i = 0; i < kDim; ++i) {
            for (std::size_t j = 0; j < kDim; ++j) centroid[j] += s.x[i][j] / static_cast<double>(kDim);
        }
        const Point& worst = s.x[kDim];

        const Point xr = affine(centroid, worst, -1.0);
        const double fr = objective(xr, data, dose_mg);
        if (fr < s.f[0]) {
            const Point xe = affine(centroid, worst, -2.0);
            const double fe = objective(xe, data, dose_mg);
            if (fe < fr) {
                s.x[kDim] = xe;
                s.f[kDim] = fe;
            } else {
                s.x[kDim] = xr;
                s.f[kDim] = fr;
            }
        } else if (fr < s.f[kDim - 1]) {
            s.x[kDim] = xr;
            s.f[kDim] = fr;
        } else {
            const bool outside = fr < s.f[kDim];
            const Point xc = affine(centroid, worst, outside ? -0.5 : 0.5);
            const double fc = objective(xc, data, dose_mg);
            if (fc < std::min(fr, s.f[kDim])) {
                s.x[kDim] = xc;
                s.f[kDim] = fc;
            } else {
                for (std::size_t i = 1; i <= kDim; ++i) {
                    s.x[i] = affine(s.x[0], s.x[i], 0.5);
                    s.f[i] = objective(s.x[i], data, dose_mg);
                }
            }
        }
        s.sort();
        if (opts.record_history) result.best_history.push_back(s.f[0]);
    }

    result.params = canonical(from_search(s.x[0]));
    result.sse = s.f[0];
    return result;
}

FitResult fit_g1_multistart(std::span<const PlasmaSample> data, double dose_mg,
                            std::span<const pk::G1Params> starts, const FitOptions& opts) {
    if (starts.empty()) throw std::invalid_argument("fit_g1_multistart: no starting points");
    check_data(data, dose_mg);

    std::vector<std::future<FitResult>> jobs;
    jobs.reserve(starts.size());
    for (const pk::G1Params& start : starts) {
        jobs.push_back(std::async(std::launch::async,
                                  [=] { return fit_g1(data, dose_mg, start, opts); }));
    }
    std::vector<FitResult> results;
    results.reserve(jobs.size());
    for (auto& job : jobs) results.push_back(job.get());

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].sse < results[best].sse) best = i;
    }
    return results[best];
}

std::vector<pk::G1Params> perturbed_starts(const pk::G1Params& center, std::size_t count,
                                           double spread, RngSeed seed) {
    if (!(spread >= 0.0 && spread < 1.0)) {
        throw std::invalid_argument("perturbed_starts: spread must lie in [0, 1)");
    }
    Rng rng(seed);
    auto factor = [&] { return 1.0 + spread * (2.0 * rng.uniform() - 1.0); };
    std::vector<pk::G1Params> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        pk::G1Params p = center;
        p.k *= factor();
        p.T1 *= factor();
        p.T2 *= factor();
        p.T0 *= factor();
        out.push_back(p);
    }
    return out;
}

std::vector<PlasmaSample> simulate_observations(const pk::G1Params& params, double dose_mg,
                                                std::span<const double> times_h, double noise_rel,
                                                RngSeed seed) {
    if (!(noise_rel >= 0.0)) throw std::invalid_argument("simulate_observations: noise_rel must be >= 0");
    pk::validate(params);
    Rng rng(seed);
    std::vector<PlasmaSample> out;
    out.reserve(times_h.size());
    for (double t : times_h) {
        if (!(t >= 0.0)) throw std::invalid_argument("simulate_observations: times must be >= 0");
        const double truth = pk::g1_value(params, dose_mg, t);
        const double noise = noise_rel > 0.0 ? noise_rel * rng.normal() : 0.0;
        out.push_back({t, truth * (1.0 + noise)});
    }
    return out;
}

std::vector<double> dense_early_schedule() {
    std::vector<double> t;
    t.reserve(25);
    for (int i = 0; i <= 12; ++i) t.push_back(static_cast<double>(i) / 12.0);
    for (int i = 1; i <= 12; ++i) t.push_back(1.0 + 4.0 * static_cast<double>(i) / 12.0);
    return t;
}

}  // namespace mcdds::fit
