#include "mcdds/pk_lti.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mcdds::pk {

namespace {

void require_hours(const TimeGrid& grid, const char* what) {
    if (!(grid.unit() == units::hour)) {
        throw std::invalid_argument(std::string(what) + ": grid must be in hours");
    }
}

std::size_t first_nonzero(std::span<const double> v) {
    const auto it = std::find_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
    return static_cast<std::size_t>(it - v.begin());
}

}  // namespace

void validate(const G1Params& p) {
    if (!(p.k > 0.0)) throw std::invalid_argument("g1.k must be > 0");
    if (!(p.T1 > 0.0)) throw std::invalid_argument("g1.T1 must be > 0");
    if (!(p.T2 > 0.0)) throw std::invalid_argument("g1.T2 must be > 0");
    if (!(p.T0 >= 0.0)) throw std::invalid_argument("g1.T0 must be >= 0");
    if (std::abs(p.T1 - p.T2) < kConfluentTolerance) {
        throw std::invalid_argument("g1.T1 and g1.T2 coincide (confluent poles are not supported)");
    }
}

void validate(const G2Params& p) {
    if (!(p.a > 0.0 && p.a < 1.0)) throw std::invalid_argument("g2.a must lie in (0, 1)");
    if (!(p.T3 >= 0.0)) throw std::invalid_argument("g2.T3 must be >= 0");
}

void validate(const G3Params& p) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("g3.beta must be > 0");
}

Regimen::Regimen(std::vector<DoseEvent> events) : events_(std::move(events)) {
    for (std::size_t i = 0; i < events_.size(); ++i) {
        if (!(events_[i].dose_mg > 0.0)) {
            throw std::invalid_argument("regimen: dose " + std::to_string(i) + " must be > 0");
        }
        if (!std::isfinite(events_[i].time_h)) {
            throw std::invalid_argument("regimen: dose " + std::to_string(i) + " has no finite time");
        }
        if (i > 0 && events_[i].time_h < events_[i - 1].time_h) {
            throw std::invalid_argument("regimen: dose times must be non-decreasing");
        }
    }
}

double g1_value(const G1Params& p, double dose_mg, double t_h) {
    const double tau = t_h - p.T0;
    if (tau <= 0.0) {
        return 0.0;
    }
    const double weight = dose_mg / kReferenceDoseMg;
    return weight * p.k * (std::exp(-tau / p.T1) - std::exp(-tau / p.T2)) / (p.T1 - p.T2);
}

double g1_peak_time(const G1Params& p) {
    validate(p);
    return p.T0 + p.T1 * p.T2 / (p.T2 - p.T1) * std::log(p.T2 / p.T1);
}

TimeSeries g1_impulse_response(const G1Params& p, double dose_mg, const TimeGrid& grid) {
    validate(p);
    require_hours(grid, "g1_impulse_response");
    if (!(dose_mg > 0.0)) {
        throw std::invalid_argument("g1_impulse_response: dose must be > 0");
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = g1_value(p, dose_mg, grid.time(i) - grid.t_start());
    }
    return TimeSeries(grid, std::move(out), units::model);
}

TimeSeries g2_apply(const TimeSeries& input, const G2Params& p) {
    validate(p);
    require_hours(input.grid(), "g2_apply");
    const std::size_t n = input.size();
    const double shift = p.T3 / input.grid().dt();
    const double whole = std::round(shift);
    std::vector<double> out(n, 0.0);

    if (std::abs(shift - whole) <= 1e-9) {
        const auto s = static_cast<std::size_t>(whole);
        for (std::size_t i = s; i < n; ++i) {
            out[i] = p.a * input[i - s];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double pos = static_cast<double>(i) - shift;
            if (pos < 0.0) {
                continue;
            }
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const double frac = pos - static_cast<double>(lo);
            const double hi_value = lo + 1 < n ? input[lo + 1] : input[lo];
            out[i] = p.a * (input[lo] + frac * (hi_value - input[lo]));
        }
    }
    return TimeSeries(input.grid(), std::move(out), input.unit());
}

TimeSeries g3_impulse_kernel(const G3Params& p, const TimeGrid& grid) {
    validate(p);
    require_hours(grid, "g3_impulse_kernel");
    if (grid.t_start() != 0.0) {
        throw std::invalid_argument("g3_impulse_kernel: grid must start at 0");
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = p.beta * std::exp(-p.beta * grid.time(i));
    }
    return TimeSeries(grid, std::move(out), units::one);
}

TimeSeries g3_apply(const TimeSeries& input, const G3Params& p,
                    std::span<const double> breakpoints) {
    const TimeGrid& grid = input.grid();
    const TimeGrid kernel_grid(0.0, grid.dt(), input.size(), grid.unit());
    const TimeSeries kernel = g3_impulse_kernel(p, kernel_grid);
    TimeSeries plain = convolve(input, kernel, Quadrature::trapezoid);
    if (breakpoints.empty()) {
        return plain;
    }

    const double dt = grid.dt();
    const std::size_t n = input.size();
    std::vector<double> out(plain.values().begin(), plain.values().end());
    const auto kern = [&](double lag) { return p.beta * std::exp(-p.beta * lag); };

    for (const double s0 : breakpoints) {
        const double pos = (s0 - grid.t_start()) / dt;
        if (pos <= 0.0 || pos >= static_cast<double>(n - 1)) {
            continue;
        }
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double left = (pos - static_cast<double>(i)) * dt;
        const double right = dt - left;
        if (left <= 1e-9 * dt || right <= 1e-9 * dt) {
            continue;  // breakpoint on a node; plain trapezoid is already exact there
        }
        const double slope = i > 0 ? (input[i] - input[i - 1]) / dt : 0.0;
        const double h0 = input[i] + slope * left;
        for (std::size_t m = i + 1; m < n; ++m) {
            const double k_i = kernel[m - i];
            const double k_next = kernel[m - i - 1];
            const double k_0 = kern(grid.time(m) - s0);
            const double whole = 0.5 * dt * (input[i] * k_i + input[i + 1] * k_next);
            const double split = 0.5 * left * (input[i] * k_i + h0 * k_0) +
                                 0.5 * right * (h0 * k_0 + input[i + 1] * k_next);
            out[m] += split - whole;
        }
    }
    return TimeSeries(grid, std::move(out), input.unit());
}

TimeSeries convolve(const TimeSeries& f, const TimeSeries& g, Quadrature rule) {
    const TimeGrid& fg = f.grid();
    const TimeGrid& gg = g.grid();
    if (!(fg.unit() == gg.unit())) {
        throw std::invalid_argument("convolve: traces use different time units");
    }
    const double dt = fg.dt();
    if (std::abs(dt - gg.dt()) > 1e-12 * dt) {
        throw std::invalid_argument("convolve: traces use different time steps");
    }

    const auto fv = f.values();
    const auto gv = g.values();
    const std::size_t n = fv.size();
    const std::size_t f0 = first_nonzero(fv);
    const std::size_t g0 = first_nonzero(gv);
    std::vector<double> out(n, 0.0);

    for (std::size_t k = f0 + g0; k < n; ++k) {
        // m runs over f indices with a valid g index k - m.
        const std::size_t m_lo = k >= gv.size() ? std::max(f0, k - gv.size() + 1) : f0;
        const std::size_t m_hi = k - g0;
        double acc = 0.0;
        for (std::size_t m = m_lo; m <= m_hi; ++m) {
            acc += fv[m] * gv[k - m];
        }
        if (rule == Quadrature::trapezoid) {
            if (k < gv.size()) acc -= 0.5 * fv[0] * gv[k];
            acc -= 0.5 * fv[k] * gv[0];
        }
        out[k] = dt * acc;
    }
    return TimeSeries(fg, std::move(out), f.unit());
}

CascadeStages cascade_stages(const Regimen& regimen, const G1Params& g1, const G2Params& g2,
                             const G3Params& g3, const TimeGrid& grid) {
    validate(g1);
    validate(g2);
    validate(g3);
    require_hours(grid, "cascade_stages");

    std::vector<double> plasma(grid.size(), 0.0);
    for (const DoseEvent& dose : regimen.events()) {
        if (dose.time_h < grid.t_start() || dose.time_h > grid.t_end()) {
            throw std::out_of_range("cascade: dose at " + format_double(dose.time_h) +
                                    " h lies outside the simulation grid");
        }
        for (std::size_t i = 0; i < plasma.size(); ++i) {
            plasma[i] += g1_value(g1, dose.dose_mg, grid.time(i) - dose.time_h);
        }
    }
    TimeSeries plasma_trace(grid, std::move(plasma), units::model);
    TimeSeries circulation = g2_apply(plasma_trace, g2);

    // Each dose's response switches on with a slope jump after T0 + T3.
    std::vector<double> onsets;
    onsets.reserve(regimen.events().size());
    for (const DoseEvent& dose : regimen.events()) {
        onsets.push_back(dose.time_h + g1.T0 + g2.T3);
    }
    TimeSeries bbb = g3_apply(circulation, g3, onsets);
    return CascadeStages{std::move(plasma_trace), std::move(circulation), std::move(bbb)};
}

TimeSeries cascade_response(const Regimen& regimen, const G1Params& g1, const G2Params& g2,
                            const G3Params& g3, const TimeGrid& grid) {
    return cascade_stages(regimen, g1, g2, g3, grid).bbb;
}

double analytic_cascade_impulse(const G1Params& g1, const G2Params& g2, const G3Params& g3,
                                double t_h) {
    validate(g1);
    validate(g2);
    validate(g3);
    const std::array<double, 3> poles{1.0 / g1.T1, 1.0 / g1.T2, g3.beta};
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (std::abs(poles[i] - poles[j]) <= 1e-9 * std::max(poles[i], poles[j])) {
                throw std::invalid_argument("analytic cascade: coincident poles");
            }
        }
    }

    const double tau = t_h - g1.T0 - g2.T3;
    if (tau <= 0.0) {
        return 0.0;
    }
    const double gain = g1.k * g2.a * g3.beta / (g1.T1 * g1.T2);
    double sum = 0.0;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        double denom = 1.0;
        for (std::size_t j = 0; j < poles.size(); ++j) {
            if (j != i) denom *= poles[j] - poles[i];
        }
        sum += std::exp(-poles[i] * tau) / denom;
    }
    return gain * sum;
}

}  // namespace mcdds::pk
