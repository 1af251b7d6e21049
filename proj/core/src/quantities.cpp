#include "mcdds/quantities.hpp"

#include "mcdds/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace mcdds {

namespace {

// Relative slack (in units of one grid step) when deciding whether a time is
// on, or inside, a grid.
constexpr double kGridSlack = 1e-9;

void require_finite(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NumericError("non-finite value at sample " + std::to_string(i));
        }
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& issue : issues) {
              msg += "\n  " + issue.path + ": " + issue.message;
          }
          return msg;
      }()),
      issues_(std::move(issues)) {}

std::string_view to_string(Dimension d) noexcept {
    switch (d) {
        case Dimension::time: return "time";
        case Dimension::amount: return "amount";
        case Dimension::concentration: return "concentration";
        case Dimension::length: return "length";
        case Dimension::count: return "count";
        case Dimension::dimensionless: return "dimensionless";
    }
    return "unknown";
}

double convert(double value, const UnitTag& from, const UnitTag& to) {
    if (from.dimension() != to.dimension()) {
        throw std::invalid_argument("cannot convert " + std::string(to_string(from.dimension())) +
                                    " to " + std::string(to_string(to.dimension())));
    }
    if (from == to) {
        return value;
    }
    return value * from.scale() / to.scale();
}

double convert_time(double value, const UnitTag& from, const UnitTag& to) {
    if (from.dimension() != Dimension::time || to.dimension() != Dimension::time) {
        throw std::invalid_argument("convert_time requires time units");
    }
    return convert(value, from, to);
}

TimeGrid::TimeGrid(double t_start, double dt, std::size_t n, UnitTag unit)
    : t_start_(t_start), dt_(dt), n_(n), unit_(unit) {
    if (!std::isfinite(t_start)) {
        throw std::invalid_argument("grid start must be finite");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("grid step must be positive");
    }
    if (n < 2) {
        throw std::invalid_argument("grid needs at least two samples");
    }
    if (unit.dimension() != Dimension::time) {
        throw std::invalid_argument("grid unit must be a time unit");
    }
}

TimeGrid TimeGrid::in_unit(const UnitTag& unit) const {
    return TimeGrid(convert_time(t_start_, unit_, unit), convert_time(dt_, unit_, unit), n_, unit);
}

TimeGrid make_time_grid(double t_start, double t_end, double dt, UnitTag unit) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("make_time_grid: dt must be positive");
    }
    if (!(t_end > t_start)) {
        throw std::invalid_argument("make_time_grid: t_end must exceed t_start");
    }
    const double steps = (t_end - t_start) / dt;
    const auto n = static_cast<std::size_t>(std::floor(steps + kGridSlack)) + 1;
    return TimeGrid(t_start, dt, n, unit);
}

TimeSeries::TimeSeries(TimeGrid grid, std::vector<double> values, UnitTag unit)
    : grid_(grid), values_(std::move(values)), unit_(unit) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("TimeSeries: " + std::to_string(values_.size()) +
                                    " values for a grid of " + std::to_string(grid_.size()));
    }
    require_finite(values_);
}

TimeSeries TimeSeries::zeros(TimeGrid grid, UnitTag unit) {
    return TimeSeries(grid, std::vector<double>(grid.size(), 0.0), unit);
}

TimeSeries TimeSeries::scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& v : out) {
        v *= factor;
    }
    return TimeSeries(grid_, std::move(out), unit_);
}

TimeSeries TimeSeries::with_unit(UnitTag unit) const {
    return TimeSeries(grid_, values_, unit);
}

std::size_t TimeSeries::argmax() const noexcept {
    return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) -
                                    values_.begin());
}

double TimeSeries::integral() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) {
        sum += values_[i - 1] + values_[i];
    }
    return 0.5 * grid_.dt() * sum;
}

TimeSeries operator+(const TimeSeries& a, const TimeSeries& b) {
    if (!(a.grid() == b.grid())) {
        throw std::invalid_argument("TimeSeries addition needs identical grids");
    }
    if (!(a.unit() == b.unit())) {
        throw std::invalid_argument("TimeSeries addition needs identical units");
    }
    std::vector<double> out(a.values().begin(), a.values().end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += b[i];
    }
    return TimeSeries(a.grid(), std::move(out), a.unit());
}

double sample_at(const TimeSeries& series, double t) {
    const TimeGrid& g = series.grid();
    double pos = (t - g.t_start()) / g.dt();
    const double last = static_cast<double>(g.size() - 1);
    if (pos < -kGridSlack || pos > last + kGridSlack) {
        throw std::out_of_range("time " + format_double(t) + " lies outside the trace span");
    }
    pos = std::clamp(pos, 0.0, last);
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= kGridSlack) {
        return series[static_cast<std::size_t>(nearest)];
    }
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    return series[lo] + frac * (series[lo + 1] - series[lo]);
}

TimeSeries resample(const TimeSeries& series, const TimeGrid& target) {
    const TimeGrid& src = series.grid();
    if (target == src) {
        return series;
    }
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        out[i] = sample_at(series, convert_time(target.time(i), target.unit(), src.unit()));
    }
    return TimeSeries(target, std::move(out), series.unit());
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const TimeSeries& series) {
    out << "t_" << series.grid().unit().symbol() << ",value_" << series.unit().symbol() << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_double(series.time(i)) << ',' << format_double(series[i]) << '\n';
    }
}

}  // namespace mcdds
