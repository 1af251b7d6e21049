#pragma once

// Time grids, sampled traces and unit tags shared by every pipeline stage.
//
// The pharmacokinetic chain runs in hours and mg; extracellular diffusion and
// reception run in seconds and micrometres. Conversions are explicit and only
// happen at module boundaries.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcdds {

enum class Dimension { time, amount, concentration, length, count, dimensionless };

[[nodiscard]] std::string_view to_string(Dimension d) noexcept;

/// A unit of measure: a dimension plus a scale relative to that dimension's
/// canonical base (hour, mg, molecules/um^3, um, molecule, 1).
class UnitTag {
public:
    constexpr UnitTag(Dimension dimension, double scale, std::string_view symbol)
        : dimension_(dimension), scale_(scale), symbol_(symbol) {
        if (!(scale > 0.0)) {
            throw std::invalid_argument("unit scale must be positive");
        }
    }

    [[nodiscard]] constexpr Dimension dimension() const noexcept { return dimension_; }
    [[nodiscard]] constexpr double scale() const noexcept { return scale_; }
    /// Short symbol, safe to embed in CSV column names.
    [[nodiscard]] constexpr std::string_view symbol() const noexcept { return symbol_; }

    friend constexpr bool operator==(const UnitTag& a, const UnitTag& b) noexcept {
        return a.dimension_ == b.dimension_ && a.scale_ == b.scale_ && a.symbol_ == b.symbol_;
    }

private:
    Dimension dimension_;
    double scale_;
    std::string_view symbol_;
};

namespace units {
inline constexpr UnitTag hour{Dimension::time, 1.0, "h"};
inline constexpr UnitTag minute{Dimension::time, 1.0 / 60.0, "min"};
inline constexpr UnitTag second{Dimension::time, 1.0 / 3600.0, "s"};

inline constexpr UnitTag mg{Dimension::amount, 1.0, "mg"};
/// Plasma-level axis; the reference data never states a physical unit.
inline constexpr UnitTag model{Dimension::amount, 1.0, "model"};

inline constexpr UnitTag molecules_per_um3{Dimension::concentration, 1.0, "molecules_per_um3"};

inline constexpr UnitTag um{Dimension::length, 1.0, "um"};
inline constexpr UnitTag mm{Dimension::length, 1000.0, "mm"};

inline constexpr UnitTag molecules{Dimension::count, 1.0, "molecules"};
inline constexpr UnitTag counts{Dimension::count, 1.0, "counts"};

inline constexpr UnitTag one{Dimension::dimensionless, 1.0, "1"};
}  // namespace units

/// value * from.scale / to.scale; throws std::invalid_argument on a dimension mismatch.
[[nodiscard]] double convert(double value, const UnitTag& from, const UnitTag& to);

/// As convert(), but both tags must be time units.
[[nodiscard]] double convert_time(double value, const UnitTag& from, const UnitTag& to);

/// Uniform sampling grid. Sample i sits at t_start + i * dt, computed directly
/// (never by repeated addition) so sample times are reproducible bit-for-bit.
class TimeGrid {
public:
    /// Throws std::invalid_argument unless dt > 0, n >= 2 and the unit is a time unit.
    TimeGrid(double t_start, double dt, std::size_t n, UnitTag unit = units::hour);

    [[nodiscard]] double t_start() const noexcept { return t_start_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] const UnitTag& unit() const noexcept { return unit_; }

    [[nodiscard]] double time(std::size_t i) const noexcept {
        return t_start_ + static_cast<double>(i) * dt_;
    }
    [[nodiscard]] double t_end() const noexcept { return time(n_ - 1); }

    /// The same sampling expressed in another time unit.
    [[nodiscard]] TimeGrid in_unit(const UnitTag& unit) const;

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.t_start_ == b.t_start_ && a.dt_ == b.dt_ && a.n_ == b.n_ && a.unit_ == b.unit_;
    }

private:
    double t_start_;
    double dt_;
    std::size_t n_;
    UnitTag unit_;
};

/// Grid covering [t_start, t_end] with n = floor((t_end - t_start) / dt) + 1.
/// The floor tolerates representation error of one part in 1e9 of a step.
[[nodiscard]] TimeGrid make_time_grid(double t_start, double t_end, double dt,
                                      UnitTag unit = units::hour);

/// An immutable trace sampled on a TimeGrid. Non-finite values are rejected at
/// construction with NumericError.
class TimeSeries {
public:
    TimeSeries(TimeGrid grid, std::vector<double> values, UnitTag unit);

    /// All-zero trace.
    static TimeSeries zeros(TimeGrid grid, UnitTag unit);

    [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const UnitTag& unit() const noexcept { return unit_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] double time(std::size_t i) const noexcept { return grid_.time(i); }

    [[nodiscard]] TimeSeries scaled(double factor) const;
    [[nodiscard]] TimeSeries with_unit(UnitTag unit) const;

    /// Index of the largest sample (first one on ties).
    [[nodiscard]] std::size_t argmax() const noexcept;
    [[nodiscard]] double max() const noexcept { return values_[argmax()]; }

    /// Trapezoidal integral over the whole grid, in value-unit x grid-time-unit.
    [[nodiscard]] double integral() const noexcept;

private:
    TimeGrid grid_;
    std::vector<double> values_;
    UnitTag unit_;
};

/// Pointwise sum; grids and units must match exactly.
[[nodiscard]] TimeSeries operator+(const TimeSeries& a, const TimeSeries& b);

/// Linear interpolation of `series` onto `target`. Source samples that coincide
/// with target samples are copied exactly. Throws std::out_of_range when the
/// target extends beyond the source span.
[[nodiscard]] TimeSeries resample(const TimeSeries& series, const TimeGrid& target);

/// Linear interpolation at a single time (in the series' own time unit).
[[nodiscard]] double sample_at(const TimeSeries& series, double t);

/// CSV with header `t_<time unit>,value_<value unit>`, numbers as format_double().
void write_csv(std::ostream& out, const TimeSeries& series);

/// Number formatting shared by every CSV writer: the shortest text that reads
/// back to the same double, locale independent.
[[nodiscard]] std::string format_double(double value);

}  // namespace mcdds
