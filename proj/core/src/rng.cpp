#include "mcdds/rng.hpp"

#include "mcdds/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace mcdds {

namespace {

constexpr double kInversionLimit = 30.0;
constexpr double kRejectionLimit = 1e12;
constexpr double kCountLimit = 1e18;

std::uint64_t poisson_inversion(double lambda, Rng& rng) {
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap only matters when u sits within rounding of 1.
    const auto cap = static_cast<std::uint64_t>(10.0 * lambda + 100.0);
    while (u > cdf && k < cap) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// W. Hoermann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::uint64_t poisson_ptrs(double lambda, Rng& rng) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    while (true) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -lambda + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;
    do {
        x = 2.0 * uniform() - 1.0;
        y = 2.0 * uniform() - 1.0;
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * scale;
    has_spare_ = true;
    return x * scale;
}

std::uint64_t sample_poisson(double lambda, Rng& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("Poisson mean must be finite and >= 0");
    }
    if (lambda == 0.0) {
        return 0;
    }
    if (lambda < kInversionLimit) {
        return poisson_inversion(lambda, rng);
    }
    if (lambda < kRejectionLimit) {
        return poisson_ptrs(lambda, rng);
    }
    if (lambda > kCountLimit) {
        throw NumericError("Poisson mean " + std::to_string(lambda) +
                           " exceeds the representable count range");
    }
    const double draw = std::round(lambda + std::sqrt(lambda) * rng.normal());
    return draw <= 0.0 ? 0 : static_cast<std::uint64_t>(draw);
}

}  // namespace mcdds
