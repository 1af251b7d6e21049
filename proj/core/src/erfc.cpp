#include "mcdds/ecm_diffusion.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mcdds::ecm {

namespace {

constexpr double kSeriesLimit = 2.5;
constexpr double kTiny = 1e-300;

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1 * 3 * ... * (2n+1)).
// Every term is positive, so there is no cancellation.
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 500; ++n) {
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz algorithm.
double erfc_continued_fraction(double x) {
    double f = x;
    double c = x;
    double d = 0.0;
    for (int n = 1; n < 5000; ++n) {
        const double a = 0.5 * n;
        d = x + a * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = x + a / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

}  // namespace

double erfc(double x) noexcept {
    if (std::isnan(x)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (x < 0.0) {
        return 2.0 - erfc(-x);
    }
    if (x < kSeriesLimit) {
        return 1.0 - erf_series(x);
    }
    if (x > 27.3) {
        return 0.0;  // below the smallest subnormal
    }
    return erfc_continued_fraction(x);
}

}  // namespace mcdds::ecm
