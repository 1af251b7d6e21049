#pragma once

// Reference implementations used only by the tests. They are written from the
// model definitions directly and share no code with the library.

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using wide = boost::multiprecision::cpp_bin_float_50;

/// erfc evaluated in 50-digit arithmetic and rounded to double.
inline double erfc_wide(double x) {
    return static_cast<double>(boost::math::erfc(wide(x)));
}

/// Peak of k (e^{-tau/T1} - e^{-tau/T2}) / (T1 - T2): set the derivative to zero.
inline double g1_peak(double T0, double T1, double T2) {
    return T0 + std::log(T2 / T1) / (1.0 / T1 - 1.0 / T2);
}

/// Closed-form plasma level at unit dose weight.
inline double g1(double k, double T1, double T2, double T0, double t) {
    const double tau = t - T0;
    if (tau <= 0.0) return 0.0;
    return k / (T2 - T1) * (std::exp(-tau / T2) - std::exp(-tau / T1));
}

/// Point-release concentration written out with boost's erfc.
inline double ecm_conc(double Q, double D, double alpha, double lam, double r, double t) {
    if (t <= 0.0) return 0.0;
    return Q * lam * lam / (4.0 * std::numbers::pi * D * alpha * r) *
           boost::math::erfc(r * lam / (2.0 * std::sqrt(D * t)));
}

inline double ecm_steady(double Q, double D, double alpha, double lam, double r) {
    return Q * lam * lam / (4.0 * std::numbers::pi * D * alpha * r);
}

/// Expected count seen by a sphere of radius d after `elapsed` seconds.
inline double p_obs(double d, double D, double elapsed, double c) {
    const double volume = 4.0 / 3.0 * std::numbers::pi * d * d * d;
    return volume * c / std::pow(4.0 * std::numbers::pi * D * elapsed, 1.5);
}

/// Receiver intensity by the defining sum, with c[j-1] the concentration at
/// instant (j - 1) Ts.
inline double lambda_sum(const std::vector<double>& c, double d, double D, double Ts, double noise,
                         std::size_t m) {
    double lam = noise;
    for (std::size_t j = 1; j <= m + 1; ++j) {
        const double elapsed = static_cast<double>(m + 1 - j) * Ts;
        if (elapsed <= 0.0) continue;
        lam += p_obs(d, D, elapsed, c[j - 1]);
    }
    return lam;
}

/// Three-pole cascade impulse response evaluated by numerical quadrature of
/// the G1 closed form against the G3 exponential (independent of partial
/// fractions). Composite Simpson with `n` panels.
inline double cascade_quadrature(double k, double T1, double T2, double T0, double a, double T3,
                                 double beta, double t, int n = 20000) {
    const double start = T0 + T3;
    if (t <= start) return 0.0;
    const double h = (t - start) / n;
    auto f = [&](double s) { return a * g1(k, T1, T2, T0, s - T3) * beta * std::exp(-beta * (t - s)); };
    double sum = f(start) + f(t);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(start + i * h);
    return sum * h / 3.0;
}

}  // namespace oracle
