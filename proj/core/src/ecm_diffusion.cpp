#include "mcdds/ecm_diffusion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcdds::ecm {

std::vector<std::string> validate(const EcmParams& p) {
    if (!(p.D > 0.0)) throw std::invalid_argument("ecm.D must be > 0");
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("ecm.alpha must lie in (0, 1]");
    if (!(p.lambda_tort >= 1.0)) throw std::invalid_argument("ecm.lambda must be >= 1");

    std::vector<std::string> warnings;
    if (p.alpha < kAlphaMin || p.alpha > kAlphaMax) {
        warnings.push_back("ecm.alpha = " + format_double(p.alpha) +
                           " lies outside the physiological range [0.1, 0.3]");
    }
    return warnings;
}

double volume_fraction(double v_ecm, double v_tissue) {
    if (!(v_ecm > 0.0)) throw std::invalid_argument("volume_fraction: ECM volume must be > 0");
    if (v_ecm > v_tissue) {
        throw std::invalid_argument("volume_fraction: ECM volume exceeds tissue volume");
    }
    return v_ecm / v_tissue;
}

double tortuosity(double D, double D_star) {
    if (!(D_star > 0.0)) throw std::invalid_argument("tortuosity: D* must be > 0");
    if (D_star > D) {
        throw std::invalid_argument("tortuosity: D* exceeds D (tortuosity would be below 1)");
    }
    return std::sqrt(D / D_star);
}

double effective_diffusivity(double D, double lambda_tort) {
    if (!(D > 0.0)) throw std::invalid_argument("effective_diffusivity: D must be > 0");
    if (!(lambda_tort >= 1.0)) throw std::invalid_argument("effective_diffusivity: lambda must be >= 1");
    return D / (lambda_tort * lambda_tort);
}

double steady_state(const EcmParams& p, double Q, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("ECM distance must be > 0 (point source is singular)");
    const double lam2 = p.lambda_tort * p.lambda_tort;
    return Q * lam2 / (4.0 * std::numbers::pi * p.D * p.alpha * r);
}

double concentration(const EcmParams& p, const EcmQuery& q) {
    if (!(q.Q >= 0.0)) throw std::invalid_argument("ECM source amount must be >= 0");
    if (!(q.t >= 0.0)) throw std::invalid_argument("ECM elapsed time must be >= 0");
    const double c_inf = steady_state(p, q.Q, q.r);
    if (q.t == 0.0 || q.Q == 0.0) {
        return 0.0;
    }
    return c_inf * erfc(q.r * p.lambda_tort / (2.0 * std::sqrt(p.D * q.t)));
}

TimeSeries time_profile(const EcmParams& p, double Q, double r, const TimeGrid& grid) {
    if (!(grid.unit() == units::second)) {
        throw std::invalid_argument("ECM time profile needs a grid in seconds");
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = concentration(p, EcmQuery{Q, r, grid.time(i)});
    }
    return TimeSeries(grid, std::move(out), units::molecules_per_um3);
}

TimeSeries superpose_source(const TimeSeries& source, const EcmParams& p, double r) {
    const TimeGrid& grid = source.grid();
    if (!(grid.unit() == units::second)) {
        throw std::invalid_argument("superpose_source needs a source on a seconds grid");
    }
    for (std::size_t j = 0; j < source.size(); ++j) {
        if (source[j] < 0.0) {
            throw std::invalid_argument("superpose_source: negative source sample at index " +
                                        std::to_string(j));
        }
    }

    // Unit-Q response at lag k * dt; lag 0 contributes nothing.
    const std::size_t n = source.size();
    std::vector<double> response(n);
    for (std::size_t k = 0; k < n; ++k) {
        response[k] = concentration(p, EcmQuery{1.0, r, static_cast<double>(k) * grid.dt()});
    }

    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double q = source[j];
        if (q == 0.0) {
            continue;
        }
        for (std::size_t m = j + 1; m < n; ++m) {
            out[m] += q * response[m - j];
        }
    }
    return TimeSeries(grid, std::move(out), units::molecules_per_um3);
}

}  // namespace mcdds::ecm
