#pragma once

// Reproducible random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; uniform and normal variates are
// derived here rather than through <random> distributions (whose algorithms
// are implementation-defined), so a seed yields the same draws on every
// conforming platform.

#include <cstdint>
#include <random>
#include <string_view>

namespace mcdds {

struct RngSeed {
    std::uint64_t value = 0;
};

/// Name recorded in configs and manifests to identify the engine.
inline constexpr std::string_view kRngName = "mt19937_64";

class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed.value) {}

    /// Independent stream for component `index` (receiver, curve, ...).
    [[nodiscard]] static Rng stream(RngSeed base, std::uint64_t index) {
        return Rng(RngSeed{base.value + index});
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        double u = 0.0;
        while (u == 0.0) u = uniform();
        return u;
    }

    /// Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Poisson-distributed count with mean `lambda`. Inversion for lambda < 30,
/// Hoermann's transformed rejection (PTRS) up to 1e12, and a rounded normal
/// beyond that, where the two laws are indistinguishable in double precision.
/// Throws std::invalid_argument for negative or non-finite lambda and
/// NumericError when lambda exceeds 1e18 (outside 64-bit count range).
[[nodiscard]] std::uint64_t sample_poisson(double lambda, Rng& rng);

}  // namespace mcdds
