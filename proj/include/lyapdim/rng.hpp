#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "lyapdim/model.hpp"

namespace lyapdim {

/// Counter-based generator: the i-th draw of stream k under key `seed` is a
/// pure function of (seed, k, i), so streams can be split across workers
/// without coordination and results never depend on scheduling.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    /// New independent stream derived from this one.
    CounterRng split(std::uint64_t child) const { return CounterRng(seed_, mix(stream_ * 0x9E3779B97F4A7C15ULL + child + 1)); }

    std::uint64_t next_u64() { return at(counter_++); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t at(std::uint64_t i) const { return mix(mix(seed_ ^ mix(stream_)) + i * 0x9E3779B97F4A7C15ULL); }

private:
    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_{0};
};

/// Uniform point in the ball of given center and radius (rejection sampling).
inline StateVec uniform_in_ball(CounterRng& rng, const StateVec& center, double radius) {
    for (;;) {
        const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0), z = rng.uniform(-1.0, 1.0);
        if (x * x + y * y + z * z <= 1.0) return center + radius * StateVec{x, y, z};
    }
}

/// Radical inverse of i in the given prime base; coordinates of the Halton
/// sequence.
inline double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, out = 0.0;
    while (i > 0) {
        out += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return out;
}

/// i-th point (i >= 1) of the 3-d Halton sequence in [0,1)^3.
inline std::array<double, 3> halton3(std::uint64_t i) {
    return {radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)};
}

}  // namespace lyapdim
