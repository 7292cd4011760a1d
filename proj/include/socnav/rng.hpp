#pragma once

#include <cmath>
#include <cstdint>

#include "socnav/geometry.hpp"

namespace socnav {

// splitmix64 based generator. Chosen over the std engines so that sampled
// sequences are identical across standard-library implementations, which the
// determinism contract requires.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (cosine branch only).
    double gaussian() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Standard normal truncated to [lo, hi] by rejection.
    double truncated_gaussian(double lo, double hi) {
        for (;;) {
            const double z = gaussian();
            if (z >= lo && z <= hi) return z;
        }
    }

private:
    std::uint64_t state_;
};

/// Per-agent sub-seed derivation: each agent's stream depends only on the run
/// seed and its own id, so adding or removing agents leaves the other draws
/// untouched. One splitmix64 scramble of seed xor (golden * (id + 1)).
inline std::uint64_t derive_agent_seed(std::uint64_t run_seed, int agent_id) {
    std::uint64_t s = run_seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(agent_id) + 1));
    Rng r(s);
    return r.next_u64();
}

}  // namespace socnav
