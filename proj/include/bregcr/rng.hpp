#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bregcr {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based substream: the state is a pure function of (seed, index), so
// sample i draws the same variates no matter which thread evaluates it.
class Substream {
public:
    Substream(std::uint64_t seed, std::uint64_t index)
        : state_(splitmix64_mix(seed ^ splitmix64_mix(index + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        // Box-Muller; the second variate is discarded to keep the stream stateless.
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace bregcr
