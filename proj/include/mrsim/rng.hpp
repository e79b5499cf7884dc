#pragma once

// Counter-based splittable RNG. Every draw is a pure function of
// (key, counter), and every key is a pure function of the root seed and
// the fork path, so any env/step/robot stream can be reproduced in
// isolation. No global state.

#include <cmath>
#include <cstdint>

#include "mrsim/core.hpp"

namespace mrsim {

namespace detail {
// SplitMix64 finalizer (Steele, Lea & Flood; Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
} // namespace detail

struct SplitRng {
    std::uint64_t key = 0;
    std::uint64_t ctr = 0;

    static SplitRng from_seed(std::uint64_t seed) {
        return {detail::mix64(seed + detail::kGamma), 0};
    }

    /// Independent child stream; children with distinct tags do not
    /// overlap the parent or each other.
    SplitRng fork(std::uint64_t tag) const {
        return {detail::mix64(key ^ detail::mix64(tag * detail::kGamma + 0x632BE59BD9B4E019ULL)), 0};
    }

    std::uint64_t next_u64() {
        ++ctr;
        return detail::mix64(key + ctr * detail::kGamma);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// One standard normal draw (Box-Muller; the second value is discarded
    /// so the state stays a plain counter).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }
};

} // namespace mrsim
