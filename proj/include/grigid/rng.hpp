#pragma once

#include <cstdint>

namespace grigid::rng {

// SplitMix64. Counter-based: the i-th output is a pure function of (seed, i),
// so independent streams can be split off deterministically and evaluated in
// any order.

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// i-th value of the stream identified by `seed`.
inline constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t i) {
    return mix(seed + (i + 1) * kGamma);
}

/// Derives an independent child stream seed.
inline constexpr std::uint64_t split(std::uint64_t seed, std::uint64_t stream) {
    return mix(seed ^ mix(stream * kGamma + 1));
}

/// Uniform double in [0, 1) from 64 random bits.
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential convenience wrapper over the counter scheme.
struct Stream {
    std::uint64_t seed{0};
    std::uint64_t counter{0};

    explicit Stream(std::uint64_t s) : seed(s) {}

    std::uint64_t next() { return at(seed, counter++); }
    double next_unit() { return to_unit(next()); }

    /// Uniform integer in [0, k).
    std::uint64_t next_below(std::uint64_t k) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * k) >> 64);
    }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
};

}  // namespace grigid::rng
