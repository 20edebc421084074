#pragma once

#include <cstdint>

namespace sqec::rng {

// Counter-based generator: every random value is a pure function of
// (seed, stream tag, counters). Shots, cells and channels can be sampled in
// any order, on any thread, and reproduce bit-identically.

// SplitMix64 finaliser.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27; x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

enum class Stream : std::uint64_t {
    Class0    = 0x11,
    Class1    = 0x22,
    Class2Occ = 0x33,
    Class2Bit = 0x44,
    ModelInit = 0x55,
    Diffusion = 0x66,
    TrainMix  = 0x77,
    Generic   = 0x88,
};

inline std::uint64_t value(std::uint64_t seed, Stream stream,
                           std::uint64_t a = 0, std::uint64_t b = 0,
                           std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t h = mix(seed ^ 0x5851f42d4c957f2dULL);
    h = mix(h ^ static_cast<std::uint64_t>(stream));
    h = mix(h ^ a);
    h = mix(h ^ b);
    h = mix(h ^ c);
    h = mix(h ^ d);
    return h;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline double unit(std::uint64_t seed, Stream stream,
                   std::uint64_t a = 0, std::uint64_t b = 0,
                   std::uint64_t c = 0, std::uint64_t d = 0) {
    return to_unit(value(seed, stream, a, b, c, d));
}

// Per-shot sub-seed so that disjoint shots never share counter state.
inline std::uint64_t shot_seed(std::uint64_t base_seed, std::uint64_t shot) {
    return mix(mix(base_seed ^ 0xd6e8feb86659fd93ULL) ^ shot);
}

}  // namespace sqec::rng
