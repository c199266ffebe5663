#pragma once

#include <cstdint>

namespace vvcsim::detail {

// Minimal LCG kept local so that seeded artifacts are bit-identical across
// standard library implementations.
inline std::uint64_t rng_seed(std::uint64_t seed) {
    return seed * 2862933555777941757ULL + 3037000493ULL;
}

inline double uniform01(std::uint64_t& state) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return double(state >> 11) * 0x1p-53;
}

inline double uniform(std::uint64_t& state, double lo, double hi) {
    return lo + (hi - lo) * uniform01(state);
}

inline int uniform_int(std::uint64_t& state, int lo, int hi) {  // inclusive
    return lo + int(uniform01(state) * double(hi - lo + 1));
}

}  // namespace vvcsim::detail
