#pragma once

#include <cstdint>
#include <random>

namespace spinbath::rng {

// Per-path RNG streams derived from one master seed by a counter scheme:
// stream k is an mt19937_64 seeded with SplitMix64(master + (k+1)*phi64),
// where phi64 = 2^64/golden ratio. Distinct counters give statistically
// independent, reproducible streams, so ensembles can run in any order or
// in parallel and still produce identical results.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 derive_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::uint64_t s = master_seed + (stream_index + 1) * 0x9E3779B97F4A7C15ULL;
    return std::mt19937_64(splitmix64(splitmix64(s)));
}

} // namespace spinbath::rng
