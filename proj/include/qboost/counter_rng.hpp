#pragma once

// Counter-based random numbers: every draw is a pure function of its key, so
// results do not depend on evaluation order or thread scheduling.

#include <cstdint>

namespace qboost {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ stream) ^ (counter * 0xd1b54a32d192ed03ULL));
}

/// Uniform double in [0, 1) for the key (seed, stream, counter).
constexpr double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(hash_key(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Bernoulli(p) draw; p <= 0 and p >= 1 are decided without hashing.
constexpr int bernoulli(double p, std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return 1;
    return uniform01(seed, stream, counter) < p ? 1 : 0;
}

/// Derives an independent seed for sub-run `index` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return hash_key(seed, 0x5eedULL, index);
}

}  // namespace qboost
