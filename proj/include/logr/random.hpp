#pragma once

#include <cstdint>
#include <random>

namespace logr {

// splitmix64 — used to derive independent stream seeds from a master seed so
// per-cluster / per-sample work is reproducible regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

// Uniform double in [0,1). Built directly from the generator's bits rather
// than std::uniform_real_distribution, whose output is
// implementation-defined — results must match across toolchains.
inline double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) via rejection sampling (unbiased,
// implementation-independent).
inline std::uint64_t next_index(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

}  // namespace logr
