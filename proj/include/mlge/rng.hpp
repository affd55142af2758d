#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mlge {

// All randomness in a run flows from one user seed. Each pipeline stage
// draws from its own named sub-stream so stages stay independently
// reproducible when re-run in isolation.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
    // FNV-1a over the name, mixed with the seed via splitmix64.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view stream) {
    return Rng(substream_seed(seed, stream));
}

// Unbiased-enough bounded draw for hot loops (Lemire multiply-shift).
// n must be > 0.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

} // namespace mlge
