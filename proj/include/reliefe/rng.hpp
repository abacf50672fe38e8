#pragma once

#include <cstdint>
#include <random>

namespace reliefe {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of a run seeded with `seed`. Streams are
/// addressed by (purpose, index) so that parallel schedules draw the same
/// numbers as the serial loop.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                                    std::uint64_t index = 0) noexcept {
    return mix64(mix64(seed ^ mix64(purpose)) + index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, purpose, index));
}

/// Uniform double in [0, 1) with 53 random bits; independent of the
/// standard library's distribution implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by Lemire-style rejection on 64-bit draws.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

// Stream purposes.
namespace stream {
inline constexpr std::uint64_t sparsify = 1;
inline constexpr std::uint64_t layout_init = 2;
inline constexpr std::uint64_t layout_epoch = 3;
inline constexpr std::uint64_t rank_iteration = 4;
inline constexpr std::uint64_t folds = 5;
inline constexpr std::uint64_t synthetic = 6;
}  // namespace stream

}  // namespace reliefe
