#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sca {

using Engine = std::mt19937_64;

/// Independent engine for a (seed, stream) pair. Every random draw in the
/// library flows through here so results depend only on the caller's seed.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Engine(seq);
}

/// Fisher-Yates permutation of 0..n-1. Written out rather than std::shuffle
/// so the order does not depend on the standard library implementation.
inline std::vector<std::size_t> seeded_permutation(std::size_t n, Engine& engine) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(engine() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

// Stream identifiers, kept distinct so draws for different purposes never alias.
namespace streams {
inline constexpr std::uint64_t kFolds = 0x10;
inline constexpr std::uint64_t kCenters = 0x11;
inline constexpr std::uint64_t kMedian = 0x12;
inline constexpr std::uint64_t kDataNoise = 0x20;
inline constexpr std::uint64_t kDataMixture = 0x21;
inline constexpr std::uint64_t kDataColumnBase = 0x100;
}  // namespace streams

}  // namespace sca
