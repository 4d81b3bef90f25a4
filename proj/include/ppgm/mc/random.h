#pragma once

#include <cstdint>
#include <random>

namespace ppgm::mc {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` of `seed`. Substreams depend only on
/// (seed, index), so growing a batch never shifts existing paths.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

/// Derives an independent child seed, e.g. one per sub-step of a training loop.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x2545f4914f6cdd1dULL));
}

using Engine = std::mt19937_64;

}  // namespace ppgm::mc
