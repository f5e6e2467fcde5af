#pragma once

#include <cstdint>
#include <random>

namespace pinchloc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for replication `index` of an experiment seeded with `seed`.
inline Rng replication_stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix_seed(mix_seed(seed) ^ mix_seed(index + 0x51ed270b27cd6f3bULL)));
}

}  // namespace pinchloc
