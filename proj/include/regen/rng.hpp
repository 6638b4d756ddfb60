#pragma once

#include <cstdint>
#include <random>

namespace regen {

using Rng = std::mt19937_64;

/// Stream tags keep the random streams of different pipeline stages disjoint
/// even when callers reuse one seed for everything.
enum class Stream : std::uint64_t {
  kSimulation = 1,
  kSplitFlags = 2,
  kMultiplier = 3,
  kGaussianOracle = 4,
  kIndependentBlocks = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Generator for substream `index` of `tag` under `seed`. Substreams are a pure
/// function of (seed, tag, index), so replication r can be reproduced alone.
Rng make_stream(std::uint64_t seed, Stream tag, std::uint64_t index = 0);

}  // namespace regen
