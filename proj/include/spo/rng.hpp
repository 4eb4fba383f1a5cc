#pragma once

#include "spo/types.hpp"

#include <array>
#include <cstdint>

namespace spo {

// Deterministic xoshiro256** generator. The bitstream is part of the
// instance-file contract: equal seeds must reproduce instances bitwise on
// every platform, so no std::random machinery is used anywhere.
//
// Seeding: the 256-bit state is filled by four successive splitmix64 steps
// of the seed. Normal draws use Box-Muller on 53-bit uniforms and hand out
// the cosine value first, caching the sine value for the next call.
// permutation() is an in-place Fisher-Yates walking i = n-1..1 with
// j = next_u64() % (i+1).
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller.
  double normal();

  std::vector<Index> permutation(Index n);

private:
  std::array<std::uint64_t, 4> state_{};
  bool has_cached_ = false;
  double cached_ = 0.0;
};

} // namespace spo
