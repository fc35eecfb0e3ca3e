// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace besov {

// Deterministic random stream: xoshiro256++ whose state is expanded from a
// 64-bit lineage value via SplitMix64.
//
// Splitting scheme: a stream remembers the lineage it was built from, and
// derive(key) produces a child stream with lineage splitmix(lineage ^
// splitmix(key)).  Child lineages depend only on the seed and the key path,
// never on how many variates the parent has consumed, so worker streams
// derived as rng.derive(n).derive(replicate) are reproducible regardless of
// scheduling order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream derive(std::uint64_t key) const;

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform01();

  // Uniform integer in [0, n), n >= 1. Multiply-shift map of one 64-bit draw.
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  // Exponential(1) through the inverse CDF.
  double exponential();

  // Standard Laplace (density e^{-|z|}/2) through the inverse CDF, one
  // uniform per variate.
  double laplace();

  std::uint64_t lineage() const { return lineage_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t lineage_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace besov
