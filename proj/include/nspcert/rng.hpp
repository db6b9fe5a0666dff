#pragma once

#include <cstdint>

namespace nspcert {

/// Counter-based generator: the k-th draw of a stream is the SplitMix64
/// finalizer applied to seed + (k + 1) * 0x9E3779B97F4A7C15. Draws are a pure
/// function of (seed, k), so streams are reproducible bit-for-bit and can be
/// split across threads without coordination.
///
/// Normals use Box-Muller on pairs: normal(2j) and normal(2j+1) are the
/// cosine and sine outputs built from uniform_open(2j) and uniform_open(2j+1).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t counter) const noexcept;

  /// (bits >> 11 + 1) * 2^-53, in (0, 1].
  double uniform_open(std::uint64_t counter) const noexcept;

  /// Standard normal variate number `index`.
  double normal(std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
};

}  // namespace nspcert
