#pragma once

#include <cstdint>

namespace mvica {

/// Deterministic 64-bit generator (SplitMix64) with stream-hashed seeding.
/// A stream is addressed by (seed, stream) and is independent of every
/// other stream; identical (seed, stream) always reproduces the same draw
/// sequence, bit for bit, on any platform with IEEE-754 doubles.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream);

  uint64_t next_u64();

  /// Uniform in the open interval (0, 1).
  double next_uniform();

  /// Standard normal via Box-Muller (no rejection; two uniforms per pair).
  double next_gaussian();

  /// Laplace(0, 1) by inverse CDF.
  double next_laplace();

 private:
  uint64_t state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace mvica
