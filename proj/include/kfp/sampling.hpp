#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kfp {

/// SplitMix64 finalizer; used to derive independent streams from (seed, index).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Small counter-based generator: stateless in (key, counter), so draws are
/// reproducible regardless of evaluation order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  std::uint64_t next_bits() { return mix64(key_ ^ mix64(++counter_)); }
  double uniform() { return to_unit(next_bits()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one value per call, the twin is discarded).
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Additive-recurrence low-discrepancy sequence (generalised golden ratio),
/// shifted by a seed-dependent Cranley-Patterson rotation.
class QuasiRandom {
 public:
  QuasiRandom(std::size_t dim, std::uint64_t seed);
  std::size_t dim() const { return alpha_.size(); }
  /// Point i of the sequence in [0,1)^dim.
  void point(std::size_t i, std::span<double> out) const;

 private:
  std::vector<double> alpha_;
  std::vector<double> shift_;
};

/// Maps u in [0,1)^d to the closed Euclidean ball of radius `radius`
/// (radial stretch of the cube; covers the ball, not volume-uniform).
void cube_to_ball(std::span<const double> u, double radius, std::span<double> out);

}  // namespace kfp
