#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kfp/landau.hpp"

namespace kfp::detail {

/// Convolution kernels of A, B and c tabulated on every lattice offset
/// m in [-(n-1), n-1]^d, each entry already multiplied by its constant and by
/// the cell volume h^d. Component order: A (d*d, row-major), B (d), c (1).
class KernelTable {
 public:
  KernelTable(const VelocityGrid& grid, const LandauParams& p);

  int n_components() const { return ncomp_; }
  int a_component(int i, int j) const { return i * d_ + j; }
  int b_component(int i) const { return d_ * d_ + i; }
  int c_component() const { return d_ * d_ + d_; }
  bool c_is_local() const { return c_local_; }

  /// Entries for a lattice offset (each coordinate within [-(n-1), n-1]).
  const double* at(std::span<const int> offset) const;
  /// Value of one component at a lattice offset given per axis.
  double value(std::span<const int> offset, int component) const { return at(offset)[component]; }

 private:
  int d_;
  int n_;
  int ncomp_;
  bool c_local_;
  std::vector<double> table_;
};

/// Direct sum of all components at output node `k_out`.
void direct_sum_at(const VelocityGridFunction& f, const KernelTable& K, std::size_t k_out, Padding padding,
                   std::span<double> out);

/// Wraps a lattice difference to its minimal periodic image in [-n/2, n/2).
inline int periodic_image(int m, int n) {
  int r = ((m % n) + n) % n;
  if (2 * r >= n) r -= n;
  return r;
}

}  // namespace kfp::detail
