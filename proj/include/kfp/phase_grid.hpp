#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kfp/geometry.hpp"

namespace kfp {

/// Uniform tensor grid in phase space (x, v) with cell-centred nodes:
/// x_i = -X + (i + 1/2) hx on the periodic box [-X, X)^d and
/// v_j = -V + (j + 1/2) hv on [-V, V]^d.
///
/// Storage order: x multi-index outer, v multi-index inner, each multi-index
/// row-major (last axis fastest).
struct PhaseGrid {
  int d = 1;
  int nx = 32;
  int nv = 32;
  double X = 1.0;
  double V = 1.0;

  void validate() const;

  double hx() const { return 2.0 * X / nx; }
  double hv() const { return 2.0 * V / nv; }
  double x_node(int i) const { return -X + (i + 0.5) * hx(); }
  double v_node(int j) const { return -V + (j + 0.5) * hv(); }
  /// Phase-space cell volume hx^d hv^d.
  double cell_volume() const;

  std::size_t x_count() const;
  std::size_t v_count() const;
  std::size_t size() const { return x_count() * v_count(); }
  std::size_t index(std::size_t ix, std::size_t iv) const { return ix * v_count() + iv; }

  void unflatten_x(std::size_t ix, std::span<int> idx) const;
  void unflatten_v(std::size_t iv, std::span<int> idx) const;
  std::size_t flatten_x(std::span<const int> idx) const;
  std::size_t flatten_v(std::span<const int> idx) const;

  /// Grid point of a flat phase index at time t.
  KineticPoint point(std::size_t flat, double t) const;

  bool operator==(const PhaseGrid& o) const = default;
};

/// f(x, v) at one time on a PhaseGrid.
struct PhaseGridFunction {
  PhaseGrid grid;
  double time = 0.0;
  std::vector<double> values;

  PhaseGridFunction() = default;
  PhaseGridFunction(const PhaseGrid& g, double t) : grid(g), time(t), values(g.size(), 0.0) {}

  static PhaseGridFunction from_function(const PhaseGrid& g, double t,
                                         const std::function<double(const KineticPoint&)>& fn);

  /// sum f hx^d hv^d
  double mass() const;
  /// sum f^2 hx^d hv^d
  double l2_squared() const;
  double min() const;
  double max() const;
  /// sum |grad_v f|^2 hx^d hv^d with centred differences in the interior and
  /// one-sided differences on the velocity boundary (periodic when asked).
  double grad_v_squared(bool periodic_v) const;
  /// |grad_v f|^2 at one cell, same stencil as grad_v_squared.
  double grad_v_squared_at(std::size_t flat, bool periodic_v) const;
};

}  // namespace kfp
