#include "kfp/phase_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace kfp {

void PhaseGrid::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("phase grid: d must be in [1, 3]");
  if (nx < 2 || nv < 2) throw std::invalid_argument("phase grid: need at least two nodes per axis");
  if (!(X > 0.0 && V > 0.0 && std::isfinite(X) && std::isfinite(V))) {
    throw std::invalid_argument("phase grid: extents must be positive and finite");
  }
}

double PhaseGrid::cell_volume() const { return std::pow(hx() * hv(), d); }

std::size_t PhaseGrid::x_count() const {
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(nx);
  return n;
}

std::size_t PhaseGrid::v_count() const {
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(nv);
  return n;
}

void PhaseGrid::unflatten_x(std::size_t ix, std::span<int> idx) const {
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(ix % static_cast<std::size_t>(nx));
    ix /= static_cast<std::size_t>(nx);
  }
}

void PhaseGrid::unflatten_v(std::size_t iv, std::span<int> idx) const {
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(iv % static_cast<std::size_t>(nv));
    iv /= static_cast<std::size_t>(nv);
  }
}

std::size_t PhaseGrid::flatten_x(std::span<const int> idx) const {
  std::size_t e = 0;
  for (int a = 0; a < d; ++a) e = e * static_cast<std::size_t>(nx) + static_cast<std::size_t>(idx[a]);
  return e;
}

std::size_t PhaseGrid::flatten_v(std::span<const int> idx) const {
  std::size_t e = 0;
  for (int a = 0; a < d; ++a) e = e * static_cast<std::size_t>(nv) + static_cast<std::size_t>(idx[a]);
  return e;
}

KineticPoint PhaseGrid::point(std::size_t flat, double t) const {
  const std::size_t nvc = v_count();
  std::array<int, kMaxDim> ix{}, iv{};
  unflatten_x(flat / nvc, ix);
  unflatten_v(flat % nvc, iv);
  std::array<double, kMaxDim> x{}, v{};
  for (int a = 0; a < d; ++a) {
    x[a] = x_node(ix[a]);
    v[a] = v_node(iv[a]);
  }
  return KineticPoint(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d), t);
}

PhaseGridFunction PhaseGridFunction::from_function(const PhaseGrid& g, double t,
                                                   const std::function<double(const KineticPoint&)>& fn) {
  g.validate();
  PhaseGridFunction f(g, t);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = fn(g.point(k, t));
  return f;
}

double PhaseGridFunction::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double PhaseGridFunction::l2_squared() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s * grid.cell_volume();
}

double PhaseGridFunction::min() const { return *std::min_element(values.begin(), values.end()); }
double PhaseGridFunction::max() const { return *std::max_element(values.begin(), values.end()); }

double PhaseGridFunction::grad_v_squared_at(std::size_t flat, bool periodic_v) const {
  const int d = grid.d;
  const int n = grid.nv;
  const double hv = grid.hv();
  const std::size_t nvc = grid.v_count();
  const std::size_t base = flat - flat % nvc;
  std::array<int, kMaxDim> iv{};
  grid.unflatten_v(flat % nvc, iv);
  // Stride of velocity axis a inside one x-slice.
  std::size_t stride = 1;
  double g2 = 0.0;
  for (int a = d - 1; a >= 0; --a) {
    const int j = iv[a];
    int jm = j - 1, jp = j + 1;
    double span = 2.0;
    if (periodic_v) {
      jm = (jm + n) % n;
      jp = jp % n;
    } else {
      if (jm < 0) { jm = j; span = 1.0; }
      if (jp >= n) { jp = j; span = 1.0; }
    }
    const std::size_t cur = flat - base;
    const std::size_t pm = cur - static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(jm) * stride;
    const std::size_t pp = cur - static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(jp) * stride;
    const double g = (values[base + pp] - values[base + pm]) / (span * hv);
    g2 += g * g;
    stride *= static_cast<std::size_t>(n);
  }
  return g2;
}

double PhaseGridFunction::grad_v_squared(bool periodic_v) const {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += grad_v_squared_at(k, periodic_v);
  return s * grid.cell_volume();
}

}  // namespace kfp
