#include "kfp/landau.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kfp/iteration.hpp"
#include "landau_detail.hpp"

namespace kfp {

std::vector<std::string> LandauParams::validate() const {
  if (d < 1 || d > 3) throw std::invalid_argument("LandauParams: d must be in [1, 3]");
  if (gamma < -d || gamma > 1.0) throw std::invalid_argument("LandauParams: gamma must be in [-d, 1]");
  if (!(gamma + 2.0 > -d)) throw std::invalid_argument("LandauParams: kernel not integrable (gamma + 2 <= -d)");
  if (!(a_const > 0.0 && b_const > 0.0 && c_const > 0.0)) {
    throw std::invalid_argument("LandauParams: constants must be positive");
  }
  std::vector<std::string> warnings;
  if (gamma > 0.0) {
    warnings.emplace_back("hard potential gamma in (0, 1]: coefficient bounds assume an extra moment on f");
  }
  return warnings;
}

double VelocityGrid::cell_volume() const { return std::pow(h(), d); }

std::size_t VelocityGrid::size() const {
  std::size_t s = 1;
  for (int j = 0; j < d; ++j) s *= static_cast<std::size_t>(n);
  return s;
}

void VelocityGrid::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int j = d - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
  }
}

std::size_t VelocityGrid::flatten(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int j = 0; j < d; ++j) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[j]);
  return flat;
}

VelocityGridFunction maxwellian(const VelocityGrid& grid, double mass, double temperature) {
  const double norm = mass / std::pow(2.0 * std::numbers::pi * temperature, 0.5 * grid.d);
  return VelocityGridFunction::from_function(grid, [&](std::span<const double> v) {
    double v2 = 0.0;
    for (double c : v) v2 += c * c;
    return norm * std::exp(-0.5 * v2 / temperature);
  });
}

Moments moments(const VelocityGridFunction& f) {
  const VelocityGrid& g = f.grid;
  if (f.values.size() != g.size()) throw std::invalid_argument("moments: value count does not match grid");
  const double dv = g.cell_volume();
  Moments m;
  std::vector<int> idx(g.d);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const double fk = f.values[k];
    if (fk < 0.0 || !std::isfinite(fk)) throw std::invalid_argument("moments: densities must be finite and non-negative");
    if (fk == 0.0) continue;
    g.unflatten(k, idx);
    double v2 = 0.0;
    for (int j = 0; j < g.d; ++j) {
      const double vj = g.node(idx[j]);
      v2 += vj * vj;
    }
    m.mass += fk * dv;
    m.energy += 0.5 * fk * v2 * dv;
    m.entropy += fk * std::log(fk) * dv;
  }
  return m;
}

Eigen::MatrixXd LandauFields::A_at(std::size_t k) const {
  Eigen::MatrixXd M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = A[k * d * d + i * d + j];
  return M;
}

Eigen::VectorXd LandauFields::B_at(std::size_t k) const {
  Eigen::VectorXd b(d);
  for (int i = 0; i < d; ++i) b(i) = B[k * d + i];
  return b;
}

double cell_average_power(int d, double gamma, double h) {
  if (!(gamma > -d)) throw std::invalid_argument("cell_average_power: gamma must exceed -d");
  // Cone decomposition of the unit cube [-1/2, 1/2]^d from the origin: each of
  // the 2d faces contributes (1/2)/(gamma + d) * int_face |y|^gamma dA, the face
  // integrand being smooth (|y| >= 1/2). Tensor Gauss-Legendre on the face.
  static constexpr std::array<double, 8> gl_x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                              0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> gl_w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  double face = 0.0;
  if (d == 1) {
    face = std::pow(0.5, gamma);
  } else {
    // Face y_1 = 1/2, remaining coordinates in [-1/2, 1/2]^{d-1}, split in 4 sub-panels per axis.
    const int panels = 4;
    const int m = d - 1;
    const int per_axis = panels * static_cast<int>(gl_x.size());
    std::vector<double> nodes(per_axis), weights(per_axis);
    for (int p = 0; p < panels; ++p) {
      const double a = -0.5 + p / static_cast<double>(panels);
      const double half = 0.5 / panels;
      for (std::size_t q = 0; q < gl_x.size(); ++q) {
        nodes[p * gl_x.size() + q] = a + half * (1.0 + gl_x[q]);
        weights[p * gl_x.size() + q] = half * gl_w[q];
      }
    }
    std::vector<int> idx(m, 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(per_axis, m));
    for (std::size_t it = 0; it < total; ++it) {
      std::size_t rem = it;
      double r2 = 0.25;
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        const int k = static_cast<int>(rem % per_axis);
        rem /= per_axis;
        r2 += nodes[k] * nodes[k];
        w *= weights[k];
      }
      face += w * std::pow(r2, 0.5 * gamma);
    }
  }
  const double unit = 2.0 * d * 0.5 / (gamma + d) * face;
  return unit * std::pow(h, gamma);
}

namespace {

void check_node(const VelocityGridFunction& f, std::span<const int> node) {
  if (static_cast<int>(node.size()) != f.grid.d) throw std::invalid_argument("landau: node dimension mismatch");
  for (int c : node) {
    if (c < 0 || c >= f.grid.n) throw std::out_of_range("landau: evaluation node outside the grid");
  }
}

}  // namespace

Eigen::MatrixXd landau_A(const VelocityGridFunction& f, const LandauParams& p, std::span<const int> node,
                         Padding padding) {
  p.validate();
  check_node(f, node);
  const detail::KernelTable K(f.grid, p);
  const std::size_t k = f.grid.flatten(node);
  std::vector<double> out(static_cast<std::size_t>(K.n_components()), 0.0);
  detail::direct_sum_at(f, K, k, padding, out);
  Eigen::MatrixXd A(p.d, p.d);
  for (int i = 0; i < p.d; ++i)
    for (int j = 0; j < p.d; ++j) A(i, j) = out[K.a_component(i, j)];
  return A;
}

Eigen::VectorXd landau_B(const VelocityGridFunction& f, const LandauParams& p, std::span<const int> node,
                         Padding padding) {
  p.validate();
  check_node(f, node);
  const detail::KernelTable K(f.grid, p);
  const std::size_t k = f.grid.flatten(node);
  std::vector<double> out(static_cast<std::size_t>(K.n_components()), 0.0);
  detail::direct_sum_at(f, K, k, padding, out);
  Eigen::VectorXd B(p.d);
  for (int i = 0; i < p.d; ++i) B(i) = out[K.b_component(i)];
  return B;
}

double landau_c(const VelocityGridFunction& f, const LandauParams& p, std::span<const int> node, Padding padding) {
  p.validate();
  check_node(f, node);
  const std::size_t k = f.grid.flatten(node);
  if (p.gamma == -p.d) return p.c_const * f.values[k];
  const detail::KernelTable K(f.grid, p);
  std::vector<double> out(static_cast<std::size_t>(K.n_components()), 0.0);
  detail::direct_sum_at(f, K, k, padding, out);
  return out[K.c_component()];
}

BoundsReport check_coefficient_bounds(const VelocityGridFunction& f, const LandauParams& p,
                                      const MomentBounds& bounds) {
  BoundsReport rep;
  rep.params = p;
  rep.warnings = p.validate();
  rep.moments = moments(f);
  const Moments& m = rep.moments;
  if (!(m.mass >= bounds.M1 && m.mass <= bounds.M0 && m.energy <= bounds.E0 && m.entropy <= bounds.H0)) {
    throw std::invalid_argument("check_coefficient_bounds: moments outside the (M1, M0, E0, H0) window");
  }
  const int d = p.d;
  const double g = p.gamma;
  rep.kappa = g <= 0.0 ? kappa_exponent(g, d) : (d - 1) * (g + 2.0) + g;
  if (d == 1) rep.warnings.emplace_back("d = 1: the projection I - w/|w| (x) w/|w| vanishes, so A = 0");

  rep.f_sup = *std::max_element(f.values.begin(), f.values.end());
  const LandauFields F = landau_fields_fft(f, p);

  const double shape_A_inf = std::pow(rep.f_sup, std::abs(g + 2.0) / d);
  const double shape_B_inf = std::pow(rep.f_sup, std::abs(g + 1.0) / d);
  const double shape_c = g == 0.0 ? 1.0 : std::pow(rep.f_sup, std::abs(g) / d);

  double min_det = std::numeric_limits<double>::infinity();
  double max_a = 0.0, max_b = 0.0, max_c = 0.0;
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < F.size(); ++k) {
    f.grid.unflatten(k, idx);
    double v2 = 0.0;
    for (int j = 0; j < d; ++j) v2 += f.grid.node(idx[j]) * f.grid.node(idx[j]);
    const double jv = 1.0 + std::sqrt(v2);
    const Eigen::MatrixXd A = F.A_at(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    const double normA = es.eigenvalues().cwiseAbs().maxCoeff();
    min_det = std::min(min_det, A.determinant() / std::pow(jv, rep.kappa));
    const double shape_A = (g >= -2.0) ? std::pow(jv, g + 2.0) : shape_A_inf;
    const double shape_B = (g >= -1.0) ? std::pow(jv, g + 1.0) : shape_B_inf;
    max_a = std::max(max_a, normA / shape_A);
    max_b = std::max(max_b, F.B_at(k).norm() / shape_B);
    max_c = std::max(max_c, std::abs(F.c[k]) / shape_c);
  }
  rep.min_det_ratio = min_det;
  rep.max_A_ratio = max_a;
  rep.max_B_ratio = max_b;
  rep.max_c_ratio = max_c;
  rep.lower_bound_ok = min_det > 0.0;
  return rep;
}

}  // namespace kfp
