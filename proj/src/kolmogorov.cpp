#include "kfp/kolmogorov.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kfp {

Covariance2 kolmogorov_covariance(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("kolmogorov: t must be positive");
  return {2.0 * t * t * t / 3.0, t * t, 2.0 * t};
}

Covariance2 evolve_covariance(const Covariance2& c0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("kolmogorov: t must be non-negative");
  Covariance2 c;
  c.xx = c0.xx + 2.0 * t * c0.xv + t * t * c0.vv + 2.0 * t * t * t / 3.0;
  c.xv = c0.xv + t * c0.vv + t * t;
  c.vv = c0.vv + 2.0 * t;
  return c;
}

double gaussian_density(const Covariance2& c, std::span<const double> x, std::span<const double> v) {
  if (x.size() != v.size() || x.empty()) throw std::invalid_argument("gaussian_density: bad dimensions");
  const double det = c.xx * c.vv - c.xv * c.xv;
  if (!(det > 0.0)) throw std::invalid_argument("gaussian_density: covariance not positive definite");
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  double out = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double q = (c.vv * x[i] * x[i] - 2.0 * c.xv * x[i] * v[i] + c.xx * v[i] * v[i]) / det;
    out *= norm * std::exp(-0.5 * q);
  }
  return out;
}

double kolmogorov_oracle(std::span<const double> x, std::span<const double> v, double t) {
  return gaussian_density(kolmogorov_covariance(t), x, v);
}

double kolmogorov_oracle(double x, double v, double t) {
  return kolmogorov_oracle(std::span<const double>(&x, 1), std::span<const double>(&v, 1), t);
}

}  // namespace kfp
