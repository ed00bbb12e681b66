#pragma once

#include <array>
#include <span>

namespace kfp {

/// Per-dimension covariance of (x, v): {var_x, cov_xv, var_v}.
struct Covariance2 {
  double xx = 0.0;
  double xv = 0.0;
  double vv = 0.0;
};

/// Covariance of the fundamental solution of d_t f + v . grad_x f = Lap_v f
/// after time t from a point mass: {2t^3/3, t^2, 2t} in every dimension.
Covariance2 kolmogorov_covariance(double t);

/// Covariance at time t of the same equation started from a centred Gaussian
/// with covariance c0: Phi c0 Phi^T + K(t) with Phi = [[1, t], [0, 1]].
Covariance2 evolve_covariance(const Covariance2& c0, double t);

/// Density of the centred Gaussian in (x, v) in R^{2d} with the same 2x2
/// covariance in each dimension (independent across dimensions).
double gaussian_density(const Covariance2& c, std::span<const double> x, std::span<const double> v);

/// Fundamental solution from a point mass at the origin, t > 0.
double kolmogorov_oracle(std::span<const double> x, std::span<const double> v, double t);
double kolmogorov_oracle(double x, double v, double t);

}  // namespace kfp
