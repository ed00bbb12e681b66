#include "kfp/iteration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kfp {

double sobolev_p(int d) {
  if (d < 1) throw std::invalid_argument("sobolev_p: d must be >= 1");
  return 6.0 * (2.0 * d + 1.0) / (6.0 * d + 1.0);
}

double holder_alpha(double theta, double omega) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("holder_alpha: theta must be in (0, 1)");
  if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("holder_alpha: omega must be in (0, 1)");
  // log2 keeps dyadic inputs exact, e.g. theta = 1/2, omega = 1/4 gives 1/3.
  return std::log2(theta) / std::log2(0.5 * omega);
}

double kappa_exponent(double gamma, int d) {
  if (d < 1) throw std::invalid_argument("kappa_exponent: d must be >= 1");
  if (gamma < -d || gamma > 0.0) throw std::invalid_argument("kappa_exponent: gamma must be in [-d, 0]");
  if (gamma >= -2.0) return (d - 1) * (gamma + 2.0) + gamma;
  return 3.0 * gamma + 2.0;
}

double degiorgi_alpha(double p, double q) {
  if (!(p > 0.0 && q > 0.0)) throw std::invalid_argument("degiorgi_alpha: exponents must be positive");
  return 1.5 - 1.0 / p - 2.0 / q;
}

ExponentSum exponent_sum(double alpha, int n) {
  if (n < 1) throw std::invalid_argument("exponent_sum: n must be >= 1");
  if (alpha == 1.0) return {0.5 * n * (n + 1.0), true};
  const double am1 = alpha - 1.0;
  // alpha^n - 1 via expm1 keeps accuracy for alpha close to 1.
  const double an1 = std::expm1(n * std::log(alpha));
  return {(alpha * an1 - n * am1) / (am1 * am1), false};
}

double exponent_sum_direct(double alpha, int n) {
  if (n < 1) throw std::invalid_argument("exponent_sum_direct: n must be >= 1");
  double sum = 0.0;
  double pw = 1.0;
  for (int j = 0; j < n; ++j) {
    sum += pw * (n - j);
    pw *= alpha;
  }
  return sum;
}

DeGiorgiReport degiorgi_threshold(double beta, double alpha, double V0, int n_terms) {
  if (!(alpha > 1.0)) throw std::invalid_argument("degiorgi_threshold: alpha must be > 1");
  if (!(beta >= 1.0)) throw std::invalid_argument("degiorgi_threshold: beta must be >= 1");
  if (!(V0 >= 0.0)) throw std::invalid_argument("degiorgi_threshold: V0 must be >= 0");
  if (n_terms < 0) throw std::invalid_argument("degiorgi_threshold: n_terms must be >= 0");

  DeGiorgiReport rep;
  const double e = alpha / ((alpha - 1.0) * (alpha - 1.0));
  const double log_beta = std::log(beta);
  const double log_v0 = V0 > 0.0 ? std::log(V0) : -std::numeric_limits<double>::infinity();
  const double log_gamma = e * log_beta + log_v0;
  rep.gamma_threshold = std::exp(log_gamma);
  rep.converges = rep.gamma_threshold < 1.0;
  rep.verdict = rep.converges ? "converges" : "no conclusion";

  double log_v = log_v0;
  const double log_alpha = std::log(alpha);
  for (int n = 0; n <= n_terms; ++n) {
    if (n > 0) log_v = n * log_beta + alpha * log_v;
    const double log_bound = V0 > 0.0 ? std::exp(n * log_alpha) * log_gamma : log_v0;
    rep.log_direct.push_back(log_v);
    rep.log_bound.push_back(log_bound);
    if (V0 > 0.0) {
      const double slack = 1e-12 * std::max(1.0, std::abs(log_bound));
      if (log_v > log_bound + slack) rep.bound_dominates = false;
    }
  }
  return rep;
}

MoserReport moser_product(double p, double Cbar, double a, int N) {
  if (!(p > 2.0)) throw std::invalid_argument("moser_product: p must be > 2");
  if (!(Cbar >= 1.0)) throw std::invalid_argument("moser_product: Cbar must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("moser_product: a must be > 0");
  if (N < 1) throw std::invalid_argument("moser_product: N must be >= 1");
  MoserReport rep;
  const double log_half_p = std::log(0.5 * p);
  const double log_ca2 = std::log(Cbar * a * a);
  double log_pi = 0.0;
  for (int k = 1; k <= N; ++k) {
    const double inv_q = std::exp(-k * log_half_p);
    log_pi += inv_q * (log_ca2 + 4.0 * std::log(static_cast<double>(k)));
    rep.partial.push_back(std::exp(log_pi));
  }
  rep.limit_estimate = rep.partial.back();
  rep.cauchy_gap = std::abs(rep.partial.back() - rep.partial[std::max(0, N / 2 - 1)]);
  return rep;
}

double gain_constant(double r0, double r1) {
  if (!(r1 > 0.0 && r1 < r0)) throw std::invalid_argument("gain_constant: need 0 < r1 < r0");
  return 1.0 / (r0 * r0 - r1 * r1) + r0 / (r0 * r0 * r0 - r1 * r1 * r1) + 1.0 / ((r0 - r1) * (r0 - r1)) + 1.0;
}

double propagation_constant(double R, double q) {
  if (!(R > 0.0)) throw std::invalid_argument("propagation_constant: R must be positive");
  return std::pow((0.5 + R * R) / 4.0, 0.5 * q);
}

}  // namespace kfp
