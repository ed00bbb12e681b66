#pragma once

#include <string>
#include <vector>

namespace kfp {

/// Sobolev exponent of the H^{1/3} embedding in R^{2d+1}: 6(2d+1)/(6d+1).
double sobolev_p(int d);

/// Hoelder exponent produced by a per-level oscillation contraction theta on
/// radii shrinking by omega/2: ln(theta)/ln(omega/2).
double holder_alpha(double theta, double omega);

/// Exponent in the determinant lower bound of the Landau diffusion matrix:
/// (d-1)(gamma+2)+gamma for gamma in [-2, 0], 3 gamma + 2 for gamma in [-d, -2).
double kappa_exponent(double gamma, int d);

/// De Giorgi exponent 3/2 - 1/p - 2/q.
double degiorgi_alpha(double p, double q);

struct ExponentSum {
  double value = 0.0;
  bool alpha_is_one = false;  ///< limit n(n+1)/2 used
};

/// n + alpha (n-1) + ... + alpha^{n-1} in closed form
/// (alpha(alpha^n - 1) - n(alpha - 1)) / (alpha - 1)^2.
ExponentSum exponent_sum(double alpha, int n);
/// Direct summation sum_{j=0}^{n-1} alpha^j (n - j); oracle for exponent_sum.
double exponent_sum_direct(double alpha, int n);

struct DeGiorgiReport {
  double gamma_threshold = 0.0;   ///< beta^{alpha/(alpha-1)^2} V0
  bool converges = false;         ///< gamma_threshold < 1
  std::string verdict;            ///< "converges" or "no conclusion"
  std::vector<double> log_bound;  ///< ln of Gamma^{alpha^n}, n = 0..N
  std::vector<double> log_direct; ///< ln V_n for V_n = beta^n V_{n-1}^alpha
  bool bound_dominates = true;
};

/// Threshold and bound sequence for V_n <= beta^n V_{n-1}^alpha, evaluated in
/// log space. V0 = 0 gives -inf logs (all V_n = 0).
DeGiorgiReport degiorgi_threshold(double beta, double alpha, double V0, int n_terms = 20);

struct MoserReport {
  std::vector<double> partial;  ///< Pi_n, n = 1..N
  double limit_estimate = 0.0;
  double cauchy_gap = 0.0;      ///< |Pi_N - Pi_{N/2}|
};

/// Partial products Pi_n = prod_{k=1}^n (Cbar a^2 k^4)^{1/q_k}, q_k = (p/2)^k.
MoserReport moser_product(double p, double Cbar, double a, int N);

/// C_{0,1} = 1/(r0^2 - r1^2) + r0/(r0^3 - r1^3) + 1/(r0 - r1)^2 + 1.
double gain_constant(double r0, double r1);

/// ((1/2 + R^2)/4)^{q/2}.
double propagation_constant(double R, double q);

}  // namespace kfp
