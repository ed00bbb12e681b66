#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kfp/geometry.hpp"
#include "kfp/solver.hpp"

namespace kfp {

/// Measured constants of one probe. A constant stored as NaN is reported as
/// "degenerate (0/0)".
struct ProbeReport {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, double>> constants;
  std::string verdict;

  void set(const std::string& key, double value);
  /// Throws std::out_of_range for an unknown key.
  double get(const std::string& key) const;
  bool has(const std::string& key) const;
};

inline constexpr double kDegenerate = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ||f||_{L^p(region)} by grid quadrature; p = infinity gives the max of |f|.
/// Throws when the region contains no grid cell.
double norm_on_cylinder(const Trajectory& traj, const Region& region, double p);

/// ||f||^2_{L^p(Q_int)} against C01^2 ||f||^2_{L^2(Q_ext)} + C01 int_{Q_ext} |s|^2 1_{f>0}
/// with p = 6(2d+1)/(6d+1); reports the ratio C_bar.
ProbeReport gain_probe(const Trajectory& traj, const Cylinder& q_int, const Cylinder& q_ext);

struct LevelSetMeasures {
  double high = 0.0;   ///< |{f >= 1 - theta}|
  double low = 0.0;    ///< |{f <= 0}|
  double mid = 0.0;    ///< |{0 < f < 1 - theta}|
  double total = 0.0;  ///< measure of all cells of the region
};

LevelSetMeasures level_set_measures(const Trajectory& traj, double theta, const Region& region);

/// max - min of f over the grid cells of the region (0 for an empty region).
double oscillation(const Trajectory& traj, const Region& region);

struct HolderLevel {
  double radius = 0.0;
  double osc = 0.0;
  std::size_t cells = 0;
  bool resolvable = false;  ///< at least two grid cells
  bool usable = false;      ///< resolvable and osc above 10 eps times the data scale
};

struct HolderFitResult {
  std::vector<HolderLevel> levels;
  double alpha = kDegenerate;            ///< fitted slope of log osc against log r
  double C = kDegenerate;                ///< exp(intercept)
  double theta_hat = kDegenerate;        ///< geometric mean of per-level contractions, clipped to (0, 1)
  double alpha_predicted = kDegenerate;  ///< ln(theta_hat) / ln(omega/2)
  double alpha_theta = kDegenerate;      ///< ln(theta) / ln(omega/2) for the input theta
  bool degenerate = false;
};

/// Oscillation over Q_{r_k}(z1) with r_k = (omega/2)^k r_tilde / 2, k = 0..K-1,
/// and a least-squares fit of the decay exponent. Throws when fewer than
/// three levels are resolvable or when fewer than three usable levels remain
/// and the data are not constant.
HolderFitResult holder_fit(const Trajectory& traj, const KineticPoint& z1, double theta, double omega, int K,
                           double r_tilde = 1.0);
ProbeReport holder_probe(const Trajectory& traj, const KineticPoint& z1, double theta, double omega, int K,
                         double r_tilde = 1.0);

/// Geometry of the Harnack inequality around a top point z_top:
/// Q+ = Q_R(z_top), Q- = z_top o Q_R(0, 0, -Delta), Q-[i] = z_top o Q_{rho_i}(0, 0, -Delta),
/// Q_1 = Q_1(z_top).
struct HarnackParams {
  double R = 0.5;
  double Delta = 0.5;
  double rho1 = 0.55;
  double rho2 = 0.65;
  double q = 2.0;
  double omega = kDefaultOmega;

  void validate() const;
  double C_pm() const;
  Cylinder q_plus(const KineticPoint& z_top) const;
  Cylinder q_minus(const KineticPoint& z_top) const;
  Cylinder q_minus_i(const KineticPoint& z_top, int i) const;
  Cylinder q_one(const KineticPoint& z_top) const;
};

/// sup_{Q-} f / (inf_{Q+} f + ||s||_{L^inf(Q_1)}).
ProbeReport harnack_probe(const Trajectory& traj, const HarnackParams& params, const KineticPoint& z_top);

struct DoublingResult {
  std::vector<double> inf_levels;  ///< inf over Q^k, k = 0..N
  std::vector<double> h;           ///< h_k = (inf_k / inf_0)^{1/k}, k = 1..N
  double h_min = kDegenerate;
  bool degenerate = false;
};

/// Iterated cylinders T_{z_base}(r Q^k), k = 0..N.
DoublingResult doubling_probe(const Trajectory& traj, double omega, int N, const KineticPoint& z_base, double r);
ProbeReport doubling_report(const Trajectory& traj, double omega, int N, const KineticPoint& z_base, double r);

/// Smooth cutoff: 1 on [-1, 1], 0 outside (-2, 2), with an exp-based square root.
double cutoff_phi(double a);

/// Weighted mean sum f chi / sum chi at the stored time t (physical), with
/// chi = prod phi((x_i - x0_i)/(rho/2)^3) phi((v_i - v0_i)/(rho/2)).
double weighted_mean(const Trajectory& traj, const KineticPoint& z0, double rho, double t);

/// Both sides of the mean-oscillation energy inequality and of the
/// velocity Poincare inequality on cube cylinders around z0.
ProbeReport caccio_bis_probe(const Trajectory& traj, const KineticPoint& z0, double R);

/// Monte Carlo estimate of the squared Gagliardo seminorm
/// int int |f(z) - f(z')|^2 / |z'^{-1} o z|^{D + 2s} over Q x Q, D = 2d + 1.
double fractional_seminorm(const Trajectory& traj, double s_order, const Region& region, std::size_t n_pairs,
                           std::uint64_t seed);

struct GehringParams {
  double q = 1.5;
  double theta = 0.0;
  Cylinder q0;                   ///< cube cylinder bounding every scanned Q_{4R}
  std::vector<double> radii;     ///< trial R values
  std::size_t center_stride = 1; ///< use every n-th cell of Q0 as a centre
  Cylinder q1;                   ///< outer slanted cylinder of the L^{2+eps} ratio
  Cylinder q2;                   ///< inner slanted cylinder
  double eps_cap = 1.0;
};

/// Reverse-Hoelder scan of g = |grad_v f|^2 and tail estimate of the
/// integrability gain of |grad_v f|.
ProbeReport gehring_probe(const Trajectory& traj, const GehringParams& params);

/// min over Q^el_r(z) against C_pm r^{-q} min over Q+, for a ladder of r.
ProbeReport propagation_probe(const Trajectory& traj, const HarnackParams& params, const KineticPoint& z_top,
                              const KineticPoint& z, const std::vector<double>& radii);

/// Local energy inequality as a probe report (see energy_estimate_check).
ProbeReport energy_probe(const Trajectory& traj, const Cylinder& q_int, const Cylinder& q_ext);

/// Squared fractional seminorm on Q_int against ||f||^2_{L^2(Q_ext)} + ||s||^2_{L^2(Q_ext)}.
ProbeReport fractional_probe(const Trajectory& traj, double s_order, const Cylinder& q_int, const Cylinder& q_ext,
                             std::size_t n_pairs, std::uint64_t seed);

nlohmann::ordered_json point_to_json(const KineticPoint& z);
nlohmann::ordered_json cylinder_to_json(const Cylinder& q);
nlohmann::ordered_json region_to_json(const Region& r);

}  // namespace kfp
