#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kfp {

/// Largest velocity/position dimension supported by the value types.
inline constexpr int kMaxDim = 3;

/// Default intermediate-value radius; see `Cylinder::omega`.
inline constexpr double kDefaultOmega = 0.25;

/// A phase-space/time point z = (x, v, t) with x, v in R^d.
///
/// Storage is inline (d <= kMaxDim) so points are cheap value types that can
/// be built inside tight grid loops.
class KineticPoint {
 public:
  KineticPoint() = default;
  KineticPoint(std::span<const double> x, std::span<const double> v, double t);
  KineticPoint(std::initializer_list<double> x, std::initializer_list<double> v, double t);

  static KineticPoint origin(int d);

  int dim() const { return d_; }
  std::span<const double> x() const { return {x_.data(), static_cast<std::size_t>(d_)}; }
  std::span<const double> v() const { return {v_.data(), static_cast<std::size_t>(d_)}; }
  std::span<double> x() { return {x_.data(), static_cast<std::size_t>(d_)}; }
  std::span<double> v() { return {v_.data(), static_cast<std::size_t>(d_)}; }
  double x(int i) const { return x_[i]; }
  double v(int i) const { return v_[i]; }
  double t() const { return t_; }
  void set_t(double t) { t_ = t; }

  bool operator==(const KineticPoint& o) const;

 private:
  int d_ = 0;
  std::array<double, kMaxDim> x_{};
  std::array<double, kMaxDim> v_{};
  double t_ = 0.0;
};

/// The Galilean change of frame T_{z0}: z -> (x0 + x + t v0, v0 + v, t0 + t).
struct GalileanTransform {
  KineticPoint base;

  KineticPoint apply(const KineticPoint& z) const;
  KineticPoint apply_inverse(const KineticPoint& z) const;
};

KineticPoint apply_transform(const GalileanTransform& T, const KineticPoint& z);
KineticPoint apply_inverse_transform(const GalileanTransform& T, const KineticPoint& z);

/// Group product z0 o z1 = T_{z0}(z1).
KineticPoint compose(const KineticPoint& z0, const KineticPoint& z1);
/// Group inverse: compose(z, group_inverse(z)) is the origin.
KineticPoint group_inverse(const KineticPoint& z);

/// Kinetic dilation (x, v, t) -> (r^3 x, r v, r^2 t).
KineticPoint scale_point(double r, const KineticPoint& z);

enum class CylinderShape { Slanted, Cube, Elongated, Iterated };

std::string to_string(CylinderShape s);
CylinderShape cylinder_shape_from_string(const std::string& s);

/// Half-open time window (lo, hi].
struct TimeWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t > lo && t <= hi; }
};

/// Axis-aligned bounding box of a time slice of a region, in (x, v).
struct SliceBox {
  std::array<double, kMaxDim> x_lo{}, x_hi{}, v_lo{}, v_hi{};
};

/// Kinetic cylinder families.
///
/// - Slanted:   Q_r(z0) = {|x - x0 - (t - t0) v0| < r^3, |v - v0| < r, t in (t0 - r^2, t0]}
///              with Euclidean norms.
/// - Cube:      coordinate-wise |x_i - x0_i| < r^3, |v_i - v0_i| < r, -r^2 < t - t0 <= 0.
/// - Elongated: T_{z0}(B_{(w/4)^3 r^3} x B_{(w/4) r} x (-r^2, 0]).
/// - Iterated:  T_{z0}(r Q^k) with Q^k = B_{R_k^3} x B_{R_k} x (T_{k-1}, T_k] for k >= 1
///              and Q^0 the unit elongated cylinder.
struct Cylinder {
  KineticPoint center;
  double radius = 1.0;
  CylinderShape shape = CylinderShape::Slanted;
  int index = 0;
  double omega = kDefaultOmega;

  static Cylinder slanted(const KineticPoint& z0, double r);
  static Cylinder cube(const KineticPoint& z0, double r);
  static Cylinder elongated(const KineticPoint& z0, double r, double omega = kDefaultOmega);
  static Cylinder iterated(int k, double omega, const KineticPoint& z0, double r = 1.0);

  int dim() const { return center.dim(); }
  TimeWindow time_window() const;
  /// Bounding box of the slice at time t (empty if t is outside the window).
  std::optional<SliceBox> slice_box(double t) const;
  bool contains(const KineticPoint& z) const;
  /// Lebesgue measure in R^{2d+1}.
  double measure() const;
};

/// Membership predicate for any cylinder shape.
bool cylinder_contains(const Cylinder& Q, const KineticPoint& z);

/// Image of a cylinder under T_{z0}; exact for every shape except Cube with
/// non-zero velocity shift (which is not preserved by the group action).
Cylinder transform_cylinder(const GalileanTransform& T, const Cylinder& Q);

/// R_k = (omega/4) 2^k.
double iterated_radius(int k, double omega);
/// T_k = (4/3)(4^k - 1).
double iterated_time(int k);

/// Q^k = B_{R_k^3} x B_{R_k} x (T_{k-1}, T_k] at the origin, scale 1. Requires k >= 1.
Cylinder iterated_cylinder(int k, double omega, int d = 1);

/// Product set B_{a}(x0) x B_{b}(v0) x (t0 - len, t0] without slanting; used for
/// the intermediate-value region B_1 x B_1 x (-2, 0].
struct BallProduct {
  KineticPoint center;
  double x_radius = 1.0;
  double v_radius = 1.0;
  double t_length = 2.0;

  TimeWindow time_window() const { return {center.t() - t_length, center.t()}; }
  std::optional<SliceBox> slice_box(double t) const;
  bool contains(const KineticPoint& z) const;
  double measure() const;
};

using Region = std::variant<Cylinder, BallProduct>;

TimeWindow region_time_window(const Region& r);
std::optional<SliceBox> region_slice_box(const Region& r, double t);
bool region_contains(const Region& r, const KineticPoint& z);
int region_dim(const Region& r);

/// Paraboloids bracketing the union of iterated cylinders:
///   P^- = {s >= (4/3)((16/w^2) rho^2 - 1), |y| <= rho^3, |w| <= rho}
///   P^+ = same with 16/w^2 replaced by 4/w^2
/// at unit scale; `scale` applies the kinetic dilation.
struct Paraboloid {
  enum class Sign { Minus, Plus };
  Sign sign = Sign::Minus;
  double omega = kDefaultOmega;
  double scale = 1.0;

  /// Slope c in s >= (4/3)(c rho^2 - r^2).
  double slope() const;
  /// Membership of a point expressed relative to the vertex (y, w, s).
  bool contains(const KineticPoint& p) const;
};

struct CoveringParams {
  double delta = 0.2;
  double R = 1e-12;
  double r0 = 0.1;
  double omega = kDefaultOmega;
  std::size_t n_samples = 10000;
  int dim = 1;
  std::uint64_t seed = 0;
};

struct CoveringClaim {
  bool hypothesis_met = true;
  std::size_t checked = 0;
  std::vector<KineticPoint> counterexamples;
  /// "pass", "fail" or "hypothesis unmet".
  std::string verdict;
};

struct CoveringReport {
  CoveringParams params;
  double hypothesis_rhs = 0.0;  ///< R^2 + (4^3/(3 w^2)) (4R)^{1/3}
  CoveringClaim claim_a;
  CoveringClaim claim_b;
};

/// Sampled check of the two covering claims used to chain iterated cylinders
/// from Q^- up to Q^+. Claim (a): every point of (z o rP^+) with t <= 0 lies in
/// Q_1 for z in Q^-, r < r0. Claim (b): z^{-1} o z^+ lies in rP^- for z in Q^-,
/// z^+ in Q^+, evaluated only when delta >= R^2 + (4^3/(3 w^2)) (4R)^{1/3}.
CoveringReport verify_covering(const CoveringParams& params);

/// Test whether every sample of `inner` (quasi-random plus the slice box
/// corners) lies in `outer`.
bool region_subset_sampled(const Cylinder& inner, const Cylinder& outer, std::size_t n_samples,
                           std::uint64_t seed = 0);

struct GroupLawReport {
  std::size_t checks = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  /// Name of the identity with the largest error.
  std::string worst;
};

/// Randomised identities of the group law and of the dilations (eight per
/// sample), each compared with relative tolerance `tol` per coordinate.
GroupLawReport group_law_self_test(std::size_t n, int d, std::uint64_t seed, double tol = 1e-10);

}  // namespace kfp
