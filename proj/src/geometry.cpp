#include "kfp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kfp/sampling.hpp"

namespace kfp {

namespace {

void require_same_dim(const KineticPoint& a, const KineticPoint& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("kinetic point dimension mismatch: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
  }
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double c : a) s += c * c;
  return std::sqrt(s);
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Membership of a point already pulled back to the frame of the cylinder
/// centre and undilated: |y| < xr, |w| < vr, s in (s_lo, s_hi].
bool in_ball_product(const KineticPoint& p, double xr, double vr, double s_lo, double s_hi) {
  if (!(p.t() > s_lo && p.t() <= s_hi)) return false;
  return norm2(p.v()) < vr && norm2(p.x()) < xr;
}

}  // namespace

KineticPoint::KineticPoint(std::span<const double> x, std::span<const double> v, double t) : t_(t) {
  if (x.size() != v.size()) {
    throw std::invalid_argument("KineticPoint: x and v must have the same dimension");
  }
  if (x.empty() || x.size() > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument("KineticPoint: dimension must be in [1, 3]");
  }
  d_ = static_cast<int>(x.size());
  std::copy(x.begin(), x.end(), x_.begin());
  std::copy(v.begin(), v.end(), v_.begin());
}

KineticPoint::KineticPoint(std::initializer_list<double> x, std::initializer_list<double> v, double t)
    : KineticPoint(std::span<const double>(x.begin(), x.size()),
                   std::span<const double>(v.begin(), v.size()), t) {}

KineticPoint KineticPoint::origin(int d) {
  const std::array<double, kMaxDim> zero{};
  return KineticPoint(std::span<const double>(zero.data(), d), std::span<const double>(zero.data(), d), 0.0);
}

bool KineticPoint::operator==(const KineticPoint& o) const {
  if (d_ != o.d_ || t_ != o.t_) return false;
  for (int i = 0; i < d_; ++i) {
    if (x_[i] != o.x_[i] || v_[i] != o.v_[i]) return false;
  }
  return true;
}

KineticPoint GalileanTransform::apply(const KineticPoint& z) const {
  require_same_dim(base, z);
  KineticPoint out = z;
  for (int i = 0; i < z.dim(); ++i) {
    out.x()[i] = base.x(i) + z.x(i) + z.t() * base.v(i);
    out.v()[i] = base.v(i) + z.v(i);
  }
  out.set_t(base.t() + z.t());
  return out;
}

KineticPoint GalileanTransform::apply_inverse(const KineticPoint& z) const {
  require_same_dim(base, z);
  KineticPoint out = z;
  const double dt = z.t() - base.t();
  for (int i = 0; i < z.dim(); ++i) {
    out.x()[i] = z.x(i) - base.x(i) - dt * base.v(i);
    out.v()[i] = z.v(i) - base.v(i);
  }
  out.set_t(dt);
  return out;
}

KineticPoint apply_transform(const GalileanTransform& T, const KineticPoint& z) { return T.apply(z); }

KineticPoint apply_inverse_transform(const GalileanTransform& T, const KineticPoint& z) {
  return T.apply_inverse(z);
}

KineticPoint compose(const KineticPoint& z0, const KineticPoint& z1) {
  return GalileanTransform{z0}.apply(z1);
}

KineticPoint group_inverse(const KineticPoint& z) {
  KineticPoint out = z;
  for (int i = 0; i < z.dim(); ++i) {
    out.x()[i] = -z.x(i) + z.t() * z.v(i);
    out.v()[i] = -z.v(i);
  }
  out.set_t(-z.t());
  return out;
}

KineticPoint scale_point(double r, const KineticPoint& z) {
  if (!(r > 0.0)) throw std::invalid_argument("scale_point: r must be positive");
  KineticPoint out = z;
  const double r3 = r * r * r;
  for (int i = 0; i < z.dim(); ++i) {
    out.x()[i] = r3 * z.x(i);
    out.v()[i] = r * z.v(i);
  }
  out.set_t(r * r * z.t());
  return out;
}

std::string to_string(CylinderShape s) {
  switch (s) {
    case CylinderShape::Slanted: return "slanted";
    case CylinderShape::Cube: return "cube";
    case CylinderShape::Elongated: return "elongated";
    case CylinderShape::Iterated: return "iterated";
  }
  return "unknown";
}

CylinderShape cylinder_shape_from_string(const std::string& s) {
  if (s == "slanted") return CylinderShape::Slanted;
  if (s == "cube") return CylinderShape::Cube;
  if (s == "elongated") return CylinderShape::Elongated;
  if (s == "iterated") return CylinderShape::Iterated;
  throw std::invalid_argument("unknown cylinder shape '" + s + "'");
}

double iterated_radius(int k, double omega) { return 0.25 * omega * std::ldexp(1.0, k); }

double iterated_time(int k) { return (4.0 / 3.0) * (std::ldexp(1.0, 2 * k) - 1.0); }

Cylinder Cylinder::slanted(const KineticPoint& z0, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
  return Cylinder{z0, r, CylinderShape::Slanted, 0, kDefaultOmega};
}

Cylinder Cylinder::cube(const KineticPoint& z0, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
  return Cylinder{z0, r, CylinderShape::Cube, 0, kDefaultOmega};
}

Cylinder Cylinder::elongated(const KineticPoint& z0, double r, double omega) {
  if (!(r > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  return Cylinder{z0, r, CylinderShape::Elongated, 0, omega};
}

Cylinder Cylinder::iterated(int k, double omega, const KineticPoint& z0, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
  if (k < 0) throw std::invalid_argument("iterated cylinder index must be >= 0");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  return Cylinder{z0, r, CylinderShape::Iterated, k, omega};
}

Cylinder iterated_cylinder(int k, double omega, int d) {
  if (k < 1) throw std::invalid_argument("iterated_cylinder: k must be >= 1");
  if (!(omega > 0.0 && omega < 0.5)) throw std::invalid_argument("iterated_cylinder: omega must be in (0, 1/2)");
  return Cylinder::iterated(k, omega, KineticPoint::origin(d), 1.0);
}

TimeWindow Cylinder::time_window() const {
  const double r2 = radius * radius;
  const double t0 = center.t();
  if (shape == CylinderShape::Iterated && index >= 1) {
    return {t0 + r2 * iterated_time(index - 1), t0 + r2 * iterated_time(index)};
  }
  return {t0 - r2, t0};
}

namespace {

/// Euclidean half-widths (x, v) of the undilated cross-section.
std::pair<double, double> unit_widths(const Cylinder& Q) {
  switch (Q.shape) {
    case CylinderShape::Slanted:
    case CylinderShape::Cube: return {1.0, 1.0};
    case CylinderShape::Elongated: {
      const double a = 0.25 * Q.omega;
      return {a * a * a, a};
    }
    case CylinderShape::Iterated: {
      const double a = Q.index == 0 ? 0.25 * Q.omega : iterated_radius(Q.index, Q.omega);
      return {a * a * a, a};
    }
  }
  return {1.0, 1.0};
}

}  // namespace

std::optional<SliceBox> Cylinder::slice_box(double t) const {
  if (!time_window().contains(t)) return std::nullopt;
  const auto [xu, vu] = unit_widths(*this);
  const double r3 = radius * radius * radius;
  const double xr = xu * r3;
  const double vr = vu * radius;
  const bool slant = shape != CylinderShape::Cube;
  SliceBox box;
  for (int i = 0; i < dim(); ++i) {
    const double xc = center.x(i) + (slant ? (t - center.t()) * center.v(i) : 0.0);
    box.x_lo[i] = xc - xr;
    box.x_hi[i] = xc + xr;
    box.v_lo[i] = center.v(i) - vr;
    box.v_hi[i] = center.v(i) + vr;
  }
  return box;
}

bool Cylinder::contains(const KineticPoint& z) const {
  require_same_dim(center, z);
  const double r = radius;
  const double r2 = r * r;
  const double r3 = r2 * r;
  switch (shape) {
    case CylinderShape::Slanted: {
      const KineticPoint p = GalileanTransform{center}.apply_inverse(z);
      return in_ball_product(p, r3, r, -r2, 0.0);
    }
    case CylinderShape::Cube: {
      const double dt = z.t() - center.t();
      if (!(dt > -r2 && dt <= 0.0)) return false;
      for (int i = 0; i < z.dim(); ++i) {
        if (!(std::abs(z.x(i) - center.x(i)) < r3)) return false;
        if (!(std::abs(z.v(i) - center.v(i)) < r)) return false;
      }
      return true;
    }
    case CylinderShape::Elongated: {
      const double a = 0.25 * omega;
      const KineticPoint p = GalileanTransform{center}.apply_inverse(z);
      return in_ball_product(p, a * a * a * r3, a * r, -r2, 0.0);
    }
    case CylinderShape::Iterated: {
      const KineticPoint p = scale_point(1.0 / r, GalileanTransform{center}.apply_inverse(z));
      if (index == 0) {
        const double a = 0.25 * omega;
        return in_ball_product(p, a * a * a, a, -1.0, 0.0);
      }
      const double Rk = iterated_radius(index, omega);
      return in_ball_product(p, Rk * Rk * Rk, Rk, iterated_time(index - 1), iterated_time(index));
    }
  }
  return false;
}

double Cylinder::measure() const {
  const int d = dim();
  const double r = radius;
  const double wd = unit_ball_volume(d);
  switch (shape) {
    case CylinderShape::Slanted: return wd * wd * std::pow(r, 4 * d) * r * r;
    case CylinderShape::Cube: return std::pow(2.0 * r * r * r, d) * std::pow(2.0 * r, d) * r * r;
    case CylinderShape::Elongated:
    case CylinderShape::Iterated: {
      const auto [xu, vu] = unit_widths(*this);
      const TimeWindow w = time_window();
      return wd * wd * std::pow(xu * r * r * r, d) * std::pow(vu * r, d) * (w.hi - w.lo);
    }
  }
  return 0.0;
}

bool cylinder_contains(const Cylinder& Q, const KineticPoint& z) { return Q.contains(z); }

Cylinder transform_cylinder(const GalileanTransform& T, const Cylinder& Q) {
  if (Q.shape == CylinderShape::Cube) {
    for (int i = 0; i < T.base.dim(); ++i) {
      if (T.base.v(i) != 0.0) {
        throw std::invalid_argument("cube cylinders are not preserved by a velocity shift");
      }
    }
  }
  Cylinder out = Q;
  out.center = compose(T.base, Q.center);
  return out;
}

std::optional<SliceBox> BallProduct::slice_box(double t) const {
  if (!time_window().contains(t)) return std::nullopt;
  SliceBox box;
  for (int i = 0; i < center.dim(); ++i) {
    box.x_lo[i] = center.x(i) - x_radius;
    box.x_hi[i] = center.x(i) + x_radius;
    box.v_lo[i] = center.v(i) - v_radius;
    box.v_hi[i] = center.v(i) + v_radius;
  }
  return box;
}

bool BallProduct::contains(const KineticPoint& z) const {
  require_same_dim(center, z);
  if (!time_window().contains(z.t())) return false;
  double sx = 0.0, sv = 0.0;
  for (int i = 0; i < z.dim(); ++i) {
    const double dx = z.x(i) - center.x(i);
    const double dv = z.v(i) - center.v(i);
    sx += dx * dx;
    sv += dv * dv;
  }
  return std::sqrt(sx) < x_radius && std::sqrt(sv) < v_radius;
}

double BallProduct::measure() const {
  const int d = center.dim();
  const double wd = unit_ball_volume(d);
  return wd * wd * std::pow(x_radius, d) * std::pow(v_radius, d) * t_length;
}

TimeWindow region_time_window(const Region& r) {
  return std::visit([](const auto& q) { return q.time_window(); }, r);
}

std::optional<SliceBox> region_slice_box(const Region& r, double t) {
  return std::visit([t](const auto& q) { return q.slice_box(t); }, r);
}

bool region_contains(const Region& r, const KineticPoint& z) {
  return std::visit([&z](const auto& q) { return q.contains(z); }, r);
}

int region_dim(const Region& r) {
  return std::visit([](const auto& q) { return q.center.dim(); }, r);
}

double Paraboloid::slope() const {
  const double w2 = omega * omega;
  return sign == Sign::Minus ? 16.0 / w2 : 4.0 / w2;
}

bool Paraboloid::contains(const KineticPoint& p) const {
  const KineticPoint q = scale_point(1.0 / scale, p);
  const double rho = std::max(norm2(q.v()), std::cbrt(norm2(q.x())));
  return q.t() >= (4.0 / 3.0) * (slope() * rho * rho - 1.0);
}

namespace {

/// Fills a point of Q_R(0, 0, t_top) from 2d+1 uniforms.
KineticPoint sample_slanted_origin(std::span<const double> u, int d, double R, double t_top) {
  std::array<double, kMaxDim> x{}, v{};
  cube_to_ball(u.subspan(0, d), R * R * R * (1.0 - 1e-12), std::span<double>(x.data(), d));
  cube_to_ball(u.subspan(d, d), R * (1.0 - 1e-12), std::span<double>(v.data(), d));
  // (t_top - R^2, t_top]: map u in [0,1) to the half-open interval from the top.
  const double t = t_top - R * R * u[2 * d];
  return KineticPoint(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d), t);
}

void validate(const CoveringParams& p) {
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("verify_covering: delta must be in (0, 1)");
  const double sq = std::sqrt(p.delta);
  if (!(p.R > 0.0 && p.R <= sq)) throw std::invalid_argument("verify_covering: need 0 < R <= sqrt(delta)");
  if (!(p.r0 > 0.0 && p.r0 <= sq)) throw std::invalid_argument("verify_covering: need 0 < r0 <= sqrt(delta)");
  if (!(p.omega > 0.0 && p.omega < 1.0)) throw std::invalid_argument("verify_covering: omega must be in (0, 1)");
  if (p.dim < 1 || p.dim > kMaxDim) throw std::invalid_argument("verify_covering: dim must be in [1, 3]");
  if (p.n_samples == 0) throw std::invalid_argument("verify_covering: n_samples must be positive");
}

}  // namespace

CoveringReport verify_covering(const CoveringParams& params) {
  validate(params);
  const int d = params.dim;
  const double R = params.R;
  const double w = params.omega;
  CoveringReport rep;
  rep.params = params;
  rep.hypothesis_rhs = R * R + (64.0 / (3.0 * w * w)) * std::cbrt(4.0 * R);

  const std::size_t n = params.n_samples;
  const std::size_t dims = static_cast<std::size_t>(4 * d + 3);
  const Cylinder unit = Cylinder::slanted(KineticPoint::origin(d), 1.0);
  const Paraboloid plus{Paraboloid::Sign::Plus, w, 1.0};

  // Claim (a).
  {
    const QuasiRandom qr(dims, params.seed);
    std::vector<char> bad(n, 0);
    std::vector<KineticPoint> pts(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 4 * kMaxDim + 3> u{};
      qr.point(i, std::span<double>(u.data(), dims));
      const std::span<const double> us(u.data(), dims);
      const KineticPoint z = sample_slanted_origin(us, d, R, -params.delta);
      const double r = params.r0 * (1.0 - us[2 * d + 1]);
      const double s_lo = -(4.0 / 3.0) * r * r;
      const double s_hi = -z.t();
      const double s = s_lo + (s_hi - s_lo) * us[2 * d + 2];
      const double rho2 = (0.75 * s + r * r) / plus.slope();
      const double rho = std::sqrt(std::max(0.0, rho2));
      std::array<double, kMaxDim> y{}, wv{};
      cube_to_ball(us.subspan(2 * d + 3, d), rho * rho * rho, std::span<double>(y.data(), d));
      cube_to_ball(us.subspan(3 * d + 3, d), rho, std::span<double>(wv.data(), d));
      const KineticPoint p(std::span<const double>(y.data(), d), std::span<const double>(wv.data(), d), s);
      const KineticPoint zp = compose(z, p);
      pts[i] = zp;
      bad[i] = (zp.t() <= 0.0 && !unit.contains(zp)) ? 1 : 0;
    }
    rep.claim_a.checked = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (bad[i]) rep.claim_a.counterexamples.push_back(pts[i]);
    }
    rep.claim_a.verdict = rep.claim_a.counterexamples.empty() ? "pass" : "fail";
  }

  // Claim (b).
  rep.claim_b.hypothesis_met = params.delta >= rep.hypothesis_rhs;
  if (!rep.claim_b.hypothesis_met) {
    rep.claim_b.verdict = "hypothesis unmet";
    return rep;
  }
  {
    const QuasiRandom qr(dims, hash_combine(params.seed, 0xb));
    std::vector<char> bad(n, 0);
    std::vector<KineticPoint> pts(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 4 * kMaxDim + 3> u{};
      qr.point(i, std::span<double>(u.data(), dims));
      const std::span<const double> us(u.data(), dims);
      const KineticPoint zm = sample_slanted_origin(us.subspan(0, 2 * d + 1), d, R, -params.delta);
      const KineticPoint zp = sample_slanted_origin(us.subspan(2 * d + 1, 2 * d + 1), d, R, 0.0);
      const double r = params.r0 * (1.0 - us[4 * d + 2]);
      const KineticPoint rel = compose(group_inverse(zm), zp);
      pts[i] = rel;
      bad[i] = Paraboloid{Paraboloid::Sign::Minus, w, r}.contains(rel) ? 0 : 1;
    }
    rep.claim_b.checked = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (bad[i]) rep.claim_b.counterexamples.push_back(pts[i]);
    }
    rep.claim_b.verdict = rep.claim_b.counterexamples.empty() ? "pass" : "fail";
  }
  return rep;
}

bool region_subset_sampled(const Cylinder& inner, const Cylinder& outer, std::size_t n_samples,
                           std::uint64_t seed) {
  const int d = inner.dim();
  if (outer.dim() != d) throw std::invalid_argument("region_subset_sampled: dimension mismatch");
  const TimeWindow win = inner.time_window();
  const std::size_t dims = static_cast<std::size_t>(2 * d + 1);
  const QuasiRandom qr(dims, seed);
  std::array<double, 2 * kMaxDim + 1> u{};
  std::size_t accepted = 0;
  for (std::size_t i = 0; accepted < n_samples && i < 50 * n_samples; ++i) {
    qr.point(i, std::span<double>(u.data(), dims));
    const double t = win.hi - (win.hi - win.lo) * u[2 * d];
    const auto box = inner.slice_box(t);
    if (!box) continue;
    std::array<double, kMaxDim> x{}, v{};
    for (int k = 0; k < d; ++k) {
      x[k] = box->x_lo[k] + (box->x_hi[k] - box->x_lo[k]) * u[k];
      v[k] = box->v_lo[k] + (box->v_hi[k] - box->v_lo[k]) * u[d + k];
    }
    const KineticPoint z(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d), t);
    if (!inner.contains(z)) continue;
    ++accepted;
    if (!outer.contains(z)) return false;
  }
  return true;
}

namespace {

KineticPoint random_point(CounterRng& rng, int d, double scale) {
  std::array<double, kMaxDim> x{}, v{};
  for (int i = 0; i < d; ++i) {
    x[i] = rng.uniform(-scale, scale);
    v[i] = rng.uniform(-scale, scale);
  }
  return KineticPoint(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d),
                      rng.uniform(-scale, scale));
}

double point_error(const KineticPoint& a, const KineticPoint& b) {
  auto rel = [](double p, double q) { return std::abs(p - q) / std::max(1.0, std::max(std::abs(p), std::abs(q))); };
  double e = rel(a.t(), b.t());
  for (int i = 0; i < a.dim(); ++i) e = std::max({e, rel(a.x(i), b.x(i)), rel(a.v(i), b.v(i))});
  return e;
}

}  // namespace

GroupLawReport group_law_self_test(std::size_t n, int d, std::uint64_t seed, double tol) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("group_law_self_test: dimension out of range");
  GroupLawReport rep;
  auto record = [&](const char* name, double err) {
    ++rep.checks;
    if (!(err <= tol)) ++rep.failures;
    if (!(err <= rep.max_error)) {
      rep.max_error = err;
      rep.worst = name;
    }
  };
  const KineticPoint e = KineticPoint::origin(d);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(hash_combine(seed, i));
    const KineticPoint a = random_point(rng, d, 2.0);
    const KineticPoint b = random_point(rng, d, 2.0);
    const KineticPoint c = random_point(rng, d, 2.0);
    const double r = rng.uniform(0.1, 3.0);
    const GalileanTransform Ta{a};
    record("associativity", point_error(compose(compose(a, b), c), compose(a, compose(b, c))));
    record("left_inverse", point_error(compose(group_inverse(a), a), e));
    record("right_inverse", point_error(compose(a, group_inverse(a)), e));
    record("transform_round_trip", point_error(Ta.apply_inverse(Ta.apply(b)), b));
    record("inverse_transform", point_error(Ta.apply_inverse(b), compose(group_inverse(a), b)));
    record("transform_composition", point_error(GalileanTransform{compose(a, b)}.apply(c), Ta.apply(GalileanTransform{b}.apply(c))));
    record("scaling_covariance", point_error(scale_point(r, compose(a, b)), compose(scale_point(r, a), scale_point(r, b))));
    record("scaling_round_trip", point_error(scale_point(1.0 / r, scale_point(r, a)), a));
  }
  return rep;
}

}  // namespace kfp

