// Reverse-Hoelder scan and integrability gain of the velocity gradient.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kfp/probes.hpp"
#include "kfp/region_reduce.hpp"

namespace kfp {
namespace {

/// Cube cylinder Q_r(z) inside the cube cylinder Q0 (closed comparison of the boxes).
bool cube_inside(const KineticPoint& z, double r, const Cylinder& q0) {
  const double r0 = q0.radius;
  const KineticPoint& c = q0.center;
  if (z.t() - r * r < c.t() - r0 * r0 || z.t() > c.t()) return false;
  for (int i = 0; i < z.dim(); ++i) {
    if (std::abs(z.x(i) - c.x(i)) + r * r * r > r0 * r0 * r0) return false;
    if (std::abs(z.v(i) - c.v(i)) + r > r0) return false;
  }
  return true;
}

struct Candidate {
  double b = -kInfinity;
  std::size_t centre = 0;
  double radius = 0.0;
  std::size_t admissible = 0;
};

/// Mean of g^q and of g over a region, by plain cell averages.
struct Means {
  double gq = 0.0;
  double g = 0.0;
  std::size_t cells = 0;
};

Means region_means(const Trajectory& traj, const Region& region, double q, bool pv) {
  const auto cells = region_cells(traj, region);
  Means m;
  m.cells = cells.size();
  if (cells.empty()) return m;
  double sq = 0.0, s1 = 0.0;
  for (const CellRef& c : cells) {
    const double g = traj.snapshots[c.snap].grad_v_squared_at(c.cell, pv);
    sq += std::pow(g, q);
    s1 += g;
  }
  m.gq = sq / static_cast<double>(cells.size());
  m.g = s1 / static_cast<double>(cells.size());
  return m;
}

/// Slope k of log P(|grad f| > u) against log u over the upper tail, by least
/// squares on the empirical survival function (upper half of the sorted sample).
double tail_exponent(std::vector<double> mags) {
  mags.erase(std::remove_if(mags.begin(), mags.end(), [](double m) { return !(m > 0.0); }), mags.end());
  if (mags.size() < 8) return kDegenerate;
  std::sort(mags.begin(), mags.end());
  const std::size_t n = mags.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t i = n / 2; i + 1 < n; ++i) {
    const double lx = std::log(mags[i]);
    const double ly = std::log(static_cast<double>(n - i) / static_cast<double>(n));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    cnt += 1.0;
  }
  const double den = cnt * sxx - sx * sx;
  if (!(den > 0.0)) return kDegenerate;
  return -(cnt * sxy - sx * sy) / den;
}

}  // namespace

ProbeReport gehring_probe(const Trajectory& traj, const GehringParams& params) {
  if (traj.field && (traj.field->has_drift() || traj.field->has_source())) {
    throw std::invalid_argument("gehring_probe: requires B = 0 and s = 0");
  }
  if (params.q0.shape != CylinderShape::Cube) throw std::invalid_argument("gehring_probe: Q0 must be a cube cylinder");
  if (!(params.q > 1.0)) throw std::invalid_argument("gehring_probe: q must exceed 1");
  if (!(params.theta >= 0.0 && params.theta < 1.0)) throw std::invalid_argument("gehring_probe: theta must lie in [0, 1)");
  if (params.radii.empty()) throw std::invalid_argument("gehring_probe: empty radius list");
  if (params.center_stride == 0) throw std::invalid_argument("gehring_probe: centre stride must be positive");
  if (!region_in_run(traj, params.q0)) throw std::invalid_argument("gehring_probe: Q0 exceeds the computed run");
  if (!region_in_run(traj, params.q1)) throw std::invalid_argument("gehring_probe: Q1 exceeds the computed run");
  const bool pv = traj.periodic_v;

  const auto q0_cells = region_cells(traj, params.q0);
  if (q0_cells.empty()) throw std::invalid_argument("gehring_probe: Q0 contains no grid cell");
  std::vector<std::size_t> centres;
  for (std::size_t i = 0; i < q0_cells.size(); i += params.center_stride) centres.push_back(i);

  const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(centres.size());
  std::vector<Candidate> best(centres.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < nc; ++k) {
    const CellRef& cell = q0_cells[centres[static_cast<std::size_t>(k)]];
    const KineticPoint z = traj.point(cell.snap, cell.cell);
    Candidate& c = best[static_cast<std::size_t>(k)];
    for (double R : params.radii) {
      if (!cube_inside(z, 4.0 * R, params.q0)) continue;
      const Means inner = region_means(traj, Cylinder::cube(z, R), params.q, pv);
      const Means outer = region_means(traj, Cylinder::cube(z, 4.0 * R), params.q, pv);
      if (inner.cells == 0 || outer.cells == 0) continue;
      ++c.admissible;
      const double den = std::pow(outer.g, params.q);
      if (!(den > 0.0)) continue;
      const double b = (inner.gq - params.theta * outer.gq) / den;
      if (b > c.b) {
        c.b = b;
        c.centre = centres[static_cast<std::size_t>(k)];
        c.radius = R;
      }
    }
  }
  Candidate top;
  std::size_t admissible = 0;
  for (const Candidate& c : best) {
    admissible += c.admissible;
    if (c.b > top.b) top = c;
  }

  ProbeReport rep;
  rep.name = "gehring";
  rep.params["q"] = params.q;
  rep.params["theta"] = params.theta;
  rep.params["q0"] = cylinder_to_json(params.q0);
  rep.params["radii"] = params.radii;
  rep.params["center_stride"] = params.center_stride;
  rep.params["q1"] = cylinder_to_json(params.q1);
  rep.params["q2"] = cylinder_to_json(params.q2);
  rep.set("admissible", static_cast<double>(admissible));
  if (admissible == 0) throw std::invalid_argument("gehring_probe: no admissible (centre, radius) pair");
  const bool have_b = top.b > -kInfinity;
  rep.set("b_emp", have_b ? top.b : kDegenerate);
  if (have_b) {
    const KineticPoint zb = traj.point(q0_cells[top.centre].snap, q0_cells[top.centre].cell);
    rep.params["argmax_center"] = point_to_json(zb);
    rep.params["argmax_radius"] = top.radius;
  }

  // Integrability gain of |grad_v f| on Q2 from the tail of its distribution.
  const auto q2_cells = region_cells(traj, params.q2);
  const auto q1_cells = region_cells(traj, params.q1);
  if (q2_cells.empty() || q1_cells.empty()) throw std::invalid_argument("gehring_probe: Q1 or Q2 contains no cell");
  std::vector<double> mags(q2_cells.size());
  for (std::size_t i = 0; i < q2_cells.size(); ++i) {
    mags[i] = std::sqrt(traj.snapshots[q2_cells[i].snap].grad_v_squared_at(q2_cells[i].cell, pv));
  }
  const double k = tail_exponent(mags);
  double eps = 0.0;
  if (std::isfinite(k) && k > 2.0) eps = std::min(k - 2.0, params.eps_cap);
  rep.set("tail_exponent", k);
  rep.set("eps", eps);

  const double w = cell_weight(traj);
  const double p = 2.0 + eps;
  double num = 0.0;
  for (double m : mags) num += std::pow(m, p);
  num *= w;
  const double base = w * chunked_sum(q1_cells.size(), [&](std::size_t i) {
    return traj.snapshots[q1_cells[i].snap].grad_v_squared_at(q1_cells[i].cell, pv);
  });
  const double den = std::pow(base, p / 2.0);
  double ratio = kDegenerate;
  if (den > 0.0) ratio = num / den;
  else if (num > 0.0) ratio = kInfinity;
  rep.set("lhs", num);
  rep.set("rhs", den);
  rep.set("ratio", ratio);
  rep.verdict = (have_b && den > 0.0) ? "measured" : "degenerate";
  return rep;
}

}  // namespace kfp
