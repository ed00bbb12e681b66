// Harnack-side probes: the Harnack quotient, the doubling constant along the
// iterated cylinders and the propagation of minima.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kfp/iteration.hpp"
#include "kfp/probes.hpp"
#include "kfp/region_reduce.hpp"

namespace kfp {

void HarnackParams::validate() const {
  if (!(R > 0.0 && R < 1.0 && Delta > 0.0 && Delta < 1.0)) {
    throw std::invalid_argument("harnack: R and Delta must lie in (0, 1)");
  }
  if (!(R < rho1 && rho1 < rho2 && rho2 < 1.0)) throw std::invalid_argument("harnack: need R < rho1 < rho2 < 1");
  // Q+ has times in (-R^2, 0], Q- in (-Delta - R^2, -Delta].
  if (!(Delta >= R * R)) throw std::invalid_argument("harnack: Q+ and Q- overlap (need Delta >= R^2)");
  if (!(Delta + rho2 * rho2 <= 1.0)) throw std::invalid_argument("harnack: Q-[2] must lie in Q_1");
  if (!(q > 0.0)) throw std::invalid_argument("harnack: q must be positive");
}

double HarnackParams::C_pm() const { return propagation_constant(R, q); }

namespace {

KineticPoint below(const KineticPoint& z_top, double delta) {
  KineticPoint shift = KineticPoint::origin(z_top.dim());
  shift.set_t(-delta);
  return compose(z_top, shift);
}

void require_in_run(const Trajectory& traj, const Region& region, const char* what) {
  if (!region_in_run(traj, region)) {
    throw std::invalid_argument(std::string(what) + ": region exceeds the computational domain or time range");
  }
}

double region_min(const Trajectory& traj, const Region& region, const char* what) {
  const auto cells = region_cells(traj, region);
  if (cells.empty()) throw std::invalid_argument(std::string(what) + ": region contains no grid cell");
  return chunked_min(cells.size(), [&](std::size_t i) { return cell_value(traj, cells[i]); });
}

double region_max(const Trajectory& traj, const Region& region, const char* what) {
  const auto cells = region_cells(traj, region);
  if (cells.empty()) throw std::invalid_argument(std::string(what) + ": region contains no grid cell");
  return chunked_max(cells.size(), [&](std::size_t i) { return cell_value(traj, cells[i]); });
}

}  // namespace

Cylinder HarnackParams::q_plus(const KineticPoint& z_top) const { return Cylinder::slanted(z_top, R); }
Cylinder HarnackParams::q_minus(const KineticPoint& z_top) const {
  return Cylinder::slanted(below(z_top, Delta), R);
}
Cylinder HarnackParams::q_minus_i(const KineticPoint& z_top, int i) const {
  if (i != 1 && i != 2) throw std::invalid_argument("harnack: Q-[i] needs i in {1, 2}");
  return Cylinder::slanted(below(z_top, Delta), i == 1 ? rho1 : rho2);
}
Cylinder HarnackParams::q_one(const KineticPoint& z_top) const { return Cylinder::slanted(z_top, 1.0); }

ProbeReport harnack_probe(const Trajectory& traj, const HarnackParams& params, const KineticPoint& z_top) {
  params.validate();
  const Cylinder qp = params.q_plus(z_top);
  const Cylinder qm = params.q_minus(z_top);
  const Cylinder q1 = params.q_one(z_top);
  require_in_run(traj, q1, "harnack_probe");

  const auto one_cells = region_cells(traj, q1);
  const double fmax = chunked_max(one_cells.size(), [&](std::size_t i) { return std::abs(cell_value(traj, one_cells[i])); });
  const double fmin = chunked_min(one_cells.size(), [&](std::size_t i) { return cell_value(traj, one_cells[i]); });
  if (fmin < -1e-12 * std::max(1.0, fmax)) throw std::invalid_argument("harnack_probe: f is negative on Q_1");
  const double s_sup = chunked_max(one_cells.size(), [&](std::size_t i) {
    return std::abs(traj.source_at(one_cells[i].snap, one_cells[i].cell));
  });

  const double sup_minus = region_max(traj, qm, "harnack_probe");
  const double inf_plus = region_min(traj, qp, "harnack_probe");
  const double den = inf_plus + s_sup;

  ProbeReport rep;
  rep.name = "harnack";
  rep.params["R"] = params.R;
  rep.params["Delta"] = params.Delta;
  rep.params["z_top"] = point_to_json(z_top);
  rep.params["q_plus"] = cylinder_to_json(qp);
  rep.params["q_minus"] = cylinder_to_json(qm);
  rep.set("sup_minus", sup_minus);
  rep.set("inf_plus", inf_plus);
  rep.set("s_sup", s_sup);
  rep.set("C_emp", den > 0.0 ? sup_minus / den : kDegenerate);
  rep.verdict = den > 0.0 ? "measured" : "degenerate";
  return rep;
}

DoublingResult doubling_probe(const Trajectory& traj, double omega, int N, const KineticPoint& z_base, double r) {
  if (N < 1) throw std::invalid_argument("doubling_probe: N must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("doubling_probe: r must be positive");
  DoublingResult res;
  for (int k = 0; k <= N; ++k) {
    const Cylinder Q = Cylinder::iterated(k, omega, z_base, r);
    require_in_run(traj, Q, "doubling_probe");
    res.inf_levels.push_back(region_min(traj, Q, "doubling_probe"));
  }
  const double base = res.inf_levels[0];
  if (!(base > 0.0)) {
    res.degenerate = true;
    return res;
  }
  res.h_min = kInfinity;
  for (int k = 1; k <= N; ++k) {
    const double ratio = std::max(res.inf_levels[k], 0.0) / base;
    const double h = std::pow(ratio, 1.0 / k);
    res.h.push_back(h);
    res.h_min = std::min(res.h_min, h);
  }
  return res;
}

ProbeReport doubling_report(const Trajectory& traj, double omega, int N, const KineticPoint& z_base, double r) {
  const DoublingResult res = doubling_probe(traj, omega, N, z_base, r);
  ProbeReport rep;
  rep.name = "doubling";
  rep.params["omega"] = omega;
  rep.params["N"] = N;
  rep.params["z_base"] = point_to_json(z_base);
  rep.params["r"] = r;
  for (std::size_t k = 0; k < res.inf_levels.size(); ++k) rep.set("inf_" + std::to_string(k), res.inf_levels[k]);
  for (std::size_t k = 0; k < res.h.size(); ++k) rep.set("h_" + std::to_string(k + 1), res.h[k]);
  rep.set("h_min", res.h_min);
  rep.verdict = res.degenerate ? "degenerate" : "measured";
  return rep;
}

ProbeReport propagation_probe(const Trajectory& traj, const HarnackParams& params, const KineticPoint& z_top,
                              const KineticPoint& z, const std::vector<double>& radii) {
  params.validate();
  if (radii.empty()) throw std::invalid_argument("propagation_probe: empty radius ladder");
  const Cylinder qp = params.q_plus(z_top);
  const Cylinder qm = params.q_minus(z_top);
  const Cylinder qm2 = params.q_minus_i(z_top, 2);
  if (!qm.contains(z)) throw std::invalid_argument("propagation_probe: z must lie in Q-");
  require_in_run(traj, qm2, "propagation_probe");
  require_in_run(traj, qp, "propagation_probe");
  const double m_plus = region_min(traj, qp, "propagation_probe");
  const double cpm = params.C_pm();

  ProbeReport rep;
  rep.name = "propagation";
  rep.params["R"] = params.R;
  rep.params["Delta"] = params.Delta;
  rep.params["q"] = params.q;
  rep.params["z"] = point_to_json(z);
  rep.params["radii"] = radii;
  rep.set("C_pm", cpm);
  rep.set("min_plus", m_plus);

  bool holds = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool fit_ok = m_plus > 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    const Cylinder qel = Cylinder::elongated(z, r, params.omega);
    if (!region_subset_sampled(qel, qm2, 2000)) {
      throw std::invalid_argument("propagation_probe: Q^el_r(z) is not contained in Q-[2]");
    }
    const double m_r = region_min(traj, qel, "propagation_probe");
    rep.set("min_el_" + std::to_string(i), m_r);
    if (m_r > cpm * std::pow(r, -params.q) * m_plus) holds = false;
    if (m_plus > 0.0 && m_r > 0.0) {
      const double lx = std::log(r), ly = std::log(m_r / m_plus);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    } else {
      fit_ok = false;
    }
  }
  const double n = static_cast<double>(radii.size());
  const double den = n * sxx - sx * sx;
  rep.set("q_hat", fit_ok && den > 0.0 ? -(n * sxy - sx * sy) / den : kDegenerate);
  if (!(m_plus > 0.0)) {
    rep.verdict = "degenerate";
  } else {
    rep.verdict = holds ? "holds" : "violated";
  }
  return rep;
}

}  // namespace kfp
