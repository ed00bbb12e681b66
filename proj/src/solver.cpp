#include "kfp/solver.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "kfp/iteration.hpp"
#include "kfp/region_reduce.hpp"

namespace kfp {

std::string to_string(Boundary b) {
  return b == Boundary::PeriodicBoth ? "periodic_both" : "periodic_x_noflux_v";
}

std::string to_string(Scheme s) { return s == Scheme::SplitUpwind ? "upwind" : "semi_lagrangian"; }

std::string to_string(Interpolation i) { return i == Interpolation::Cubic ? "cubic" : "linear"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic_x_noflux_v") return Boundary::PeriodicX_NoFluxV;
  if (s == "periodic_both") return Boundary::PeriodicBoth;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "semi_lagrangian") return Scheme::SplitSemiLagrangian;
  if (s == "upwind") return Scheme::SplitUpwind;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

Interpolation interpolation_from_string(const std::string& s) {
  if (s == "linear") return Interpolation::Linear;
  if (s == "cubic") return Interpolation::Cubic;
  throw std::invalid_argument("unknown interpolation '" + s + "'");
}

void SolverConfig::validate() const {
  grid.validate();
  if (grid.d > 2) throw std::invalid_argument("solver: only d = 1 and d = 2 are supported");
  if (!(dt > 0.0 && std::isfinite(dt))) throw std::invalid_argument("solver: dt must be positive");
  if (!std::isfinite(t_end)) throw std::invalid_argument("solver: t_end must be finite");
  if (snapshot_every < 1) throw std::invalid_argument("solver: snapshot_every must be >= 1");
  if (field && field->dim() != grid.d) throw std::invalid_argument("solver: field and grid dimensions differ");
  if (scheme == Scheme::SplitUpwind) {
    const double vmax = grid.V - 0.5 * grid.hv();
    if (dt * vmax > grid.hx()) {
      throw std::invalid_argument("solver: upwind CFL guard dt <= hx / Vmax violated");
    }
  }
}

int SolverConfig::steps_from(double t_start) const {
  const double n = std::round((t_end - t_start) / dt);
  if (n < 0.0) throw std::invalid_argument("solver: t_end precedes the initial time");
  return static_cast<int>(n);
}

bool SolverConfig::monotone() const {
  if (scheme == Scheme::SplitSemiLagrangian && interpolation == Interpolation::Cubic) return false;
  // In d = 2 the off-diagonal entry of A enters through averaged tangential
  // gradients, which breaks the M-matrix sign pattern unless A is diagonal.
  if (grid.d >= 2 && field && field->recipe().kind != Recipe::Constant) return false;
  return true;
}

void EnergyLedger::write_csv(std::ostream& os) const {
  os << "step,t,mass,l2,grad_v,source_l2,min,max\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.t, r.mass, r.l2,
                  r.grad_v, r.source_l2, r.min, r.max);
    os << buf;
  }
}

EnergyLedger EnergyLedger::read_csv(std::istream& is) {
  EnergyLedger L;
  std::string line;
  if (!std::getline(is, line) || line.rfind("step,", 0) != 0) throw std::runtime_error("ledger: missing CSV header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    EnergyRecord r;
    if (std::sscanf(line.c_str(), "%d,%lg,%lg,%lg,%lg,%lg,%lg,%lg", &r.step, &r.t, &r.mass, &r.l2, &r.grad_v,
                    &r.source_l2, &r.min, &r.max) != 8) {
      throw std::runtime_error("ledger: malformed row '" + line + "'");
    }
    L.records.push_back(r);
  }
  return L;
}

EnergyRecord measure_state(const PhaseGridFunction& f, const SolverConfig& cfg, int step_index) {
  EnergyRecord r;
  r.step = step_index;
  r.t = f.time;
  r.mass = f.mass();
  r.l2 = f.l2_squared();
  r.grad_v = f.grad_v_squared(cfg.periodic_v());
  r.min = f.min();
  r.max = f.max();
  if (cfg.field && cfg.field->has_source()) {
    double s2 = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      const double s = cfg.field->source(f.grid.point(k, f.time));
      s2 += s * s;
    }
    r.source_l2 = s2 * f.grid.cell_volume();
  }
  return r;
}

KineticPoint Trajectory::point(std::size_t snap, std::size_t cell) const {
  return frame.apply(grid().point(cell, snapshots[snap].time));
}

double Trajectory::snapshot_spacing() const {
  if (snapshots.size() < 2) return 0.0;
  return snapshots[1].time - snapshots[0].time;
}

double Trajectory::source_at(std::size_t snap, std::size_t cell) const {
  if (!field || !field->has_source()) return 0.0;
  return field->source(grid().point(cell, snapshots[snap].time));
}

Trajectory Trajectory::transformed(const GalileanTransform& T) const {
  Trajectory out = *this;
  out.frame.base = compose(T.base, frame.base);
  return out;
}

Trajectory Trajectory::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("trajectory scaling factor must be positive");
  Trajectory out = *this;
  for (auto& s : out.snapshots)
    for (double& v : s.values) v *= c;
  for (auto& r : out.ledger.records) {
    r.mass *= c;
    r.l2 *= c * c;
    r.grad_v *= c * c;
    r.source_l2 *= c * c;
    r.min *= c;
    r.max *= c;
  }
  if (field) out.field = std::make_shared<const CoefficientField>(field->with_source_scale(c));
  return out;
}

PhaseGridFunction step(const PhaseGridFunction& state, const SolverConfig& cfg) {
  if (!(state.grid == cfg.grid)) throw std::invalid_argument("step: state grid does not match the configuration");
  PhaseGridFunction next = state;
  const double half = 0.5 * cfg.dt;
  if (cfg.parallel) {
    transport_step(next.values, cfg, half);
    velocity_step(next.values, cfg, state.time + half, cfg.dt);
    transport_step(next.values, cfg, half);
  } else {
    transport_step_serial(next.values, cfg, half);
    velocity_step_serial(next.values, cfg, state.time + half, cfg.dt);
    transport_step_serial(next.values, cfg, half);
  }
  next.time = state.time + cfg.dt;
  return next;
}

Trajectory solve(const SolverConfig& cfg, const PhaseGridFunction& f0) {
  cfg.validate();
  if (!(f0.grid == cfg.grid)) throw std::invalid_argument("solve: initial data grid does not match the configuration");
  for (double v : f0.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("solve: initial data must be finite");
  }
  Trajectory traj;
  traj.frame.base = KineticPoint::origin(cfg.grid.d);
  traj.field = cfg.field;
  traj.periodic_v = cfg.periodic_v();
  const double t0 = f0.time;
  const int n = cfg.steps_from(t0);
  PhaseGridFunction cur = f0;
  traj.snapshots.push_back(cur);
  traj.ledger.records.push_back(measure_state(cur, cfg, 0));
  for (int k = 1; k <= n; ++k) {
    cur = step(cur, cfg);
    // Stamp times as t0 + k dt so dyadic steps stay exact.
    cur.time = t0 + k * cfg.dt;
    traj.ledger.records.push_back(measure_state(cur, cfg, k));
    if (k % cfg.snapshot_every == 0) traj.snapshots.push_back(cur);
  }
  return traj;
}

ComparisonReport comparison_check(const SolverConfig& cfg, const PhaseGridFunction& f0, const PhaseGridFunction& g0,
                                  double tol) {
  if (!(f0.grid == cfg.grid) || !(g0.grid == cfg.grid) || f0.time != g0.time) {
    throw std::invalid_argument("comparison_check: initial data do not match the configuration");
  }
  SolverConfig c = cfg;
  c.snapshot_every = 1;
  const Trajectory tf = solve(c, f0);
  const Trajectory tg = solve(c, g0);
  ComparisonReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < tf.snapshots.size(); ++s) {
    const auto& a = tf.snapshots[s].values;
    const auto& b = tg.snapshots[s].values;
    for (std::size_t k = 0; k < a.size(); ++k) rep.max_violation = std::max(rep.max_violation, a[k] - b[k]);
    ++rep.times_checked;
  }
  rep.holds = rep.max_violation <= tol;
  return rep;
}

EnergyEstimateReport energy_estimate_check(const Trajectory& traj, const Cylinder& q_int, const Cylinder& q_ext) {
  if (!(q_int.radius < q_ext.radius) || !region_subset_sampled(q_int, q_ext, 2000)) {
    throw std::invalid_argument("energy_estimate_check: cylinders are not nested");
  }
  const auto in_cells = region_cells(traj, Region{q_int});
  const auto ext_cells = region_cells(traj, Region{q_ext});
  const double w = cell_weight(traj);
  const double vol = traj.grid().cell_volume();
  const bool pv = traj.periodic_v;

  // sup over stored times of the slice integral of f^2 on Q_int.
  std::vector<double> per_snap(traj.snapshots.size(), 0.0);
  for (const auto& c : in_cells) {
    const double f = cell_value(traj, c);
    per_snap[c.snap] += f * f;
  }
  double sup_slice = 0.0;
  for (double s : per_snap) sup_slice = std::max(sup_slice, s * vol);
  const double grad = w * chunked_sum(in_cells.size(), [&](std::size_t i) {
    return traj.snapshots[in_cells[i].snap].grad_v_squared_at(in_cells[i].cell, pv);
  });
  const double f2 = w * chunked_sum(ext_cells.size(), [&](std::size_t i) {
    const double f = cell_value(traj, ext_cells[i]);
    return f * f;
  });
  const double s2 = w * chunked_sum(ext_cells.size(), [&](std::size_t i) {
    const double s = traj.source_at(ext_cells[i].snap, ext_cells[i].cell);
    return s * s;
  });

  EnergyEstimateReport rep;
  rep.c01 = gain_constant(q_ext.radius, q_int.radius);
  rep.lhs = sup_slice + grad;
  rep.rhs = rep.c01 * f2 + s2;
  if (rep.rhs == 0.0) {
    rep.trivial = true;
    rep.cbar = std::numeric_limits<double>::quiet_NaN();
    rep.verdict = "trivial";
  } else {
    rep.cbar = rep.lhs / rep.rhs;
    rep.verdict = "measured";
  }
  return rep;
}

}  // namespace kfp
