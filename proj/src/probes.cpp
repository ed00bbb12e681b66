#include "kfp/probes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "kfp/iteration.hpp"
#include "kfp/region_reduce.hpp"
#include "kfp/sampling.hpp"

namespace kfp {

void ProbeReport::set(const std::string& key, double value) {
  for (auto& [k, v] : constants) {
    if (k == key) {
      v = value;
      return;
    }
  }
  constants.emplace_back(key, value);
}

double ProbeReport::get(const std::string& key) const {
  for (const auto& [k, v] : constants) {
    if (k == key) return v;
  }
  throw std::out_of_range("probe report '" + name + "' has no constant '" + key + "'");
}

bool ProbeReport::has(const std::string& key) const {
  return std::any_of(constants.begin(), constants.end(), [&](const auto& kv) { return kv.first == key; });
}

nlohmann::ordered_json point_to_json(const KineticPoint& z) {
  nlohmann::ordered_json j;
  j["x"] = std::vector<double>(z.x().begin(), z.x().end());
  j["v"] = std::vector<double>(z.v().begin(), z.v().end());
  j["t"] = z.t();
  return j;
}

nlohmann::ordered_json cylinder_to_json(const Cylinder& q) {
  nlohmann::ordered_json j;
  j["shape"] = to_string(q.shape);
  j["center"] = point_to_json(q.center);
  j["radius"] = q.radius;
  if (q.shape == CylinderShape::Elongated || q.shape == CylinderShape::Iterated) j["omega"] = q.omega;
  if (q.shape == CylinderShape::Iterated) j["index"] = q.index;
  return j;
}

nlohmann::ordered_json region_to_json(const Region& r) {
  if (const auto* c = std::get_if<Cylinder>(&r)) return cylinder_to_json(*c);
  const auto& b = std::get<BallProduct>(r);
  nlohmann::ordered_json j;
  j["shape"] = "ball_product";
  j["center"] = point_to_json(b.center);
  j["x_radius"] = b.x_radius;
  j["v_radius"] = b.v_radius;
  j["t_length"] = b.t_length;
  return j;
}

namespace {

void require_in_run(const Trajectory& traj, const Region& region, const char* what) {
  if (!region_in_run(traj, region)) {
    throw std::invalid_argument(std::string(what) + ": region exceeds the computational domain or time range");
  }
}

double lp_power_sum(const Trajectory& traj, const std::vector<CellRef>& cells, double p) {
  return chunked_sum(cells.size(), [&](std::size_t i) { return std::pow(std::abs(cell_value(traj, cells[i])), p); });
}

double ratio_or_degenerate(double num, double den) {
  if (den == 0.0) return num == 0.0 ? kDegenerate : kInfinity;
  return num / den;
}

}  // namespace

double norm_on_cylinder(const Trajectory& traj, const Region& region, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm_on_cylinder: p must be >= 1");
  const auto cells = region_cells(traj, region);
  if (cells.empty()) throw std::invalid_argument("norm_on_cylinder: region contains no grid cell");
  if (std::isinf(p)) {
    return chunked_max(cells.size(), [&](std::size_t i) { return std::abs(cell_value(traj, cells[i])); });
  }
  return std::pow(cell_weight(traj) * lp_power_sum(traj, cells, p), 1.0 / p);
}

ProbeReport gain_probe(const Trajectory& traj, const Cylinder& q_int, const Cylinder& q_ext) {
  if (!(q_int.radius < q_ext.radius) || !region_subset_sampled(q_int, q_ext, 2000)) {
    throw std::invalid_argument("gain_probe: cylinders are not nested");
  }
  require_in_run(traj, q_ext, "gain_probe");
  const int d = traj.dim();
  const double p = sobolev_p(d);
  const double c01 = gain_constant(q_ext.radius, q_int.radius);
  const auto in_cells = region_cells(traj, q_int);
  const auto ext_cells = region_cells(traj, q_ext);
  const double w = cell_weight(traj);
  const double lp = std::pow(w * lp_power_sum(traj, in_cells, p), 1.0 / p);
  const double l2sq = w * lp_power_sum(traj, ext_cells, 2.0);
  const double s2 = w * chunked_sum(ext_cells.size(), [&](std::size_t i) {
    if (!(cell_value(traj, ext_cells[i]) > 0.0)) return 0.0;
    const double s = traj.source_at(ext_cells[i].snap, ext_cells[i].cell);
    return s * s;
  });
  ProbeReport rep;
  rep.name = "gain";
  rep.params["q_int"] = cylinder_to_json(q_int);
  rep.params["q_ext"] = cylinder_to_json(q_ext);
  rep.set("p", p);
  rep.set("C01", c01);
  rep.set("lhs", lp * lp);
  rep.set("rhs", c01 * c01 * l2sq + c01 * s2);
  rep.set("C_bar", ratio_or_degenerate(lp * lp, c01 * c01 * l2sq + c01 * s2));
  rep.verdict = std::isnan(rep.get("C_bar")) ? "degenerate" : "measured";
  return rep;
}

LevelSetMeasures level_set_measures(const Trajectory& traj, double theta, const Region& region) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("level_set_measures: theta must be in (0, 1)");
  const auto cells = region_cells(traj, region);
  std::size_t high = 0, low = 0, mid = 0;
  for (const auto& c : cells) {
    const double f = cell_value(traj, c);
    if (f >= 1.0 - theta) {
      ++high;
    } else if (f <= 0.0) {
      ++low;
    } else {
      ++mid;
    }
  }
  const double w = cell_weight(traj);
  return {static_cast<double>(high) * w, static_cast<double>(low) * w, static_cast<double>(mid) * w,
          static_cast<double>(cells.size()) * w};
}

double oscillation(const Trajectory& traj, const Region& region) {
  const auto cells = region_cells(traj, region);
  if (cells.empty()) return 0.0;
  const double hi = chunked_max(cells.size(), [&](std::size_t i) { return cell_value(traj, cells[i]); });
  const double lo = chunked_min(cells.size(), [&](std::size_t i) { return cell_value(traj, cells[i]); });
  return hi - lo;
}

HolderFitResult holder_fit(const Trajectory& traj, const KineticPoint& z1, double theta, double omega, int K,
                           double r_tilde) {
  if (!(omega > 0.0 && omega < 1.0) || !(theta > 0.0 && theta < 1.0)) {
    throw std::invalid_argument("holder_fit: theta and omega must lie in (0, 1)");
  }
  if (K < 3) throw std::invalid_argument("holder_fit: need K >= 3 levels");
  if (!(r_tilde > 0.0)) throw std::invalid_argument("holder_fit: r_tilde must be positive");
  HolderFitResult res;
  res.alpha_theta = holder_alpha(theta, omega);
  const Cylinder top = Cylinder::slanted(z1, r_tilde / 2.0);
  require_in_run(traj, top, "holder_fit");

  double scale = 0.0;
  for (const auto& c : region_cells(traj, top)) scale = std::max(scale, std::abs(cell_value(traj, c)));
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

  std::size_t resolvable = 0;
  for (int k = 0; k < K; ++k) {
    HolderLevel L;
    L.radius = std::pow(omega / 2.0, k) * r_tilde / 2.0;
    const Cylinder Q = Cylinder::slanted(z1, L.radius);
    const auto cells = region_cells(traj, Q);
    L.cells = cells.size();
    L.resolvable = L.cells >= 2;
    if (L.resolvable) {
      ++resolvable;
      const double hi = chunked_max(cells.size(), [&](std::size_t i) { return cell_value(traj, cells[i]); });
      const double lo = chunked_min(cells.size(), [&](std::size_t i) { return cell_value(traj, cells[i]); });
      L.osc = hi - lo;
      L.usable = L.osc > floor;
    }
    res.levels.push_back(L);
  }
  if (resolvable < 3) throw std::invalid_argument("holder_fit: fewer than three levels are resolvable on the grid");

  std::vector<const HolderLevel*> usable;
  for (const auto& L : res.levels)
    if (L.usable) usable.push_back(&L);
  if (usable.empty()) {
    res.degenerate = true;
    return res;
  }
  if (usable.size() < 3) throw std::invalid_argument("holder_fit: fewer than three usable levels");

  // Least squares of log osc = log C + alpha log r.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(usable.size());
  for (const auto* L : usable) {
    const double lx = std::log(L->radius), ly = std::log(L->osc);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  res.alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  res.C = std::exp((sy - res.alpha * sx) / n);

  double log_theta = 0.0;
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    const double r = usable[i + 1]->osc / usable[i]->osc;
    const double clipped = std::clamp(r, 1e-300, 1.0 - 1e-12);
    log_theta += std::log(clipped);
  }
  res.theta_hat = std::exp(log_theta / static_cast<double>(usable.size() - 1));
  res.alpha_predicted = std::log(res.theta_hat) / std::log(omega / 2.0);
  return res;
}

ProbeReport holder_probe(const Trajectory& traj, const KineticPoint& z1, double theta, double omega, int K,
                         double r_tilde) {
  const HolderFitResult fit = holder_fit(traj, z1, theta, omega, K, r_tilde);
  ProbeReport rep;
  rep.name = "holder";
  rep.params["z1"] = point_to_json(z1);
  rep.params["theta"] = theta;
  rep.params["omega"] = omega;
  rep.params["levels"] = K;
  rep.params["r_tilde"] = r_tilde;
  rep.set("alpha", fit.alpha);
  rep.set("C", fit.C);
  rep.set("theta_hat", fit.theta_hat);
  rep.set("alpha_predicted", fit.alpha_predicted);
  rep.set("alpha_theta", fit.alpha_theta);
  for (std::size_t k = 0; k < fit.levels.size(); ++k) {
    rep.set("osc_" + std::to_string(k), fit.levels[k].resolvable ? fit.levels[k].osc : kDegenerate);
  }
  rep.verdict = fit.degenerate ? "degenerate" : "measured";
  return rep;
}

double cutoff_phi(double a) {
  const double s = std::abs(a);
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  // psi = g(2 - s) / (g(2 - s) + g(s - 1)) with g(u) = exp(-1/u); phi = psi^2.
  const double g1 = std::exp(-1.0 / (2.0 - s));
  const double g2 = std::exp(-1.0 / (s - 1.0));
  const double psi = g1 / (g1 + g2);
  return psi * psi;
}

namespace {

/// Snapshot index whose physical time equals t, or throws.
std::size_t snapshot_at(const Trajectory& traj, double t) {
  const double t0 = traj.frame.base.t();
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    if (t0 + traj.snapshots[s].time == t) return s;
  }
  throw std::invalid_argument("no stored snapshot at the requested time");
}

double chi(const KineticPoint& z, const KineticPoint& z0, double scale) {
  const double s3 = scale * scale * scale;
  double c = 1.0;
  for (int i = 0; i < z.dim() && c != 0.0; ++i) {
    c *= cutoff_phi((z.x(i) - z0.x(i)) / s3) * cutoff_phi((z.v(i) - z0.v(i)) / scale);
  }
  return c;
}

struct WeightedMean {
  double mean = 0.0;
  double chi_sum = 0.0;  // sum chi over cells, times the slice cell volume
};

WeightedMean weighted_mean_at(const Trajectory& traj, const KineticPoint& z0, double rho, std::size_t s) {
  const double scale = rho / 2.0;
  const auto& f = traj.snapshots[s].values;
  const std::size_t N = f.size();
  const double num = chunked_sum(N, [&](std::size_t k) {
    const double c = chi(traj.point(s, k), z0, scale);
    return c == 0.0 ? 0.0 : c * f[k];
  });
  const double den = chunked_sum(N, [&](std::size_t k) { return chi(traj.point(s, k), z0, scale); });
  if (den == 0.0) throw std::invalid_argument("weighted_mean: cutoff support contains no grid cell");
  return {num / den, den * traj.grid().cell_volume()};
}

}  // namespace

double weighted_mean(const Trajectory& traj, const KineticPoint& z0, double rho, double t) {
  if (!(rho > 0.0)) throw std::invalid_argument("weighted_mean: radius must be positive");
  return weighted_mean_at(traj, z0, rho, snapshot_at(traj, t)).mean;
}

ProbeReport caccio_bis_probe(const Trajectory& traj, const KineticPoint& z0, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("caccio_bis_probe: R must be positive");
  const Cylinder q1 = Cylinder::cube(z0, R);
  const Cylinder q2 = Cylinder::cube(z0, 2.0 * R);
  const Cylinder q3 = Cylinder::cube(z0, 3.0 * R);
  require_in_run(traj, q3, "caccio_bis_probe");
  const double w = cell_weight(traj);
  const double vol = traj.grid().cell_volume();
  const bool pv = traj.periodic_v;
  auto grad = [&](const CellRef& c) { return traj.snapshots[c.snap].grad_v_squared_at(c.cell, pv); };

  const auto c1 = region_cells(traj, q1);
  const auto c2 = region_cells(traj, q2);
  const auto c3 = region_cells(traj, q3);
  const double lhs_cm = w * chunked_sum(c1.size(), [&](std::size_t i) { return grad(c1[i]); });

  // Weighted means per stored time, computed once per snapshot touched.
  std::vector<double> mean2(traj.snapshots.size(), 0.0), mean1(traj.snapshots.size(), 0.0);
  std::vector<char> have2(traj.snapshots.size(), 0), have1(traj.snapshots.size(), 0);
  double c_norm = kDegenerate;
  for (const auto& c : c2) {
    if (!have2[c.snap]) {
      const WeightedMean wm = weighted_mean_at(traj, z0, 2.0 * R, c.snap);
      mean2[c.snap] = wm.mean;
      c_norm = wm.chi_sum / std::pow(R, 4 * traj.dim());
      have2[c.snap] = 1;
    }
  }
  for (const auto& c : c1) {
    if (!have1[c.snap]) {
      mean1[c.snap] = weighted_mean_at(traj, z0, R, c.snap).mean;
      have1[c.snap] = 1;
    }
  }
  const double rhs_cm = w / (R * R) * chunked_sum(c2.size(), [&](std::size_t i) {
    const double e = cell_value(traj, c2[i]) - mean2[c2[i].snap];
    return e * e;
  });
  std::vector<double> slice(traj.snapshots.size(), 0.0);
  for (const auto& c : c1) {
    const double e = cell_value(traj, c) - mean1[c.snap];
    slice[c.snap] += e * e;
  }
  double lhs_p = 0.0;
  for (double s : slice) lhs_p = std::max(lhs_p, s * vol);
  const double rhs_p = w * chunked_sum(c3.size(), [&](std::size_t i) { return grad(c3[i]); });

  ProbeReport rep;
  rep.name = "caccio_bis";
  rep.params["z0"] = point_to_json(z0);
  rep.params["R"] = R;
  rep.set("c_norm", c_norm);
  rep.set("lhs_caccio", lhs_cm);
  rep.set("rhs_caccio", rhs_cm);
  rep.set("C_caccio", ratio_or_degenerate(lhs_cm, rhs_cm));
  rep.set("lhs_poincare", lhs_p);
  rep.set("rhs_poincare", rhs_p);
  rep.set("C_poincare", ratio_or_degenerate(lhs_p, rhs_p));
  const bool degen = std::isnan(rep.get("C_caccio")) && std::isnan(rep.get("C_poincare"));
  rep.verdict = degen ? "degenerate" : "measured";
  return rep;
}

double fractional_seminorm(const Trajectory& traj, double s_order, const Region& region, std::size_t n_pairs,
                           std::uint64_t seed) {
  if (!(s_order > 0.0 && s_order < 1.0)) throw std::invalid_argument("fractional_seminorm: order must be in (0, 1)");
  const auto cells = region_cells(traj, region);
  if (cells.size() < 2 || n_pairs == 0) throw std::invalid_argument("fractional_seminorm: too few points");
  const int d = traj.dim();
  const double expo = 0.5 * (2 * d + 1 + 2.0 * s_order);  // applied to the squared distance
  const std::size_t N = cells.size();
  const double mean = chunked_sum(n_pairs, [&](std::size_t i) {
    CounterRng rng(hash_combine(seed, i));
    const std::size_t a = static_cast<std::size_t>(rng.uniform() * static_cast<double>(N));
    std::size_t b = static_cast<std::size_t>(rng.uniform() * static_cast<double>(N - 1));
    if (b >= a) ++b;  // uniform over the other cells
    const KineticPoint za = traj.point(cells[a].snap, cells[a].cell);
    const KineticPoint zb = traj.point(cells[b].snap, cells[b].cell);
    // Left-invariant increment zb^{-1} o za.
    const KineticPoint dz = compose(group_inverse(zb), za);
    double r2 = dz.t() * dz.t();
    for (int k = 0; k < d; ++k) r2 += dz.x(k) * dz.x(k) + dz.v(k) * dz.v(k);
    const double df = cell_value(traj, cells[a]) - cell_value(traj, cells[b]);
    return df * df / std::pow(r2, expo);
  }) / static_cast<double>(n_pairs);
  const double measure = static_cast<double>(N) * cell_weight(traj);
  return measure * measure * mean;
}

ProbeReport energy_probe(const Trajectory& traj, const Cylinder& q_int, const Cylinder& q_ext) {
  require_in_run(traj, q_ext, "energy_probe");
  const EnergyEstimateReport e = energy_estimate_check(traj, q_int, q_ext);
  ProbeReport rep;
  rep.name = "energy";
  rep.params["q_int"] = cylinder_to_json(q_int);
  rep.params["q_ext"] = cylinder_to_json(q_ext);
  rep.set("C01", e.c01);
  rep.set("lhs", e.lhs);
  rep.set("rhs", e.rhs);
  rep.set("C_bar", e.cbar);
  rep.verdict = e.verdict;
  return rep;
}

ProbeReport fractional_probe(const Trajectory& traj, double s_order, const Cylinder& q_int, const Cylinder& q_ext,
                             std::size_t n_pairs, std::uint64_t seed) {
  require_in_run(traj, q_ext, "fractional_probe");
  const double semi = fractional_seminorm(traj, s_order, q_int, n_pairs, seed);
  const auto cells = region_cells(traj, q_ext);
  const double w = cell_weight(traj);
  const double f2 = w * lp_power_sum(traj, cells, 2.0);
  const double s2 = w * chunked_sum(cells.size(), [&](std::size_t i) {
    const double s = traj.source_at(cells[i].snap, cells[i].cell);
    return s * s;
  });
  ProbeReport rep;
  rep.name = "fractional";
  rep.params["s_order"] = s_order;
  rep.params["q_int"] = cylinder_to_json(q_int);
  rep.params["q_ext"] = cylinder_to_json(q_ext);
  rep.params["pairs"] = n_pairs;
  rep.params["seed"] = seed;
  rep.set("seminorm_sq", semi);
  rep.set("rhs", f2 + s2);
  rep.set("C", ratio_or_degenerate(semi, f2 + s2));
  rep.verdict = std::isnan(rep.get("C")) ? "degenerate" : "measured";
  return rep;
}

}  // namespace kfp
