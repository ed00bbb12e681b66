// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles/kolmogorov_reference.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "kfp/geometry.hpp"
#include "kfp/iteration.hpp"
#include "kfp/kolmogorov.hpp"
#include "kfp/landau.hpp"
#include "kfp/probes.hpp"
#include "kfp/sampling.hpp"
#include "kfp/solver.hpp"

namespace fs = std::filesystem;
using namespace kfp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Appends "key=value" to the detail string and folds the condition into pass.
class Recorder {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      append("FAILED " + what);
    }
  }
  void note(const char* fmt, double value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, value);
    append(buf);
  }
  Outcome result() const { return out_; }

 private:
  void append(const std::string& s) {
    if (!out_.detail.empty()) out_.detail += "; ";
    out_.detail += s;
  }
  Outcome out_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Geometry exactness

Outcome geometry_exactness() {
  Recorder r;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checks = 0, failures = 0;
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    // 1250 samples x 8 identities = 10^4 checks per dimension.
    const GroupLawReport g = group_law_self_test(1250, d, 0xacce97 + d, 1e-10);
    checks += g.checks;
    failures += g.failures;
    worst = std::max(worst, g.max_error);
  }
  const double secs = seconds_since(t0);
  r.note("checks=%.0f", static_cast<double>(checks));
  r.note("max_error=%.3g", worst);
  r.note("time=%.2fs", secs);
  r.require(checks >= 10000, "at least 1e4 checks");
  r.require(failures == 0, "all checks within 1e-10");
  r.require(secs < 5.0, "runtime < 5 s");
  return r.result();
}

// ---------------------------------------------------------------------------
// 2. Covering

Outcome covering() {
  Recorder r;
  CoveringParams ok;
  ok.delta = 0.5;
  ok.R = 1e-12;
  ok.n_samples = 10000;
  const CoveringReport a = verify_covering(ok);
  r.note("rhs=%.4g", a.hypothesis_rhs);
  r.note("claim_a_cex=%.0f", static_cast<double>(a.claim_a.counterexamples.size()));
  r.note("claim_b_cex=%.0f", static_cast<double>(a.claim_b.counterexamples.size()));
  r.require(a.hypothesis_rhs <= ok.delta, "sufficient condition holds");
  r.require(a.claim_a.verdict == "pass" && a.claim_b.verdict == "pass", "zero counterexamples");
  r.require(a.claim_b.checked >= 10000, "1e4 samples");

  CoveringParams bad = ok;
  bad.R = 0.05;
  const CoveringReport b = verify_covering(bad);
  r.require(b.claim_b.verdict == "hypothesis unmet", "violating set reported as hypothesis unmet");
  return r.result();
}

// ---------------------------------------------------------------------------
// 3. Landau oracle equivalence

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den == 0.0 ? num : num / den;
}

Outcome landau_equivalence() {
  Recorder r;
  const auto t0 = std::chrono::steady_clock::now();
  const VelocityGrid g{2, 32, 4.0};
  VelocityGridFunction f{g, std::vector<double>(g.size())};
  CounterRng rng(3);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.values[k] = maxwellian(g).values[k] * (0.5 + rng.uniform());
  }
  double worst = 0.0, min_eig = kInfinity;
  for (double gamma : {-2.0, -1.5, -1.0, 0.0, 0.5}) {
    LandauParams p;
    p.d = 2;
    p.gamma = gamma;
    const LandauFields direct = landau_fields_direct(f, p);
    const LandauFields fft = landau_fields_fft(f, p);
    worst = std::max({worst, max_rel(fft.A, direct.A), max_rel(fft.B, direct.B), max_rel(fft.c, direct.c)});
    for (std::size_t k = 0; k < direct.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(direct.A_at(k), Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff() / std::max(1.0, es.eigenvalues().maxCoeff()));
    }
    if (gamma == -2.0) {
      bool local = true;
      for (std::size_t k = 0; k < direct.size(); ++k) {
        local = local && direct.c[k] == p.c_const * f.values[k] && fft.c[k] == p.c_const * f.values[k];
      }
      r.require(local, "c = c f exactly at gamma = -d");
    }
  }
  const double secs = seconds_since(t0);
  r.note("max_rel=%.3g", worst);
  r.note("min_scaled_eig=%.3g", min_eig);
  r.note("time=%.2fs", secs);
  r.require(worst <= 1e-10, "FFT vs direct within 1e-10");
  r.require(min_eig >= -1e-12, "A PSD");
  r.require(secs < 60.0, "runtime < 60 s");
  return r.result();
}

// ---------------------------------------------------------------------------
// 4. Determinant exponents

Outcome determinant_exponents() {
  Recorder r;
  r.require(kappa_exponent(-2.0, 3) == -2.0, "kappa(-2, 3) = -2");
  r.require(kappa_exponent(-3.0, 3) == -7.0, "kappa(-3, 3) = -7");
  const VelocityGrid g{3, 20, 6.0};
  const VelocityGridFunction f = maxwellian(g);
  for (double gamma : {-3.0, -2.0}) {
    LandauParams p;
    p.d = 3;
    p.gamma = gamma;
    const BoundsReport b = check_coefficient_bounds(f, p, MomentBounds{});
    r.note(gamma == -3.0 ? "min_det_ratio(g=-3)=%.4g" : "min_det_ratio(g=-2)=%.4g", b.min_det_ratio);
    r.require(b.lower_bound_ok, "min det A / (1+|v|)^kappa > 0");
  }
  return r.result();
}

// ---------------------------------------------------------------------------
// 5. Solver against the Kolmogorov oracle

SolverConfig kolmogorov_config(int n, double dt) {
  SolverConfig cfg;
  cfg.grid = PhaseGrid{1, n, n, 8.0, 8.0};
  cfg.dt = dt;
  cfg.t_end = 1.0;
  cfg.field = std::make_shared<const CoefficientField>(1, FieldRecipe{}, EllipticityBounds{1.0, 1.0}, 1);
  cfg.snapshot_every = static_cast<int>(std::lround(1.0 / dt));
  return cfg;
}

const Covariance2 kInitialCov{0.25, 0.0, 0.25};

PhaseGridFunction gaussian_initial(const PhaseGrid& g) {
  return PhaseGridFunction::from_function(g, 0.0, [](const KineticPoint& z) {
    const double x[1] = {z.x(0)}, v[1] = {z.v(0)};
    return gaussian_density(kInitialCov, x, v);
  });
}

Covariance2 grid_covariance(const PhaseGridFunction& f) {
  const PhaseGrid& g = f.grid;
  double m = 0, xx = 0, xv = 0, vv = 0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const double w = f.values[g.index(i, j)];
      const double x = g.x_node(i), v = g.v_node(j);
      m += w;
      xx += w * x * x;
      xv += w * x * v;
      vv += w * v * v;
    }
  return {xx / m, xv / m, vv / m};
}

double l1_error(const PhaseGridFunction& f, const Covariance2& exact) {
  const PhaseGrid& g = f.grid;
  double err = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const double x[1] = {g.x_node(i)}, v[1] = {g.v_node(j)};
      err += std::abs(f.values[g.index(i, j)] - gaussian_density(exact, x, v));
    }
  return err * g.cell_volume();
}

Outcome kolmogorov_oracle_check() {
  Recorder r;
  const auto t0 = std::chrono::steady_clock::now();

  // Second moments: the point-mass covariance K(1) is recovered from a Gaussian
  // start through Cov(1) = Phi Cov(0) Phi^T + K(1).
  SolverConfig cfg = kolmogorov_config(128, 1.0 / 128.0);
  cfg.interpolation = Interpolation::Cubic;
  const PhaseGridFunction f0 = gaussian_initial(cfg.grid);
  const Trajectory traj = solve(cfg, f0);
  const Covariance2 c0 = grid_covariance(f0);
  const Covariance2 c1 = grid_covariance(traj.snapshots.back());
  const Covariance2 transported = evolve_covariance(c0, 1.0);
  const Covariance2 k0 = kolmogorov_covariance(1.0);
  const double var_x = c1.xx - (transported.xx - k0.xx);
  const double cov = c1.xv - (transported.xv - k0.xv);
  const double var_v = c1.vv - (transported.vv - k0.vv);
  const double ex = std::abs(var_x / kfp_oracle::kMcVarX - 1.0);
  const double ec = std::abs(cov / kfp_oracle::kMcCovXV - 1.0);
  const double ev = std::abs(var_v / kfp_oracle::kMcVarV - 1.0);
  r.note("rel_err_var_x=%.2e", ex);
  r.note("rel_err_cov=%.2e", ec);
  r.note("rel_err_var_v=%.2e", ev);
  r.require(ex < 0.02 && ec < 0.02 && ev < 0.02, "second moments within 2% of the Monte Carlo oracle");

  // L1 error against the exact Gaussian solution under simultaneous refinement.
  const Covariance2 exact = evolve_covariance(kInitialCov, 1.0);
  const SolverConfig coarse = kolmogorov_config(64, 1.0 / 32.0);
  const SolverConfig fine = kolmogorov_config(128, 1.0 / 64.0);
  const double e_coarse = l1_error(solve(coarse, gaussian_initial(coarse.grid)).snapshots.back(), exact);
  const double e_fine = l1_error(solve(fine, gaussian_initial(fine.grid)).snapshots.back(), exact);
  const double ratio = e_coarse / e_fine;
  r.note("L1_coarse=%.3e", e_coarse);
  r.note("L1_fine=%.3e", e_fine);
  r.note("ratio=%.3f", ratio);
  r.require(ratio >= 1.4 && ratio <= 2.6, "L1 error halves within 30%");
  const double secs = seconds_since(t0);
  r.note("time=%.2fs", secs);
  r.require(secs < 300.0, "runtime < 5 min");
  return r.result();
}

// ---------------------------------------------------------------------------
// 6. Structural invariants

SolverConfig rough_config(int n, double dt, double t_end, std::uint64_t seed, Scheme scheme) {
  SolverConfig cfg;
  cfg.grid = PhaseGrid{1, n, n, 2.0, 2.0};
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.scheme = scheme;
  FieldRecipe rec;
  rec.kind = Recipe::Checkerboard;
  cfg.field = std::make_shared<const CoefficientField>(1, rec, EllipticityBounds{0.5, 2.0}, seed);
  return cfg;
}

PhaseGridFunction random_state(const PhaseGrid& g, std::uint64_t seed) {
  PhaseGridFunction f(g, 0.0);
  CounterRng rng(seed);
  for (double& v : f.values) v = rng.uniform();
  return f;
}

Outcome structural_invariants() {
  Recorder r;
  double mass_drift = 0.0, l2_rise = 0.0, min_value = kInfinity;
  for (Scheme s : {Scheme::SplitSemiLagrangian, Scheme::SplitUpwind}) {
    const SolverConfig cfg = rough_config(64, 1.0 / 64.0, 1.0, 5, s);
    const Trajectory traj = solve(cfg, random_state(cfg.grid, 12));
    const auto& rec = traj.ledger.records;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      mass_drift = std::max(mass_drift, std::abs(rec[k].mass - rec[0].mass) / rec[0].mass);
      if (k > 0) l2_rise = std::max(l2_rise, (rec[k].l2 - rec[k - 1].l2) / rec[k - 1].l2);
      min_value = std::min(min_value, rec[k].min);
    }
  }
  r.note("mass_drift=%.2e", mass_drift);
  r.note("max_l2_rise=%.2e", l2_rise);
  r.note("min=%.2e", min_value);
  r.require(mass_drift <= 1e-12, "mass conserved to 1e-12");
  r.require(l2_rise <= 1e-12, "L2 non-increasing");
  r.require(min_value >= -1e-12, "positivity");

  std::size_t held = 0;
  double worst = -kInfinity;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const SolverConfig cfg = rough_config(32, 1.0 / 32.0, 0.5, 100 + k, Scheme::SplitUpwind);
    const PhaseGridFunction f0 = random_state(cfg.grid, 200 + k);
    PhaseGridFunction g0 = random_state(cfg.grid, 300 + k);
    for (std::size_t i = 0; i < g0.values.size(); ++i) g0.values[i] = f0.values[i] + g0.values[i];
    const ComparisonReport rep = comparison_check(cfg, f0, g0);
    held += rep.holds ? 1 : 0;
    worst = std::max(worst, rep.max_violation);
  }
  r.note("comparison_held=%.0f/10", static_cast<double>(held));
  r.note("max(f-g)=%.2e", worst);
  r.require(held == 10, "comparison on 10 ordered pairs");
  return r.result();
}

// ---------------------------------------------------------------------------
// 7. Iteration calculus

Outcome iteration_calculus() {
  Recorder r;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> alpha(0.05, 1.6);
  std::uniform_int_distribution<int> n(1, 40);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double a = alpha(rng);
    const int k = n(rng);
    const double direct = exponent_sum_direct(a, k);
    worst = std::max(worst, std::abs(exponent_sum(a, k).value - direct) / direct);
  }
  r.note("exponent_sum_rel=%.2e", worst);
  r.require(worst <= 1e-12, "closed form equals direct sum");

  bool dominates = true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const DeGiorgiReport d = degiorgi_threshold(1.0 + 4.0 * u(rng), 1.05 + 2.0 * u(rng), std::exp(-10.0 * u(rng)), 30);
    dominates = dominates && d.bound_dominates;
  }
  r.require(dominates, "De Giorgi bound dominates the recursion");

  const MoserReport m = moser_product(4.0, 2.0, 1.0, 60);
  const double gap = std::abs(m.partial[59] - m.partial[29]);
  r.note("moser_gap=%.2e", gap);
  r.require(gap < 1e-6, "Moser Cauchy check");
  r.require(sobolev_p(3) == 42.0 / 19.0, "sobolev_p(3) = 42/19");
  r.require(holder_alpha(0.5, 0.25) == 1.0 / 3.0, "holder_alpha(1/2, 1/4) = 1/3");
  return r.result();
}

// ---------------------------------------------------------------------------
// 8. Probe stability over a seeded ensemble

Trajectory ensemble_run(int n, std::uint64_t seed) {
  SolverConfig cfg = rough_config(n, 1.0 / n, 1.5, seed, Scheme::SplitSemiLagrangian);
  const PhaseGridFunction f0 = PhaseGridFunction::from_function(cfg.grid, 0.0, [](const KineticPoint& z) {
    const double s = (z.x(0) * z.x(0) + z.v(0) * z.v(0)) / 2.25;
    return 0.05 + (s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0);
  });
  Trajectory t = solve(cfg, f0);
  t.field = cfg.field;
  return t;
}

Outcome probe_stability() {
  Recorder r;
  const auto t0 = std::chrono::steady_clock::now();
  const KineticPoint top({0.0}, {0.0}, 1.5);
  const Cylinder q_int = Cylinder::slanted(top, 0.5), q_ext = Cylinder::slanted(top, 1.0);
  double harnack_max[2] = {0.0, 0.0}, gain_max[2] = {0.0, 0.0}, alpha_min = kInfinity;
  bool finite = true;
  for (int level = 0; level < 2; ++level) {
    const int n = level == 0 ? 64 : 128;
    const double h = 4.0 / n;
    const KineticPoint z1({0.5 * h}, {0.5 * h}, 1.5);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Trajectory traj = ensemble_run(n, seed);
      const double c_emp = harnack_probe(traj, HarnackParams{}, top).get("C_emp");
      const double c_bar = gain_probe(traj, q_int, q_ext).get("C_bar");
      const double alpha = holder_probe(traj, z1, 0.5, 0.9, 4).get("alpha");
      finite = finite && std::isfinite(c_emp) && std::isfinite(c_bar);
      harnack_max[level] = std::max(harnack_max[level], c_emp);
      gain_max[level] = std::max(gain_max[level], c_bar);
      alpha_min = std::min(alpha_min, std::isnan(alpha) ? -kInfinity : alpha);
    }
  }
  const double dh = std::abs(harnack_max[1] / harnack_max[0] - 1.0);
  const double dg = std::abs(gain_max[1] / gain_max[0] - 1.0);
  const double secs = seconds_since(t0);
  r.note("harnack_max_64=%.4g", harnack_max[0]);
  r.note("harnack_max_128=%.4g", harnack_max[1]);
  r.note("gain_max_64=%.4g", gain_max[0]);
  r.note("gain_max_128=%.4g", gain_max[1]);
  r.note("min_alpha=%.3g", alpha_min);
  r.note("time=%.1fs", secs);
  r.require(finite, "C_emp and C_bar finite on every run");
  r.require(dh < 0.25 && dg < 0.25, "ensemble maxima change < 25% under refinement");
  r.require(alpha_min > 0.0, "Hoelder alpha > 0 on every run");
  r.require(secs < 1800.0, "runtime < 30 min");
  return r.result();
}

// ---------------------------------------------------------------------------
// 9. Transform invariance

std::vector<ProbeReport> all_probes(const Trajectory& traj, const KineticPoint& z0) {
  const KineticPoint top = compose(z0, KineticPoint({0.03125}, {0.03125}, 1.5));
  const Cylinder q_int = Cylinder::slanted(top, 0.5), q_ext = Cylinder::slanted(top, 0.9);
  std::vector<ProbeReport> out;
  out.push_back(harnack_probe(traj, HarnackParams{}, top));
  out.push_back(gain_probe(traj, q_int, q_ext));
  out.push_back(energy_probe(traj, q_int, q_ext));
  out.push_back(holder_probe(traj, top, 0.5, 0.9, 4));
  out.push_back(fractional_probe(traj, 0.25, q_int, q_ext, 4000, 5));
  ProbeReport misc;
  misc.name = "norms";
  misc.set("L2", norm_on_cylinder(traj, Region{q_ext}, 2.0));
  misc.set("Linf", norm_on_cylinder(traj, Region{q_ext}, kInfinity));
  misc.set("osc", oscillation(traj, Region{q_int}));
  const LevelSetMeasures m = level_set_measures(traj, 0.8, Region{q_ext});
  misc.set("high", m.high);
  misc.set("mid", m.mid);
  misc.set("low", m.low);
  out.push_back(misc);
  return out;
}

double report_distance(const ProbeReport& a, const ProbeReport& b) {
  double worst = 0.0;
  if (a.constants.size() != b.constants.size()) return kInfinity;
  for (std::size_t i = 0; i < a.constants.size(); ++i) {
    const double x = a.constants[i].second, y = b.constants[i].second;
    if (std::isnan(x) && std::isnan(y)) continue;
    if (x == y) continue;
    worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(y)));
  }
  return worst;
}

Outcome transform_invariance() {
  Recorder r;
  const Trajectory traj = ensemble_run(64, 3);
  const auto ref = all_probes(traj, KineticPoint::origin(1));
  double worst = 0.0;
  CounterRng rng(9);
  for (int k = 0; k < 5; ++k) {
    const KineticPoint z0({rng.uniform(-4, 4)}, {rng.uniform(-2, 2)}, rng.uniform(-3, 3));
    const auto moved = all_probes(traj.transformed(GalileanTransform{z0}), z0);
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, report_distance(moved[i], ref[i]));
  }
  r.note("max_transform_dev=%.2e", worst);
  r.require(worst <= 1e-10, "probe constants invariant under T_z0 to 1e-10");

  Trajectory src = traj;
  FieldRecipe rec = traj.field->recipe();
  rec.s_max = 0.01;
  src.field = std::make_shared<const CoefficientField>(1, rec, traj.field->bounds(), traj.field->seed());
  const KineticPoint top({0.03125}, {0.03125}, 1.5);
  const double c_ref = harnack_probe(src, HarnackParams{}, top).get("C_emp");
  double scale_dev = 0.0;
  for (double c : {1e-3, 0.25, 3.0, 1e3}) {
    Trajectory t = src.scaled(c);
    t.field = std::make_shared<const CoefficientField>(src.field->with_source_scale(c));
    scale_dev = std::max(scale_dev, std::abs(harnack_probe(t, HarnackParams{}, top).get("C_emp") / c_ref - 1.0));
  }
  r.note("max_scaling_dev=%.2e", scale_dev);
  r.require(scale_dev <= 1e-12, "C_emp invariant under scaling of (f, s) to 1e-12");
  return r.result();
}

// ---------------------------------------------------------------------------
// 10. Replay determinism

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kfp-lab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

Outcome replay_determinism() {
  Recorder r;
  const fs::path dir = fs::temp_directory_path() / ("kfp_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg = R"({
  "schema_version": 1,
  "seed": 11,
  "grid": {"d": 1, "nx": 64, "nv": 64, "x_extent": 2.0, "v_extent": 2.0},
  "solver": {"dt": 0.015625, "t_end": 1.5},
  "field": {"recipe": "checkerboard", "lambda": 0.5, "Lambda": 2.0},
  "initial": {"kind": "bump", "amplitude": 1.0, "radius_x": 1.5, "radius_v": 1.5, "floor": 0.05},
  "probes": [
    {"type": "harnack", "z_top": {"x": [0.03125], "v": [0.03125], "t": 1.5}},
    {"type": "gain", "q_int": {"center": {"x": [0.03125], "v": [0.03125], "t": 1.5}, "radius": 0.5},
                     "q_ext": {"center": {"x": [0.03125], "v": [0.03125], "t": 1.5}, "radius": 1.0}},
    {"type": "holder", "z1": {"x": [0.03125], "v": [0.03125], "t": 1.5}, "theta": 0.5, "omega": 0.9, "K": 4},
    {"type": "fractional", "s": 0.25, "n_pairs": 2000,
     "q_int": {"center": {"x": [0.03125], "v": [0.03125], "t": 1.5}, "radius": 0.5},
     "q_ext": {"center": {"x": [0.03125], "v": [0.03125], "t": 1.5}, "radius": 1.0}}
  ]
})";
  std::ofstream(dir / "cfg.json") << cfg;
  const std::string c = (dir / "cfg.json").string();
  const int s1 = run_cli({"run", "--config", c, "--out", (dir / "a").string()});
  const int s2 = run_cli({"run", "--config", c, "--out", (dir / "b").string()});
  const int s3 = run_cli({"probe", "--config", c, "--snapshots", (dir / "a" / "snapshots").string(), "--out",
                          (dir / "replay").string()});
  r.require(s1 == 0 && s2 == 0 && s3 == 0, "all runs exit 0");
  const std::string a = slurp(dir / "a" / "report.json");
  r.note("report_bytes=%.0f", static_cast<double>(a.size()));
  r.require(!a.empty(), "report written");
  r.require(a == slurp(dir / "b" / "report.json"), "identical runs give byte-identical JSON");
  r.require(a == slurp(dir / "replay" / "report.json"), "replay equals in-run report");
  fs::remove_all(dir);
  return r.result();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "geometry exactness", geometry_exactness},
      {2, "covering", covering},
      {3, "Landau oracle equivalence", landau_equivalence},
      {4, "determinant exponents", determinant_exponents},
      {5, "solver vs Kolmogorov oracle", kolmogorov_oracle_check},
      {6, "structural invariants", structural_invariants},
      {7, "iteration calculus", iteration_calculus},
      {8, "probe stability", probe_stability},
      {9, "transform invariance", transform_invariance},
      {10, "replay determinism", replay_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
