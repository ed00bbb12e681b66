#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "kfp/iteration.hpp"
#include "kfp/probes.hpp"
#include "kfp/region_reduce.hpp"
#include "kfp/sampling.hpp"

using namespace kfp;

namespace {

Trajectory checkerboard_run(int n) {
  SolverConfig cfg;
  cfg.grid = PhaseGrid{1, n, n, 2.0, 2.0};
  cfg.dt = 1.0 / 64.0;
  cfg.t_end = 1.5;
  FieldRecipe r;
  r.kind = Recipe::Checkerboard;
  cfg.field = std::make_shared<const CoefficientField>(1, r, EllipticityBounds{0.5, 2.0}, 17);
  const PhaseGridFunction f0 = PhaseGridFunction::from_function(cfg.grid, 0.0, [](const KineticPoint& z) {
    const double s = z.x(0) * z.x(0) + z.v(0) * z.v(0) / 4.0;
    return 0.05 + (s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0);
  });
  Trajectory t = solve(cfg, f0);
  t.field = cfg.field;
  return t;
}

/// Even grid: nodes on odd multiples of 1/32.
const Trajectory& rough_run() {
  static const Trajectory traj = checkerboard_run(64);
  return traj;
}

/// Odd grid: the origin of (x, v) is a node, so cylinders centred there are
/// never empty however small.
const Trajectory& centred_run() {
  static const Trajectory traj = checkerboard_run(33);
  return traj;
}

Trajectory constant_run(double value) {
  Trajectory t = rough_run();
  for (auto& s : t.snapshots)
    for (double& v : s.values) v = value;
  return t;
}

const KineticPoint kTop({0.03125}, {0.03125}, 1.5);

void check_same(const ProbeReport& a, const ProbeReport& b, double tol) {
  REQUIRE(a.constants.size() == b.constants.size());
  for (std::size_t i = 0; i < a.constants.size(); ++i) {
    CAPTURE(a.constants[i].first);
    CHECK(a.constants[i].first == b.constants[i].first);
    const double x = a.constants[i].second, y = b.constants[i].second;
    if (std::isnan(x) || std::isnan(y)) {
      CHECK(std::isnan(x) == std::isnan(y));
    } else if (std::isinf(x) || std::isinf(y)) {
      CHECK(x == y);
    } else {
      CHECK(std::abs(x - y) <= tol * std::max(1.0, std::abs(y)));
    }
  }
  CHECK(a.verdict == b.verdict);
}

std::vector<ProbeReport> slanted_probes(const Trajectory& traj, const KineticPoint& z0) {
  const KineticPoint top = compose(z0, kTop);
  std::vector<ProbeReport> out;
  out.push_back(harnack_probe(traj, HarnackParams{}, top));
  out.push_back(gain_probe(traj, Cylinder::slanted(top, 0.5), Cylinder::slanted(top, 0.9)));
  out.push_back(energy_probe(traj, Cylinder::slanted(top, 0.5), Cylinder::slanted(top, 0.9)));
  out.push_back(holder_probe(traj, top, 0.5, 0.9, 4));
  out.push_back(fractional_probe(traj, 0.25, Cylinder::slanted(top, 0.5), Cylinder::slanted(top, 0.9), 4000, 3));
  return out;
}

}  // namespace

TEST_CASE("region cells agree with brute-force membership and the serial scan") {
  const Trajectory& traj = rough_run();
  for (const Region& reg : {Region{Cylinder::slanted(kTop, 0.5)}, Region{Cylinder::cube(kTop, 0.4)},
                            Region{Cylinder::elongated(kTop, 0.9)},
                            Region{BallProduct{kTop, 0.5, 0.5, 1.0}}}) {
    const auto cells = region_cells(traj, reg);
    CHECK(cells.size() == region_cells_serial(traj, reg).size());
    std::size_t brute = 0;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s)
      for (std::size_t k = 0; k < traj.grid().size(); ++k) brute += region_contains(reg, traj.point(s, k)) ? 1 : 0;
    CHECK(cells.size() == brute);
    CHECK(region_in_run(traj, reg));
  }
  CHECK_FALSE(region_in_run(traj, Region{Cylinder::slanted(KineticPoint({0.0}, {0.0}, 2.0), 0.5)}));
}

TEST_CASE("chunked reductions are deterministic across serial and parallel paths") {
  const std::size_t n = 100003;
  auto term = [](std::size_t i) { return std::sin(static_cast<double>(i)) * 1e-3 + 1.0 / (1.0 + i); };
  CHECK(chunked_sum(n, term, true) == chunked_sum(n, term, false));
  CHECK(chunked_max(n, term, true) == chunked_max(n, term, false));
  CHECK(chunked_min(n, term, true) == chunked_min(n, term, false));
}

TEST_CASE("norms, oscillation and level sets on constant data") {
  const Trajectory c = constant_run(2.0);
  const Region q{Cylinder::slanted(kTop, 0.5)};
  const double n = static_cast<double>(region_cells(c, q).size()) * cell_weight(c);
  CHECK(norm_on_cylinder(c, q, 1.0) == doctest::Approx(2.0 * n).epsilon(1e-12));
  CHECK(norm_on_cylinder(c, q, 2.0) == doctest::Approx(2.0 * std::sqrt(n)).epsilon(1e-12));
  CHECK(norm_on_cylinder(c, q, kInfinity) == 2.0);
  CHECK(oscillation(c, q) == 0.0);
  const LevelSetMeasures m = level_set_measures(c, 0.5, q);
  CHECK(m.high == doctest::Approx(m.total));
  CHECK(m.low == 0.0);
  CHECK(m.mid == 0.0);
  const Trajectory zero = constant_run(0.0);
  const LevelSetMeasures z = level_set_measures(zero, 0.5, q);
  CHECK(z.low == doctest::Approx(z.total));
}

TEST_CASE("level set measures partition the region") {
  const Trajectory& traj = rough_run();
  const Region q{Cylinder::slanted(kTop, 0.9)};
  const LevelSetMeasures m = level_set_measures(traj, 0.8, q);
  CHECK(m.high + m.low + m.mid == doctest::Approx(m.total).epsilon(1e-12));
  double brute_mid = 0.0;
  for (const CellRef& c : region_cells(traj, q)) {
    const double f = cell_value(traj, c);
    if (f > 0.0 && f < 0.2) brute_mid += cell_weight(traj);
  }
  CHECK(m.mid == doctest::Approx(brute_mid).epsilon(1e-12));
}

TEST_CASE("Hoelder fit is positive on rough data and degenerate on constants") {
  const HolderFitResult fit = holder_fit(rough_run(), kTop, 0.5, 0.9, 4);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.alpha > 0.0);
  CHECK(fit.alpha_theta == holder_alpha(0.5, 0.9));
  const HolderFitResult flat = holder_fit(constant_run(1.0), kTop, 0.5, 0.9, 4);
  CHECK(flat.degenerate);
  CHECK(std::isnan(flat.alpha));
}

TEST_CASE("Harnack ratio is finite on positive data and degenerate on zero data") {
  const ProbeReport rep = harnack_probe(rough_run(), HarnackParams{}, kTop);
  CHECK(rep.verdict == "measured");
  CHECK(std::isfinite(rep.get("C_emp")));
  CHECK(rep.get("inf_plus") > 0.0);
  const ProbeReport zero = harnack_probe(constant_run(0.0), HarnackParams{}, kTop);
  CHECK(zero.verdict == "degenerate");
  CHECK(std::isnan(zero.get("C_emp")));
  Trajectory neg = constant_run(-1.0);
  CHECK_THROWS_AS(harnack_probe(neg, HarnackParams{}, kTop), std::invalid_argument);
  HarnackParams bad;
  bad.Delta = 0.1;  // below R^2
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("probe constants are invariant under Galilean changes of frame") {
  const Trajectory& traj = rough_run();
  const auto ref = slanted_probes(traj, KineticPoint::origin(1));
  for (const KineticPoint& z0 : {KineticPoint({0.25}, {0.5}, 0.75), KineticPoint({-3.0}, {-1.25}, -2.0)}) {
    const auto moved = slanted_probes(traj.transformed(GalileanTransform{z0}), z0);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CAPTURE(ref[i].name);
      check_same(moved[i], ref[i], 1e-10);
    }
  }
  // Cube cylinders are preserved by shifts without a velocity component.
  const KineticPoint z0({0.5}, {0.0}, 0.25);
  const Trajectory moved = centred_run().transformed(GalileanTransform{z0});
  check_same(caccio_bis_probe(moved, compose(z0, KineticPoint({0.0}, {0.0}, 1.0)), 0.2),
             caccio_bis_probe(centred_run(), KineticPoint({0.0}, {0.0}, 1.0), 0.2), 1e-10);
}

TEST_CASE("Harnack ratio is invariant under positive scaling of f and s") {
  Trajectory traj = rough_run();
  FieldRecipe r = traj.field->recipe();
  r.s_max = 0.01;
  traj.field = std::make_shared<const CoefficientField>(1, r, traj.field->bounds(), traj.field->seed());
  const double ref = harnack_probe(traj, HarnackParams{}, kTop).get("C_emp");
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    Trajectory t = traj.scaled(c);
    t.field = std::make_shared<const CoefficientField>(traj.field->with_source_scale(c));
    CHECK(std::abs(harnack_probe(t, HarnackParams{}, kTop).get("C_emp") - ref) <= 1e-12 * ref);
  }
}

TEST_CASE("gain constant is homogeneous of degree zero") {
  const Trajectory& traj = rough_run();
  const double ref = gain_probe(traj, Cylinder::slanted(kTop, 0.5), Cylinder::slanted(kTop, 0.9)).get("C_bar");
  const double big =
      gain_probe(traj.scaled(3.0), Cylinder::slanted(kTop, 0.5), Cylinder::slanted(kTop, 0.9)).get("C_bar");
  CHECK(big == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("doubling lower bounds") {
  const KineticPoint base({0.0}, {0.0}, 0.125);
  const DoublingResult res = doubling_probe(centred_run(), 0.25, 2, base, 0.25);
  REQUIRE(res.inf_levels.size() == 3);
  REQUIRE(res.h.size() == 2);
  for (double v : res.inf_levels) CHECK(v > 0.0);
  CHECK(res.h_min == std::min(res.h[0], res.h[1]));
  CHECK(res.h[0] == doctest::Approx(res.inf_levels[1] / res.inf_levels[0]));
}

TEST_CASE("smooth cutoff and weighted means") {
  CHECK(cutoff_phi(0.0) == 1.0);
  CHECK(cutoff_phi(-1.0) == 1.0);
  CHECK(cutoff_phi(2.0) == 0.0);
  CHECK(cutoff_phi(-2.5) == 0.0);
  double prev = 1.0;
  for (double a = 1.0; a <= 2.0; a += 0.01) {
    const double p = cutoff_phi(a);
    CHECK(p <= prev);
    CHECK(p >= 0.0);
    CHECK(p == cutoff_phi(-a));
    prev = p;
  }
  const Trajectory c = constant_run(3.5);
  CHECK(weighted_mean(c, KineticPoint({0.0}, {0.0}, 1.0), 0.8, 1.0) == doctest::Approx(3.5).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_mean(c, KineticPoint({0.0}, {0.0}, 1.0), 0.8, 1.001), std::invalid_argument);
}

TEST_CASE("fractional seminorm vanishes on constants and is reproducible") {
  const Region q{Cylinder::slanted(kTop, 0.5)};
  CHECK(fractional_seminorm(constant_run(1.0), 0.25, q, 2000, 9) == 0.0);
  const double a = fractional_seminorm(rough_run(), 0.25, q, 2000, 9);
  CHECK(a > 0.0);
  CHECK(a == fractional_seminorm(rough_run(), 0.25, q, 2000, 9));
}

TEST_CASE("reverse Hoelder scan and integrability gain") {
  Trajectory traj = rough_run();
  GehringParams p;
  p.q0 = Cylinder::cube(kTop, 0.5);
  p.radii = {0.05, 0.1};
  p.center_stride = 7;
  p.q1 = Cylinder::slanted(kTop, 0.5);
  p.q2 = Cylinder::slanted(kTop, 0.25);
  const ProbeReport rep = gehring_probe(traj, p);
  CHECK(rep.get("admissible") > 0.0);
  CHECK(std::isfinite(rep.get("b_emp")));
  CHECK(rep.get("eps") >= 0.0);
  CHECK(rep.get("eps") <= p.eps_cap);
  p.radii = {0.2};  // Q_{4R} never fits
  CHECK_THROWS_AS(gehring_probe(traj, p), std::invalid_argument);
  p.radii = {0.05};
  p.q0 = Cylinder::slanted(kTop, 0.5);
  CHECK_THROWS_AS(gehring_probe(traj, p), std::invalid_argument);
}

TEST_CASE("propagation ladder on positive data") {
  const HarnackParams hp;
  const KineticPoint top({0.0}, {0.0}, 1.5);
  const KineticPoint z({0.0}, {0.0}, 1.0);
  const ProbeReport rep = propagation_probe(centred_run(), hp, top, z, {0.05, 0.1, 0.2});
  CHECK(rep.get("min_plus") > 0.0);
  CHECK(rep.get("C_pm") == doctest::Approx(propagation_constant(hp.R, hp.q)));
  CHECK((rep.verdict == "holds" || rep.verdict == "violated"));
}
