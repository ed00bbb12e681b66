#include "cli.hpp"

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kfp/experiment.hpp"
#include "kfp/geometry.hpp"
#include "kfp/iteration.hpp"
#include "kfp/landau.hpp"
#include "kfp/snapshot_io.hpp"

namespace kfp {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

inline constexpr const char* kOutEnv = "KFP_OUT_DIR";

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* app, Common& c, bool need_config) {
  auto* opt = app->add_option("--config", c.config, "JSON experiment configuration");
  if (need_config) opt->required()->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory (overrides $KFP_OUT_DIR and the config)");
  app->add_option("--seed", c.seed, "seed override");
  app->add_option("--threads", c.threads, "OpenMP thread count (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
}

fs::path out_dir(const Common& c, const std::string& config_dir) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return config_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void log(const std::string& msg) { std::fprintf(stderr, "kfp-lab: %s\n", msg.c_str()); }

int finish_report(const RunReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "report.json", report.dump());
  for (const auto& inv : report.invariants) {
    if (!inv.passed) log(std::string(inv.hard ? "hard" : "soft") + " invariant '" + inv.name + "' failed: " + inv.detail);
  }
  return report.hard_invariants_pass() ? kExitOk : kExitInvariantViolation;
}

int cmd_run(const Common& c, bool with_probes) {
  const ExperimentConfig cfg = load_config(c.config, c.seed);
  const fs::path dir = out_dir(c, cfg.output.dir);
  const SolverConfig scfg = solver_config(cfg);
  Trajectory traj;
  try {
    traj = solve(scfg, build_initial(cfg));
  } catch (const SolverError& e) {
    log(std::string("solver failure: ") + e.what());
    return kExitSolverFailure;
  }
  fs::create_directories(dir);
  if (cfg.output.snapshots) write_trajectory(dir / "snapshots", traj, cfg.seed);
  {
    std::ofstream os(dir / "ledger.csv");
    traj.ledger.write_csv(os);
  }
  if (!with_probes) return kExitOk;
  return finish_report(evaluate(cfg, traj), dir);
}

int cmd_probe(const Common& c, const std::string& snapshots) {
  const ExperimentConfig cfg = load_config(c.config, c.seed);
  std::uint64_t stored_seed = 0;
  Trajectory traj = read_trajectory(snapshots, &stored_seed);
  if (stored_seed != cfg.seed) {
    throw ConfigError("snapshots were written with seed " + std::to_string(stored_seed) + ", config uses " +
                      std::to_string(cfg.seed));
  }
  attach_run_context(cfg, traj);
  return finish_report(evaluate(cfg, traj), out_dir(c, cfg.output.dir));
}

struct LandauOptions {
  std::string profile;
  std::string make_maxwellian;
  int d = 3;
  int n = 24;
  double V = 6.0;
  double gamma = -3.0;
  bool fields = false;
};

int cmd_landau(const Common& c, const LandauOptions& o) {
  const fs::path dir = out_dir(c, "kfp_out");
  if (!o.make_maxwellian.empty()) {
    const VelocityGrid g{o.d, o.n, o.V};
    const VelocityGridFunction f = maxwellian(g);
    ojson j;
    j["schema_version"] = kSnapshotSchemaVersion;
    j["d"] = g.d;
    j["n"] = g.n;
    j["V"] = g.V;
    j["values"] = f.values;
    fs::path p(o.make_maxwellian);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p, j.dump() + "\n");
    if (o.profile.empty()) return kExitOk;
  }
  if (o.profile.empty()) throw ConfigError("landau: need --profile or --make-maxwellian");
  std::ifstream is(o.profile);
  if (!is) throw SnapshotError("missing velocity profile: " + o.profile);
  ojson j;
  try {
    j = ojson::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError("malformed velocity profile: " + std::string(e.what()));
  }
  if (j.value("schema_version", -1) != kSnapshotSchemaVersion) throw SnapshotError("velocity profile schema version mismatch");
  VelocityGridFunction f;
  f.grid = VelocityGrid{j.at("d").get<int>(), j.at("n").get<int>(), j.at("V").get<double>()};
  f.values = j.at("values").get<std::vector<double>>();
  if (f.values.size() != f.grid.size()) throw SnapshotError("velocity profile size does not match its grid");

  LandauParams p;
  p.d = f.grid.d;
  p.gamma = o.gamma;
  const BoundsReport b = check_coefficient_bounds(f, p, MomentBounds{});
  ojson r;
  r["schema_version"] = kReportSchemaVersion;
  r["params"] = {{"d", p.d}, {"gamma", p.gamma}, {"n", f.grid.n}, {"V", f.grid.V}};
  r["moments"] = {{"mass", format_constant(b.moments.mass)},
                  {"energy", format_constant(b.moments.energy)},
                  {"entropy", format_constant(b.moments.entropy)}};
  r["kappa"] = format_constant(b.kappa);
  r["min_det_ratio"] = format_constant(b.min_det_ratio);
  r["max_A_ratio"] = format_constant(b.max_A_ratio);
  r["max_B_ratio"] = format_constant(b.max_B_ratio);
  r["max_c_ratio"] = format_constant(b.max_c_ratio);
  r["f_sup"] = format_constant(b.f_sup);
  r["lower_bound_ok"] = b.lower_bound_ok;
  r["warnings"] = b.warnings;
  fs::create_directories(dir);
  write_text(dir / "landau_report.json", r.dump(2) + "\n");
  std::cout << r.dump(2) << "\n";
  if (o.fields) {
    const LandauFields F = landau_fields_fft(f, p);
    std::ofstream os(dir / "landau_fields.csv");
    os << "node";
    for (int a = 0; a < p.d; ++a) os << ",v" << a;
    for (int a = 0; a < p.d; ++a)
      for (int k = 0; k < p.d; ++k) os << ",A" << a << k;
    for (int a = 0; a < p.d; ++a) os << ",B" << a;
    os << ",c\n";
    std::vector<int> idx(p.d);
    for (std::size_t k = 0; k < F.size(); ++k) {
      f.grid.unflatten(k, idx);
      os << k;
      for (int a = 0; a < p.d; ++a) os << ',' << format_constant(f.grid.node(idx[a]));
      for (int a = 0; a < p.d * p.d; ++a) os << ',' << format_constant(F.A[k * p.d * p.d + a]);
      for (int a = 0; a < p.d; ++a) os << ',' << format_constant(F.B[k * p.d + a]);
      os << ',' << format_constant(F.c[k]) << '\n';
    }
  }
  return b.lower_bound_ok ? kExitOk : kExitInvariantViolation;
}

struct GeometryOptions {
  std::size_t samples = 10000;
  int d = 1;
  std::uint64_t seed = 1;
};

ojson covering_json(const CoveringReport& r) {
  auto claim = [](const CoveringClaim& c) {
    ojson j;
    j["verdict"] = c.verdict;
    j["checked"] = c.checked;
    j["counterexamples"] = c.counterexamples.size();
    return j;
  };
  ojson j;
  j["delta"] = r.params.delta;
  j["R"] = r.params.R;
  j["r0"] = r.params.r0;
  j["omega"] = r.params.omega;
  j["hypothesis_rhs"] = format_constant(r.hypothesis_rhs);
  j["claim_a"] = claim(r.claim_a);
  j["claim_b"] = claim(r.claim_b);
  return j;
}

int cmd_geometry(const Common& c, const GeometryOptions& o) {
  const std::uint64_t seed = c.seed.value_or(o.seed);
  const GroupLawReport g = group_law_self_test(o.samples, o.d, seed);
  ojson r;
  r["schema_version"] = kReportSchemaVersion;
  r["group_law"] = {{"checks", g.checks}, {"failures", g.failures}, {"max_error", format_constant(g.max_error)},
                    {"worst", g.worst}};
  CoveringParams ok;
  ok.n_samples = o.samples;
  ok.dim = o.d;
  ok.seed = seed;
  CoveringParams unmet = ok;
  unmet.R = 0.01;
  const CoveringReport a = verify_covering(ok);
  const CoveringReport b = verify_covering(unmet);
  r["covering"] = covering_json(a);
  r["covering_unmet"] = covering_json(b);
  const fs::path dir = out_dir(c, "kfp_out");
  fs::create_directories(dir);
  write_text(dir / "geometry_report.json", r.dump(2) + "\n");
  std::cout << r.dump(2) << "\n";
  const bool pass = g.failures == 0 && a.claim_a.verdict == "pass" && a.claim_b.verdict == "pass";
  return pass ? kExitOk : kExitInvariantViolation;
}

struct IterateOptions {
  std::string sweep = "exponent_sum";
  double alpha_lo = 1.05, alpha_hi = 3.0;
  int alpha_n = 20;
  int n_max = 30;
  double beta = 2.0, V0 = 1e-3;
  double p = 4.0, Cbar = 2.0, a = 1.0;
};

std::string fmt(double x) { return format_constant(x); }

int cmd_iterate(const Common& c, const IterateOptions& o) {
  std::string csv;
  auto row = [&](std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& s : cells) {
      if (!first) csv += ',';
      csv += s;
      first = false;
    }
    csv += '\n';
  };
  if (o.alpha_n < 1 || o.n_max < 1) throw ConfigError("iterate: sweep sizes must be positive");
  auto alpha_at = [&](int i) {
    return o.alpha_n == 1 ? o.alpha_lo : o.alpha_lo + (o.alpha_hi - o.alpha_lo) * i / (o.alpha_n - 1);
  };
  if (o.sweep == "exponent_sum") {
    row({"alpha", "n", "closed_form", "direct", "abs_diff"});
    for (int i = 0; i < o.alpha_n; ++i) {
      const double al = alpha_at(i);
      for (int n = 1; n <= o.n_max; ++n) {
        const double cf = exponent_sum(al, n).value, dr = exponent_sum_direct(al, n);
        row({fmt(al), std::to_string(n), fmt(cf), fmt(dr), fmt(std::abs(cf - dr))});
      }
    }
  } else if (o.sweep == "degiorgi") {
    row({"alpha", "n", "log_bound", "log_direct", "gamma_threshold", "verdict"});
    for (int i = 0; i < o.alpha_n; ++i) {
      const double al = alpha_at(i);
      const DeGiorgiReport r = degiorgi_threshold(o.beta, al, o.V0, o.n_max);
      for (std::size_t n = 0; n < r.log_bound.size(); ++n) {
        row({fmt(al), std::to_string(n), fmt(r.log_bound[n]), fmt(r.log_direct[n]), fmt(r.gamma_threshold), r.verdict});
      }
    }
  } else if (o.sweep == "moser") {
    row({"n", "partial_product"});
    const MoserReport r = moser_product(o.p, o.Cbar, o.a, o.n_max);
    for (std::size_t n = 0; n < r.partial.size(); ++n) row({std::to_string(n + 1), fmt(r.partial[n])});
  } else if (o.sweep == "exponents") {
    row({"d", "gamma", "sobolev_p", "kappa"});
    for (int d = 1; d <= 3; ++d) {
      for (int i = 0; i <= 12; ++i) {
        const double g = -static_cast<double>(d) + d * i / 12.0;
        row({std::to_string(d), fmt(g), fmt(sobolev_p(d)), fmt(kappa_exponent(g, d))});
      }
    }
  } else {
    throw ConfigError("iterate: unknown sweep '" + o.sweep + "'");
  }
  const fs::path dir = out_dir(c, "kfp_out");
  fs::create_directories(dir);
  write_text(dir / ("iterate_" + o.sweep + ".csv"), csv);
  std::cout << csv;
  return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"kfp-lab: kinetic Fokker-Planck regularity experiments"};
  app.require_subcommand(1);
  Common run_c, solve_c, probe_c, landau_c, geo_c, iter_c;
  std::string snapshots;
  LandauOptions lo;
  GeometryOptions go;
  IterateOptions io;

  auto* run = app.add_subcommand("run", "solve, probe and report");
  add_common(run, run_c, true);
  auto* solve_cmd = app.add_subcommand("solve", "solve only; write snapshots and the ledger");
  add_common(solve_cmd, solve_c, true);
  auto* probe = app.add_subcommand("probe", "re-run the configured probes on stored snapshots");
  add_common(probe, probe_c, true);
  probe->add_option("--snapshots", snapshots, "snapshot directory of a prior run")->required();
  auto* landau = app.add_subcommand("landau", "Landau coefficients and their bounds for a velocity profile");
  add_common(landau, landau_c, false);
  landau->add_option("--profile", lo.profile, "stored velocity profile (JSON)");
  landau->add_option("--make-maxwellian", lo.make_maxwellian, "write a unit Maxwellian profile to this path");
  landau->add_option("--d", lo.d, "velocity dimension")->check(CLI::Range(1, 3));
  landau->add_option("--n", lo.n, "nodes per axis")->check(CLI::Range(2, 512));
  landau->add_option("--V", lo.V, "velocity half-width")->check(CLI::PositiveNumber);
  landau->add_option("--gamma", lo.gamma, "interaction exponent");
  landau->add_flag("--fields", lo.fields, "also write A, B, c per node as CSV");
  auto* geometry = app.add_subcommand("geometry", "group-law self-tests and the covering check");
  add_common(geometry, geo_c, false);
  geometry->add_option("--samples", go.samples, "samples per check");
  geometry->add_option("--d", go.d, "dimension")->check(CLI::Range(1, 3));
  auto* iterate = app.add_subcommand("iterate", "iteration-calculus sweeps as CSV");
  add_common(iterate, iter_c, false);
  iterate->add_option("--sweep", io.sweep, "exponent_sum | degiorgi | moser | exponents");
  iterate->add_option("--alpha-lo", io.alpha_lo);
  iterate->add_option("--alpha-hi", io.alpha_hi);
  iterate->add_option("--alpha-n", io.alpha_n);
  iterate->add_option("--n-max", io.n_max);
  iterate->add_option("--beta", io.beta);
  iterate->add_option("--V0", io.V0);
  iterate->add_option("--p", io.p);
  iterate->add_option("--Cbar", io.Cbar);
  iterate->add_option("--a", io.a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }

  const Common* active = nullptr;
  for (auto [cmd, c] : {std::pair{run, &run_c}, {solve_cmd, &solve_c}, {probe, &probe_c}, {landau, &landau_c},
                        {geometry, &geo_c}, {iterate, &iter_c}}) {
    if (cmd->parsed()) active = c;
  }
  if (active && active->threads > 0) omp_set_num_threads(active->threads);

  try {
    if (run->parsed()) return cmd_run(run_c, true);
    if (solve_cmd->parsed()) return cmd_run(solve_c, false);
    if (probe->parsed()) return cmd_probe(probe_c, snapshots);
    if (landau->parsed()) return cmd_landau(landau_c, lo);
    if (geometry->parsed()) return cmd_geometry(geo_c, go);
    if (iterate->parsed()) return cmd_iterate(iter_c, io);
  } catch (const ConfigError& e) {
    log(std::string("invalid configuration: ") + e.what());
    return kExitInvalidConfig;
  } catch (const SnapshotError& e) {
    log(std::string("snapshot error: ") + e.what());
    return kExitInvalidConfig;
  } catch (const SolverError& e) {
    log(std::string("solver failure: ") + e.what());
    return kExitSolverFailure;
  } catch (const std::invalid_argument& e) {
    log(std::string("invalid input: ") + e.what());
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitSolverFailure;
  }
  return kExitInvalidConfig;
}

}  // namespace kfp
