#include "kfp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "kfp/kolmogorov.hpp"
#include "kfp/region_reduce.hpp"
#include "kfp/sampling.hpp"

namespace kfp {
namespace {

using ojson = nlohmann::ordered_json;

/// Reads keys of one JSON object, fills defaults into a normalized copy and
/// rejects keys that were never read.
class Section {
 public:
  Section(const ojson& in, std::string path) : in_(in), path_(std::move(path)) {
    if (!in_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return in_.contains(key); }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    used_.insert(key);
    T value = fallback;
    if (in_.contains(key)) value = convert<T>(in_.at(key), key);
    out_[key] = value;
    return value;
  }

  template <class T>
  T require(const std::string& key) {
    used_.insert(key);
    if (!in_.contains(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
    T value = convert<T>(in_.at(key), key);
    out_[key] = value;
    return value;
  }

  /// Raw sub-document; the caller stores its normalized form with put().
  const ojson& raw(const std::string& key) {
    used_.insert(key);
    if (!in_.contains(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
    return in_.at(key);
  }
  const ojson* raw_optional(const std::string& key) {
    used_.insert(key);
    return in_.contains(key) ? &in_.at(key) : nullptr;
  }
  void put(const std::string& key, ojson value) { out_[key] = std::move(value); }

  ojson finish() const {
    for (const auto& [k, v] : in_.items()) {
      if (!used_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
    }
    return out_.is_null() ? ojson::object() : out_;
  }

  const std::string& path() const { return path_; }

 private:
  template <class T>
  T convert(const ojson& j, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!j.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(path_ + "." + key + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (j.is_number_integer() && j.get<long long>() < 0) throw ConfigError(path_ + "." + key + ": expected a non-negative integer");
        }
      }
      return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  const ojson& in_;
  std::string path_;
  ojson out_ = ojson::object();
  std::set<std::string> used_;
};

std::vector<double> coords(const ojson& j, int d, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw ConfigError(what + ": expected an array of " + std::to_string(d) + " numbers");
  }
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(what + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void parse_grid(Section s, SolverConfig& solver, ojson& norm) {
  PhaseGrid& g = solver.grid;
  g.d = s.get<int>("d", 1);
  g.nx = s.get<int>("nx", 64);
  g.nv = s.get<int>("nv", 64);
  g.X = s.get<double>("x_extent", 2.0);
  g.V = s.get<double>("v_extent", 2.0);
  norm["grid"] = s.finish();
}

void parse_solver(Section s, SolverConfig& solver, ojson& norm) {
  solver.dt = s.get<double>("dt", 1.0 / 64.0);
  solver.t_end = s.get<double>("t_end", 1.0);
  try {
    solver.boundary = boundary_from_string(s.get<std::string>("boundary", to_string(Boundary::PeriodicX_NoFluxV)));
    solver.scheme = scheme_from_string(s.get<std::string>("scheme", to_string(Scheme::SplitSemiLagrangian)));
    solver.interpolation =
        interpolation_from_string(s.get<std::string>("interpolation", to_string(Interpolation::Linear)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  norm["solver"] = s.finish();
}

void parse_field(Section s, ExperimentConfig& cfg, ojson& norm) {
  cfg.has_field = true;
  FieldRecipe& r = cfg.recipe;
  try {
    r.kind = recipe_from_string(s.get<std::string>("recipe", to_string(Recipe::Constant)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
  cfg.bounds.lambda = s.get<double>("lambda", 1.0);
  cfg.bounds.Lambda = s.get<double>("Lambda", 1.0);
  r.cell_scale = s.get<double>("cell_scale", r.cell_scale);
  const auto corr = s.get<std::vector<double>>("correlation", {r.correlation.begin(), r.correlation.end()});
  if (corr.size() != 3) throw ConfigError("field.correlation: expected three lengths (x, v, t)");
  std::copy(corr.begin(), corr.end(), r.correlation.begin());
  r.modes = s.get<int>("modes", r.modes);
  const std::string drift = s.get<std::string>("drift", "zero");
  if (drift == "zero") r.drift = DriftMode::Zero;
  else if (drift == "random") r.drift = DriftMode::Random;
  else throw ConfigError("field.drift: expected 'zero' or 'random'");
  r.s_max = s.get<double>("s_max", 0.0);
  r.s_const = s.get<double>("s_const", 0.0);
  r.b_const = s.get<std::vector<double>>("b_const", {});
  r.a_scale = s.get<double>("a_scale", 1.0);
  norm["field"] = s.finish();
}

void parse_initial(Section s, ExperimentConfig& cfg, ojson& norm) {
  InitialConfig& ic = cfg.initial;
  ic.kind = s.get<std::string>("kind", "zero");
  const int d = cfg.solver.grid.d;
  ojson& p = ic.params;
  p["time"] = s.get<double>("time", 0.0);
  if (ic.kind == "zero") {
  } else if (ic.kind == "constant") {
    p["value"] = s.get<double>("value", 1.0);
  } else if (ic.kind == "gaussian" || ic.kind == "bump") {
    p["amplitude"] = s.get<double>("amplitude", 1.0);
    p["x0"] = s.get<std::vector<double>>("x0", std::vector<double>(d, 0.0));
    p["v0"] = s.get<std::vector<double>>("v0", std::vector<double>(d, 0.0));
    if (ic.kind == "gaussian") {
      p["sigma_x"] = s.get<double>("sigma_x", 0.5);
      p["sigma_v"] = s.get<double>("sigma_v", 0.5);
    } else {
      p["radius_x"] = s.get<double>("radius_x", 1.0);
      p["radius_v"] = s.get<double>("radius_v", 1.0);
    }
    p["floor"] = s.get<double>("floor", 0.0);
    if (p["x0"].size() != static_cast<std::size_t>(d) || p["v0"].size() != static_cast<std::size_t>(d)) {
      throw ConfigError("initial: x0 and v0 need one entry per dimension");
    }
  } else if (ic.kind == "kolmogorov") {
    if (!(p["time"].get<double>() > 0.0)) throw ConfigError("initial: kolmogorov data need time > 0");
  } else if (ic.kind == "random") {
    p["lo"] = s.get<double>("lo", 0.0);
    p["hi"] = s.get<double>("hi", 1.0);
  } else {
    throw ConfigError("initial.kind: unknown kind '" + ic.kind + "'");
  }
  norm["initial"] = s.finish();
}

ojson normalize_point(const ojson& j, int d) { return point_to_json(point_from_json(j, d)); }

/// Reads one probe entry; region-valued keys are normalized through the
/// geometry readers so equivalent spellings share a digest.
ProbeSpec parse_probe(const ojson& j, int d, std::size_t index) {
  const std::string path = "probes[" + std::to_string(index) + "]";
  Section s(j, path);
  ProbeSpec spec;
  spec.type = s.require<std::string>("type");
  spec.name = s.get<std::string>("name", spec.type);
  ojson& p = spec.params;
  auto cyl = [&](const std::string& key) {
    const ojson n = cylinder_to_json(cylinder_from_json(s.raw(key), d));
    s.put(key, n);
    p[key] = n;
  };
  auto region = [&](const std::string& key) {
    const ojson n = region_to_json(region_from_json(s.raw(key), d));
    s.put(key, n);
    p[key] = n;
  };
  auto point = [&](const std::string& key) {
    const ojson n = normalize_point(s.raw(key), d);
    s.put(key, n);
    p[key] = n;
  };
  auto num = [&](const std::string& key, double def) { p[key] = s.get<double>(key, def); };
  auto harnack = [&]() {
    const HarnackParams def;
    num("R", def.R);
    num("Delta", def.Delta);
    num("rho1", def.rho1);
    num("rho2", def.rho2);
    num("q", def.q);
    num("omega", def.omega);
    point("z_top");
  };

  try {
    if (spec.type == "norm") {
      region("region");
      num("p", 2.0);
    } else if (spec.type == "gain" || spec.type == "energy") {
      cyl("q_int");
      cyl("q_ext");
    } else if (spec.type == "level_sets") {
      region("region");
      num("theta", 0.5);
    } else if (spec.type == "oscillation") {
      region("region");
    } else if (spec.type == "holder") {
      point("z1");
      num("theta", 0.5);
      num("omega", kDefaultOmega);
      p["K"] = s.get<int>("K", 4);
      num("r_tilde", 1.0);
    } else if (spec.type == "harnack") {
      harnack();
    } else if (spec.type == "doubling") {
      num("omega", kDefaultOmega);
      p["N"] = s.get<int>("N", 2);
      point("z_base");
      num("r", 1.0);
    } else if (spec.type == "caccio_bis") {
      point("z0");
      num("R", 0.25);
    } else if (spec.type == "fractional") {
      num("s", 1.0 / 6.0);
      cyl("q_int");
      cyl("q_ext");
      p["n_pairs"] = s.get<std::uint64_t>("n_pairs", 20000);
      p["seed"] = s.get<std::uint64_t>("seed", hash_combine(0x5eedULL, index));
    } else if (spec.type == "gehring") {
      const GehringParams def;
      num("q", def.q);
      num("theta", def.theta);
      cyl("q0");
      p["radii"] = s.get<std::vector<double>>("radii", {});
      p["center_stride"] = s.get<std::uint64_t>("center_stride", 1);
      cyl("q1");
      cyl("q2");
      num("eps_cap", def.eps_cap);
    } else if (spec.type == "propagation") {
      harnack();
      point("z");
      p["radii"] = s.get<std::vector<double>>("radii", {});
    } else {
      throw ConfigError(path + ": unknown probe type '" + spec.type + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  s.finish();
  return spec;
}

/// Regions referenced by a probe specification.
std::vector<Region> probe_regions(const ProbeSpec& spec, int d) {
  std::vector<Region> out;
  const ojson& p = spec.params;
  for (const char* key : {"region", "q_int", "q_ext", "q0", "q1", "q2"}) {
    if (p.contains(key)) out.push_back(region_from_json(p.at(key), d));
  }
  if (spec.type == "harnack" || spec.type == "propagation") {
    HarnackParams h;
    h.R = p.at("R").get<double>();
    h.Delta = p.at("Delta").get<double>();
    h.rho1 = p.at("rho1").get<double>();
    h.rho2 = p.at("rho2").get<double>();
    h.q = p.at("q").get<double>();
    h.omega = p.at("omega").get<double>();
    h.validate();
    const KineticPoint z_top = point_from_json(p.at("z_top"), d);
    out.push_back(h.q_one(z_top));
  }
  if (spec.type == "holder") {
    const double r = p.at("r_tilde").get<double>() / 2.0;
    out.push_back(Cylinder::slanted(point_from_json(p.at("z1"), d), r));
  }
  if (spec.type == "doubling") {
    const KineticPoint z = point_from_json(p.at("z_base"), d);
    for (int k = 0; k <= p.at("N").get<int>(); ++k) {
      out.push_back(Cylinder::iterated(k, p.at("omega").get<double>(), z, p.at("r").get<double>()));
    }
  }
  if (spec.type == "caccio_bis") {
    out.push_back(Cylinder::cube(point_from_json(p.at("z0"), d), 3.0 * p.at("R").get<double>()));
  }
  return out;
}

/// Skeleton trajectory carrying only the grid and the stored times.
Trajectory time_skeleton(const ExperimentConfig& cfg, double t0) {
  Trajectory traj;
  const int steps = cfg.solver.steps_from(t0);
  for (int k = 0; k <= steps; ++k) {
    if (k % cfg.solver.snapshot_every != 0) continue;
    PhaseGridFunction f;
    f.grid = cfg.solver.grid;
    f.time = t0 + k * cfg.solver.dt;
    traj.snapshots.push_back(std::move(f));
  }
  traj.frame = GalileanTransform{KineticPoint::origin(cfg.solver.grid.d)};
  return traj;
}

double smooth_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace

KineticPoint point_from_json(const nlohmann::ordered_json& j, int d) {
  if (!j.is_object()) throw ConfigError("point: expected an object with x, v, t");
  for (const auto& [k, v] : j.items()) {
    if (k != "x" && k != "v" && k != "t") throw ConfigError("point: unknown key '" + k + "'");
  }
  if (!j.contains("x") || !j.contains("v") || !j.contains("t") || !j.at("t").is_number()) {
    throw ConfigError("point: needs x, v and t");
  }
  const auto x = coords(j.at("x"), d, "point.x");
  const auto v = coords(j.at("v"), d, "point.v");
  return KineticPoint(std::span<const double>(x), std::span<const double>(v), j.at("t").get<double>());
}

Cylinder cylinder_from_json(const nlohmann::ordered_json& j, int d) {
  if (!j.is_object()) throw ConfigError("cylinder: expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "shape" && k != "center" && k != "radius" && k != "omega" && k != "index") {
      throw ConfigError("cylinder: unknown key '" + k + "'");
    }
  }
  if (!j.contains("center") || !j.contains("radius") || !j.at("radius").is_number()) {
    throw ConfigError("cylinder: needs center and radius");
  }
  CylinderShape shape = CylinderShape::Slanted;
  try {
    if (j.contains("shape")) shape = cylinder_shape_from_string(j.at("shape").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cylinder: ") + e.what());
  }
  const KineticPoint c = point_from_json(j.at("center"), d);
  const double r = j.at("radius").get<double>();
  const double omega = j.contains("omega") ? j.at("omega").get<double>() : kDefaultOmega;
  try {
    switch (shape) {
      case CylinderShape::Slanted: return Cylinder::slanted(c, r);
      case CylinderShape::Cube: return Cylinder::cube(c, r);
      case CylinderShape::Elongated: return Cylinder::elongated(c, r, omega);
      case CylinderShape::Iterated:
        return Cylinder::iterated(j.contains("index") ? j.at("index").get<int>() : 0, omega, c, r);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("cylinder: ") + e.what());
  }
  throw ConfigError("cylinder: unknown shape");
}

Region region_from_json(const nlohmann::ordered_json& j, int d) {
  if (j.is_object() && j.contains("shape") && j.at("shape") == "ball_product") {
    for (const auto& [k, v] : j.items()) {
      if (k != "shape" && k != "center" && k != "x_radius" && k != "v_radius" && k != "t_length") {
        throw ConfigError("ball_product: unknown key '" + k + "'");
      }
    }
    BallProduct b;
    b.center = point_from_json(j.at("center"), d);
    b.x_radius = j.value("x_radius", 1.0);
    b.v_radius = j.value("v_radius", 1.0);
    b.t_length = j.value("t_length", 2.0);
    if (!(b.x_radius > 0 && b.v_radius > 0 && b.t_length > 0)) throw ConfigError("ball_product: radii must be positive");
    return b;
  }
  return cylinder_from_json(j, d);
}

ExperimentConfig parse_config(const nlohmann::ordered_json& doc, std::optional<std::uint64_t> seed_override) {
  Section top(doc, "config");
  ExperimentConfig cfg;
  ojson& norm = cfg.normalized;
  norm = ojson::object();
  if (!doc.contains("schema_version")) throw ConfigError("config: missing schema_version");
  const int version = top.require<int>("schema_version");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("config: schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  }
  norm["schema_version"] = version;
  cfg.seed = top.get<std::uint64_t>("seed", 1);
  if (seed_override) cfg.seed = *seed_override;
  norm["seed"] = cfg.seed;

  const ojson empty = ojson::object();
  auto sub = [&](const char* key) -> const ojson& {
    const ojson* p = top.raw_optional(key);
    return p ? *p : empty;
  };
  {
    Section s(sub("output"), "output");
    cfg.output.dir = s.get<std::string>("dir", cfg.output.dir);
    cfg.output.snapshots = s.get<bool>("snapshots", true);
    cfg.solver.snapshot_every = s.get<int>("snapshot_every", 1);
    norm["output"] = s.finish();
  }
  parse_grid(Section(sub("grid"), "grid"), cfg.solver, norm);
  parse_solver(Section(sub("solver"), "solver"), cfg.solver, norm);
  if (doc.contains("field")) parse_field(Section(sub("field"), "field"), cfg, norm);
  parse_initial(Section(sub("initial"), "initial"), cfg, norm);

  const int d = cfg.solver.grid.d;
  try {
    cfg.solver.grid.validate();
    cfg.solver.validate();
    if (cfg.has_field) {
      cfg.recipe.validate();
      cfg.bounds.validate();
      if (!cfg.recipe.b_const.empty() && static_cast<int>(cfg.recipe.b_const.size()) != d) {
        throw ConfigError("field.b_const: expected one entry per dimension");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  norm["probes"] = ojson::array();
  if (const ojson* probes = top.raw_optional("probes")) {
    if (!probes->is_array()) throw ConfigError("probes: expected an array");
    for (std::size_t i = 0; i < probes->size(); ++i) {
      cfg.probes.push_back(parse_probe(probes->at(i), d, i));
      ojson entry;
      entry["type"] = cfg.probes.back().type;
      entry["name"] = cfg.probes.back().name;
      for (const auto& [k, v] : cfg.probes.back().params.items()) entry[k] = v;
      norm["probes"].push_back(entry);
    }
  }
  {
    Section s(sub("invariants"), "invariants");
    cfg.invariants.mass_tol = s.get<double>("mass_tol", cfg.invariants.mass_tol);
    cfg.invariants.positivity_tol = s.get<double>("positivity_tol", cfg.invariants.positivity_tol);
    cfg.invariants.certify_samples = s.get<std::size_t>("certify_samples", cfg.invariants.certify_samples);
    norm["invariants"] = s.finish();
  }
  top.finish();

  // Every referenced region must sit inside the grid box and the time range.
  const Trajectory skeleton = time_skeleton(cfg, cfg.initial.params.at("time").get<double>());
  for (const ProbeSpec& spec : cfg.probes) {
    std::vector<Region> regions;
    try {
      regions = probe_regions(spec, d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("probe '" + spec.name + "': " + e.what());
    }
    for (const Region& r : regions) {
      if (!region_in_run(skeleton, r)) {
        throw ConfigError("probe '" + spec.name + "': region " + region_to_json(r).dump() +
                          " lies outside the computational domain or time range");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path.string());
  ojson doc;
  try {
    doc = ojson::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc, seed_override);
}

std::string config_digest(const ExperimentConfig& cfg) {
  ojson n = cfg.normalized;
  n.erase("output");
  return fnv1a_hex(n.dump());
}

std::shared_ptr<const CoefficientField> build_field(const ExperimentConfig& cfg) {
  if (!cfg.has_field) return nullptr;
  return std::make_shared<const CoefficientField>(cfg.solver.grid.d, cfg.recipe, cfg.bounds, cfg.seed);
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig s = cfg.solver;
  s.field = build_field(cfg);
  return s;
}

PhaseGridFunction build_initial(const ExperimentConfig& cfg) {
  const PhaseGrid& g = cfg.solver.grid;
  const ojson& p = cfg.initial.params;
  const double t0 = p.at("time").get<double>();
  const std::string& kind = cfg.initial.kind;
  const int d = g.d;
  if (kind == "zero") return PhaseGridFunction(g, t0);
  if (kind == "constant") {
    const double c = p.at("value").get<double>();
    return PhaseGridFunction::from_function(g, t0, [c](const KineticPoint&) { return c; });
  }
  if (kind == "gaussian" || kind == "bump") {
    const double amp = p.at("amplitude").get<double>();
    const double floor = p.at("floor").get<double>();
    const auto x0 = p.at("x0").get<std::vector<double>>();
    const auto v0 = p.at("v0").get<std::vector<double>>();
    const bool gauss = kind == "gaussian";
    const double sx = gauss ? p.at("sigma_x").get<double>() : p.at("radius_x").get<double>();
    const double sv = gauss ? p.at("sigma_v").get<double>() : p.at("radius_v").get<double>();
    return PhaseGridFunction::from_function(g, t0, [&](const KineticPoint& z) {
      double val = amp;
      for (int i = 0; i < d; ++i) {
        const double a = (z.x(i) - x0[i]) / sx;
        const double b = (z.v(i) - v0[i]) / sv;
        val *= gauss ? std::exp(-0.5 * (a * a + b * b)) : smooth_bump(a) * smooth_bump(b);
      }
      return floor + val;
    });
  }
  if (kind == "kolmogorov") {
    return PhaseGridFunction::from_function(g, t0, [&](const KineticPoint& z) {
      return kolmogorov_oracle(z.x(), z.v(), z.t());
    });
  }
  if (kind == "random") {
    const double lo = p.at("lo").get<double>();
    const double hi = p.at("hi").get<double>();
    PhaseGridFunction f(g, t0);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      CounterRng rng(hash_combine(hash_combine(cfg.seed, 0x1417ULL), k));
      f.values[k] = rng.uniform(lo, hi);
    }
    return f;
  }
  throw ConfigError("initial.kind: unknown kind '" + kind + "'");
}

void attach_run_context(const ExperimentConfig& cfg, Trajectory& traj) {
  if (!(traj.grid() == cfg.solver.grid)) throw ConfigError("stored snapshots do not match the configured grid");
  traj.field = build_field(cfg);
  traj.periodic_v = cfg.solver.periodic_v();
}

std::vector<ProbeReport> run_probes(const ExperimentConfig& cfg, const Trajectory& traj) {
  const int d = traj.dim();
  std::vector<ProbeReport> out;
  for (const ProbeSpec& spec : cfg.probes) {
    const ojson& p = spec.params;
    auto num = [&](const char* k) { return p.at(k).get<double>(); };
    auto cyl = [&](const char* k) { return cylinder_from_json(p.at(k), d); };
    auto pt = [&](const char* k) { return point_from_json(p.at(k), d); };
    auto harnack = [&]() {
      HarnackParams h;
      h.R = num("R");
      h.Delta = num("Delta");
      h.rho1 = num("rho1");
      h.rho2 = num("rho2");
      h.q = num("q");
      h.omega = num("omega");
      return h;
    };
    ProbeReport rep;
    try {
      if (spec.type == "norm") {
        const Region r = region_from_json(p.at("region"), d);
        rep.name = "norm";
        rep.params["region"] = region_to_json(r);
        rep.params["p"] = num("p");
        rep.set("norm", norm_on_cylinder(traj, r, num("p")));
        rep.verdict = "measured";
      } else if (spec.type == "gain") {
        rep = gain_probe(traj, cyl("q_int"), cyl("q_ext"));
      } else if (spec.type == "energy") {
        rep = energy_probe(traj, cyl("q_int"), cyl("q_ext"));
      } else if (spec.type == "level_sets") {
        const Region r = region_from_json(p.at("region"), d);
        const LevelSetMeasures m = level_set_measures(traj, num("theta"), r);
        rep.name = "level_sets";
        rep.params["region"] = region_to_json(r);
        rep.params["theta"] = num("theta");
        rep.set("high", m.high);
        rep.set("low", m.low);
        rep.set("mid", m.mid);
        rep.set("total", m.total);
        rep.verdict = "measured";
      } else if (spec.type == "oscillation") {
        const Region r = region_from_json(p.at("region"), d);
        rep.name = "oscillation";
        rep.params["region"] = region_to_json(r);
        rep.set("osc", oscillation(traj, r));
        rep.verdict = "measured";
      } else if (spec.type == "holder") {
        rep = holder_probe(traj, pt("z1"), num("theta"), num("omega"), p.at("K").get<int>(), num("r_tilde"));
      } else if (spec.type == "harnack") {
        rep = harnack_probe(traj, harnack(), pt("z_top"));
      } else if (spec.type == "doubling") {
        rep = doubling_report(traj, num("omega"), p.at("N").get<int>(), pt("z_base"), num("r"));
      } else if (spec.type == "caccio_bis") {
        rep = caccio_bis_probe(traj, pt("z0"), num("R"));
      } else if (spec.type == "fractional") {
        rep = fractional_probe(traj, num("s"), cyl("q_int"), cyl("q_ext"), p.at("n_pairs").get<std::size_t>(),
                               p.at("seed").get<std::uint64_t>());
      } else if (spec.type == "gehring") {
        GehringParams g;
        g.q = num("q");
        g.theta = num("theta");
        g.q0 = cyl("q0");
        g.radii = p.at("radii").get<std::vector<double>>();
        g.center_stride = p.at("center_stride").get<std::size_t>();
        g.q1 = cyl("q1");
        g.q2 = cyl("q2");
        g.eps_cap = num("eps_cap");
        rep = gehring_probe(traj, g);
      } else if (spec.type == "propagation") {
        rep = propagation_probe(traj, harnack(), pt("z_top"), pt("z"), p.at("radii").get<std::vector<double>>());
      } else {
        throw ConfigError("unknown probe type '" + spec.type + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("probe '" + spec.name + "': " + e.what());
    }
    rep.name = spec.name;
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<InvariantResult> check_invariants(const ExperimentConfig& cfg, const Trajectory& traj) {
  std::vector<InvariantResult> out;
  const auto& recs = traj.ledger.records;
  const auto field = traj.field;
  const bool no_drift = !field || !field->has_drift();
  const bool no_source = !field || !field->has_source();

  if (!recs.empty() && no_drift && no_source) {
    InvariantResult r{"mass_conservation", true, true, 0.0, cfg.invariants.mass_tol, ""};
    const double m0 = recs.front().mass;
    for (const auto& rec : recs) r.value = std::max(r.value, std::abs(rec.mass - m0) / std::max(1.0, std::abs(m0)));
    r.passed = r.value <= r.tolerance;
    r.detail = "max relative mass drift over the ledger";
    out.push_back(r);
  }
  const double s_lower = field ? cfg.recipe.source_scale * (cfg.recipe.s_const - cfg.recipe.s_max) : 0.0;
  if (!recs.empty() && cfg.solver.monotone() && recs.front().min >= -cfg.invariants.positivity_tol &&
      (no_source || s_lower >= 0.0)) {
    InvariantResult r{"positivity", true, true, kInfinity, cfg.invariants.positivity_tol, ""};
    for (const auto& rec : recs) r.value = std::min(r.value, rec.min);
    r.passed = r.value >= -r.tolerance;
    r.detail = "minimum of f over the ledger";
    out.push_back(r);
  }
  if (field) {
    const PhaseGrid& g = traj.grid();
    SampleBox box;
    box.x_lo = -g.X;
    box.x_hi = g.X;
    box.v_lo = -g.V;
    box.v_hi = g.V;
    box.t_lo = traj.snapshots.front().time;
    box.t_hi = traj.snapshots.back().time;
    const CertReport cert = certify_field(*field, cfg.invariants.certify_samples, box, hash_combine(cfg.seed, 0xce47ULL));
    InvariantResult r{"certify_field", true, cert.ok, cert.min_eigenvalue, 0.0, cert.verdict};
    if (!cert.ok) r.detail += ": " + cert.reason;
    out.push_back(r);
  }
  if (recs.size() > 1 && no_drift && no_source) {
    InvariantResult r{"l2_non_increase", false, true, 0.0, 1e-12, "max relative step increase of int f^2"};
    for (std::size_t k = 1; k < recs.size(); ++k) {
      r.value = std::max(r.value, (recs[k].l2 - recs[k - 1].l2) / std::max(1e-300, recs[0].l2));
    }
    if (recs[0].l2 == 0.0) r.value = 0.0;
    r.passed = r.value <= r.tolerance;
    out.push_back(r);
  }
  return out;
}

RunReport evaluate(const ExperimentConfig& cfg, const Trajectory& traj) {
  RunReport rep;
  rep.config_digest = config_digest(cfg);
  rep.probes = run_probes(cfg, traj);
  rep.invariants = check_invariants(cfg, traj);
  return rep;
}

}  // namespace kfp
