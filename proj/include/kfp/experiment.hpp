#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kfp/field.hpp"
#include "kfp/probes.hpp"
#include "kfp/report.hpp"
#include "kfp/solver.hpp"

namespace kfp {

inline constexpr int kConfigSchemaVersion = 1;

/// Invalid or unknown configuration content (exit status 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A hard invariant failed (exit status 4).
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputConfig {
  std::string dir = "kfp_out";
  bool snapshots = true;
};

struct InitialConfig {
  /// zero | constant | gaussian | bump | kolmogorov | random
  std::string kind = "zero";
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

struct ProbeSpec {
  std::string type;
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

struct InvariantConfig {
  double mass_tol = 1e-12;
  double positivity_tol = 1e-12;
  std::size_t certify_samples = 4096;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  OutputConfig output;
  SolverConfig solver;  ///< field is attached by build_field
  bool has_field = false;
  FieldRecipe recipe;
  EllipticityBounds bounds;
  InitialConfig initial;
  std::vector<ProbeSpec> probes;
  InvariantConfig invariants;
  /// Every setting with defaults filled in, in a fixed key order.
  nlohmann::ordered_json normalized;
};

/// Parses and validates a configuration document. Unknown keys, missing
/// schema_version, a version mismatch and out-of-domain probe regions are
/// ConfigErrors. `seed_override` replaces the top-level seed.
ExperimentConfig parse_config(const nlohmann::ordered_json& doc, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {});

/// FNV-1a digest of the normalized configuration without its output section.
std::string config_digest(const ExperimentConfig& cfg);

std::shared_ptr<const CoefficientField> build_field(const ExperimentConfig& cfg);
PhaseGridFunction build_initial(const ExperimentConfig& cfg);

/// Solver configuration with the field attached.
SolverConfig solver_config(const ExperimentConfig& cfg);

/// Attaches the field and boundary flags of the configuration to a
/// trajectory read back from disk.
void attach_run_context(const ExperimentConfig& cfg, Trajectory& traj);

std::vector<ProbeReport> run_probes(const ExperimentConfig& cfg, const Trajectory& traj);
std::vector<InvariantResult> check_invariants(const ExperimentConfig& cfg, const Trajectory& traj);

/// Full report computed from the trajectory alone; used both in-run and on
/// replayed snapshots.
RunReport evaluate(const ExperimentConfig& cfg, const Trajectory& traj);

/// JSON readers matching point_to_json / cylinder_to_json / region_to_json.
KineticPoint point_from_json(const nlohmann::ordered_json& j, int d);
Cylinder cylinder_from_json(const nlohmann::ordered_json& j, int d);
Region region_from_json(const nlohmann::ordered_json& j, int d);

}  // namespace kfp
