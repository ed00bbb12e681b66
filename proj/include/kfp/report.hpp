#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "kfp/probes.hpp"

namespace kfp {

inline constexpr int kReportSchemaVersion = 1;

/// Outcome of one invariant check of a run. Hard invariants decide the exit
/// status; soft ones are reported only.
struct InvariantResult {
  std::string name;
  bool hard = true;
  bool passed = true;
  double value = 0.0;      ///< measured worst case
  double tolerance = 0.0;
  std::string detail;
};

struct RunReport {
  std::string config_digest;
  std::vector<ProbeReport> probes;
  std::vector<InvariantResult> invariants;

  bool hard_invariants_pass() const;
  nlohmann::ordered_json to_json() const;
  /// Two-space indented JSON with a trailing newline.
  std::string dump() const;
};

/// Decimal text of a constant: "%.17g" for finite values, "inf"/"-inf", and
/// "degenerate (0/0)" for NaN.
std::string format_constant(double x);

nlohmann::ordered_json probe_to_json(const ProbeReport& r);

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace kfp
