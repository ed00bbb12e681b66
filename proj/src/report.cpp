#include "kfp/report.hpp"

#include <cmath>
#include <cstdio>

namespace kfp {

std::string format_constant(double x) {
  if (std::isnan(x)) return "degenerate (0/0)";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::ordered_json probe_to_json(const ProbeReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["params"] = r.params;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.constants) c[k] = format_constant(v);
  j["constants"] = c;
  j["verdict"] = r.verdict;
  return j;
}

bool RunReport::hard_invariants_pass() const {
  for (const auto& inv : invariants) {
    if (inv.hard && !inv.passed) return false;
  }
  return true;
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config_digest"] = config_digest;
  j["probes"] = nlohmann::ordered_json::array();
  for (const auto& p : probes) j["probes"].push_back(probe_to_json(p));
  j["invariants"] = nlohmann::ordered_json::array();
  for (const auto& inv : invariants) {
    nlohmann::ordered_json i;
    i["name"] = inv.name;
    i["kind"] = inv.hard ? "hard" : "soft";
    i["passed"] = inv.passed;
    i["value"] = format_constant(inv.value);
    i["tolerance"] = format_constant(inv.tolerance);
    i["detail"] = inv.detail;
    j["invariants"].push_back(i);
  }
  return j;
}

std::string RunReport::dump() const { return to_json().dump(2) + "\n"; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kfp
