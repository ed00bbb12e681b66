#include "kfp/snapshot_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace kfp {
namespace {

std::uint64_t to_little(std::uint64_t u) {
  if constexpr (std::endian::native == std::endian::little) {
    return u;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((u >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

}  // namespace

std::string snapshot_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.bin", i);
  return buf;
}

void write_snapshot(const std::filesystem::path& path, const PhaseGridFunction& f, std::uint64_t seed) {
  const PhaseGrid& g = f.grid;
  nlohmann::ordered_json h;
  h["schema_version"] = kSnapshotSchemaVersion;
  h["d"] = g.d;
  h["dims"] = {g.nx, g.nv};
  h["extents"] = {g.X, g.V};
  h["spacings"] = {g.hx(), g.hv()};
  h["time"] = f.time;
  h["seed"] = seed;
  h["layout"] = "x-outer v-inner row-major float64-le";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open snapshot file for writing: " + path.string());
  os << h.dump() << '\n';
  std::vector<std::uint64_t> raw(f.values.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_little(std::bit_cast<std::uint64_t>(f.values[i]));
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (!os) throw SnapshotError("failed writing snapshot file: " + path.string());
}

LoadedSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("missing snapshot file: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw SnapshotError("empty snapshot file: " + path.string());
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError("malformed snapshot header in " + path.string() + ": " + e.what());
  }
  LoadedSnapshot out;
  try {
    const int version = h.at("schema_version").get<int>();
    if (version != kSnapshotSchemaVersion) {
      throw SnapshotError("snapshot schema version " + std::to_string(version) + " in " + path.string() +
                          " (expected " + std::to_string(kSnapshotSchemaVersion) + ")");
    }
    PhaseGrid g;
    g.d = h.at("d").get<int>();
    g.nx = h.at("dims").at(0).get<int>();
    g.nv = h.at("dims").at(1).get<int>();
    g.X = h.at("extents").at(0).get<double>();
    g.V = h.at("extents").at(1).get<double>();
    g.validate();
    out.f = PhaseGridFunction(g, h.at("time").get<double>());
    out.seed = h.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError("incomplete snapshot header in " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw SnapshotError("invalid grid in " + path.string() + ": " + e.what());
  }
  std::vector<std::uint64_t> raw(out.f.values.size());
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (is.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t))) {
    throw SnapshotError("truncated snapshot file: " + path.string());
  }
  if (is.peek() != std::char_traits<char>::eof()) throw SnapshotError("trailing bytes in snapshot file: " + path.string());
  for (std::size_t i = 0; i < raw.size(); ++i) out.f.values[i] = std::bit_cast<double>(to_little(raw[i]));
  return out;
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    write_snapshot(dir / snapshot_file_name(i), traj.snapshots[i], seed);
  }
  std::ofstream os(dir / "ledger.csv");
  if (!os) throw SnapshotError("cannot write ledger in " + dir.string());
  traj.ledger.write_csv(os);
}

Trajectory read_trajectory(const std::filesystem::path& dir, std::uint64_t* seed) {
  if (!std::filesystem::is_directory(dir)) throw SnapshotError("snapshot directory not found: " + dir.string());
  Trajectory traj;
  std::uint64_t first_seed = 0;
  for (std::size_t i = 0;; ++i) {
    const auto p = dir / snapshot_file_name(i);
    if (!std::filesystem::exists(p)) break;
    LoadedSnapshot s = read_snapshot(p);
    if (i == 0) {
      first_seed = s.seed;
    } else {
      if (!(s.f.grid == traj.snapshots.front().grid)) throw SnapshotError("grid mismatch in " + p.string());
      if (s.seed != first_seed) throw SnapshotError("seed mismatch in " + p.string());
    }
    traj.snapshots.push_back(std::move(s.f));
  }
  if (traj.snapshots.empty()) throw SnapshotError("no snapshot files in " + dir.string());
  std::ifstream is(dir / "ledger.csv");
  if (!is) throw SnapshotError("missing ledger.csv in " + dir.string());
  try {
    traj.ledger = EnergyLedger::read_csv(is);
  } catch (const std::exception& e) {
    throw SnapshotError(std::string("malformed ledger.csv: ") + e.what());
  }
  traj.frame = GalileanTransform{KineticPoint::origin(traj.dim())};
  if (seed) *seed = first_seed;
  return traj;
}

}  // namespace kfp
