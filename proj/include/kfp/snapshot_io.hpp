#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "kfp/phase_grid.hpp"
#include "kfp/solver.hpp"

namespace kfp {

inline constexpr int kSnapshotSchemaVersion = 1;

/// Missing or malformed snapshot files, or a schema version mismatch.
struct SnapshotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A snapshot file is one line of JSON header
///   {schema_version, d, dims: [nx, nv], extents: [X, V], spacings: [hx, hv], time, seed, layout}
/// followed by the values as raw little-endian float64 in grid storage order.
void write_snapshot(const std::filesystem::path& path, const PhaseGridFunction& f, std::uint64_t seed);

struct LoadedSnapshot {
  PhaseGridFunction f;
  std::uint64_t seed = 0;
};

LoadedSnapshot read_snapshot(const std::filesystem::path& path);

/// File name of snapshot i inside a snapshot directory.
std::string snapshot_file_name(std::size_t i);

/// Writes every snapshot of the trajectory plus ledger.csv into dir.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, std::uint64_t seed);

/// Reads the snapshots (in index order) and ledger.csv back. The field and
/// boundary flags are not stored and must be attached by the caller.
/// Throws SnapshotError when the directory holds no snapshot, a file is
/// unreadable or grids/seeds disagree.
Trajectory read_trajectory(const std::filesystem::path& dir, std::uint64_t* seed = nullptr);

}  // namespace kfp
