#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "kfp/geometry.hpp"
#include "kfp/solver.hpp"

namespace kfp {

/// One space-time cell of a trajectory: snapshot index and flat phase index.
struct CellRef {
  std::uint32_t snap = 0;
  std::uint64_t cell = 0;
};

/// Cells of the trajectory whose physical point lies in the region, ordered by
/// (snapshot, flat index). Uses the slice bounding boxes to restrict the scan.
std::vector<CellRef> region_cells(const Trajectory& traj, const Region& region);
/// Reference: tests every cell of every snapshot.
std::vector<CellRef> region_cells_serial(const Trajectory& traj, const Region& region);

/// True when every slice box of the region that meets a stored time lies
/// inside the (unwrapped) grid box, so no cell of the region is lost to the
/// periodic x boundary or the velocity truncation.
bool region_inside_domain(const Trajectory& traj, const Region& region);

/// region_inside_domain plus: the time window (lo, hi] lies within the stored
/// time range, so every time slice of the region has been recorded.
bool region_in_run(const Trajectory& traj, const Region& region);

/// Space-time weight of one cell: hx^d hv^d times the snapshot spacing (the
/// spacing is 1 for a single snapshot, so measures become slice measures).
double cell_weight(const Trajectory& traj);

/// Fixed chunk length of the deterministic reductions below. Partial sums are
/// formed per chunk and combined in chunk order, so the result is independent
/// of the thread count.
inline constexpr std::size_t kReduceChunk = 1024;

template <class F>
double chunked_sum(std::size_t n, F&& term, bool parallel = true) {
  const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partial(chunks, 0.0);
  const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t hi = std::min(n, lo + kReduceChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class F>
double chunked_max(std::size_t n, F&& term, bool parallel = true) {
  const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partial(chunks, -std::numeric_limits<double>::infinity());
  const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t hi = std::min(n, lo + kReduceChunk);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
    partial[static_cast<std::size_t>(c)] = m;
  }
  double total = -std::numeric_limits<double>::infinity();
  for (double p : partial) total = std::max(total, p);
  return total;
}

template <class F>
double chunked_min(std::size_t n, F&& term, bool parallel = true) {
  return -chunked_max(n, [&](std::size_t i) { return -term(i); }, parallel);
}

/// Value of f at a cell reference.
inline double cell_value(const Trajectory& traj, const CellRef& c) {
  return traj.snapshots[c.snap].values[c.cell];
}

}  // namespace kfp
