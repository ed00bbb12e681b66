#include "kfp/region_reduce.hpp"

#include <array>
#include <cmath>

namespace kfp {
namespace {

/// Inclusive index range [lo, hi] of cell-centred nodes c(i) = -E + (i + 1/2) h
/// that can fall inside [a, b]; widened by one node on each side and clamped.
std::pair<int, int> node_range(double a, double b, double E, double h, int n) {
  const int lo = static_cast<int>(std::floor((a + E) / h - 0.5)) - 1;
  const int hi = static_cast<int>(std::ceil((b + E) / h - 0.5)) + 1;
  return {std::max(lo, 0), std::min(hi, n - 1)};
}

void scan_snapshot(const Trajectory& traj, const Region& region, std::size_t s, std::vector<CellRef>& out) {
  const PhaseGrid& g = traj.grid();
  const int d = g.d;
  const KineticPoint& base = traj.frame.base;
  const double tg = traj.snapshots[s].time;
  const double tp = base.t() + tg;
  const auto box = region_slice_box(region, tp);
  if (!box) return;
  std::array<int, kMaxDim> xlo{}, xhi{}, vlo{}, vhi{};
  for (int a = 0; a < d; ++a) {
    // Pull the physical box back to grid coordinates.
    const double xs = base.x(a) + tg * base.v(a);
    const auto xr = node_range(box->x_lo[a] - xs, box->x_hi[a] - xs, g.X, g.hx(), g.nx);
    const auto vr = node_range(box->v_lo[a] - base.v(a), box->v_hi[a] - base.v(a), g.V, g.hv(), g.nv);
    xlo[a] = xr.first;
    xhi[a] = xr.second;
    vlo[a] = vr.first;
    vhi[a] = vr.second;
    if (xlo[a] > xhi[a] || vlo[a] > vhi[a]) return;
  }
  std::array<int, kMaxDim> ix{}, iv{};
  for (int a = 0; a < d; ++a) ix[a] = xlo[a];
  while (true) {
    const std::size_t xflat = g.flatten_x(std::span<const int>(ix.data(), d));
    for (int a = 0; a < d; ++a) iv[a] = vlo[a];
    while (true) {
      const std::size_t flat = g.index(xflat, g.flatten_v(std::span<const int>(iv.data(), d)));
      if (region_contains(region, traj.point(s, flat))) {
        out.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint64_t>(flat)});
      }
      int a = d - 1;
      for (; a >= 0; --a) {
        if (++iv[a] <= vhi[a]) break;
        iv[a] = vlo[a];
      }
      if (a < 0) break;
    }
    int a = d - 1;
    for (; a >= 0; --a) {
      if (++ix[a] <= xhi[a]) break;
      ix[a] = xlo[a];
    }
    if (a < 0) break;
  }
}

}  // namespace

std::vector<CellRef> region_cells(const Trajectory& traj, const Region& region) {
  if (region_dim(region) != traj.dim()) throw std::invalid_argument("region and trajectory dimensions differ");
  const std::size_t ns = traj.snapshots.size();
  std::vector<std::vector<CellRef>> per(ns);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ns);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < n; ++s) scan_snapshot(traj, region, static_cast<std::size_t>(s), per[s]);
  std::vector<CellRef> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<CellRef> region_cells_serial(const Trajectory& traj, const Region& region) {
  if (region_dim(region) != traj.dim()) throw std::invalid_argument("region and trajectory dimensions differ");
  std::vector<CellRef> out;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const std::size_t N = traj.snapshots[s].values.size();
    for (std::size_t k = 0; k < N; ++k) {
      if (region_contains(region, traj.point(s, k))) {
        out.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint64_t>(k)});
      }
    }
  }
  return out;
}

bool region_inside_domain(const Trajectory& traj, const Region& region) {
  const PhaseGrid& g = traj.grid();
  const KineticPoint& base = traj.frame.base;
  for (const auto& snap : traj.snapshots) {
    const double tg = snap.time;
    const auto box = region_slice_box(region, base.t() + tg);
    if (!box) continue;
    for (int a = 0; a < g.d; ++a) {
      const double xs = base.x(a) + tg * base.v(a);
      if (box->x_lo[a] - xs < -g.X || box->x_hi[a] - xs > g.X) return false;
      if (box->v_lo[a] - base.v(a) < -g.V || box->v_hi[a] - base.v(a) > g.V) return false;
    }
  }
  return true;
}

bool region_in_run(const Trajectory& traj, const Region& region) {
  if (!region_inside_domain(traj, region)) return false;
  const double t0 = traj.frame.base.t();
  const TimeWindow w = region_time_window(region);
  return w.lo >= t0 + traj.snapshots.front().time && w.hi <= t0 + traj.snapshots.back().time;
}

double cell_weight(const Trajectory& traj) {
  const double dt = traj.snapshot_spacing();
  return traj.grid().cell_volume() * (dt > 0.0 ? dt : 1.0);
}

}  // namespace kfp
