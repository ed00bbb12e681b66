// Per-slice kernels of the split step: semi-Lagrangian / upwind transport
// along x for each velocity node, and the implicit velocity solve for each
// x-cell. Each kernel has an OpenMP driver and a serial reference driver that
// call the same slice routine, so both produce bit-identical results.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "kfp/solver.hpp"

namespace kfp {
namespace {

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

int wrap(long i, int n) {
  long r = i % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

/// Shifts one periodic line by `s` cells: out_i = in(i - s).
void shift_line(std::span<const double> in, std::span<double> out, double s, const SolverConfig& cfg) {
  const int n = static_cast<int>(in.size());
  if (cfg.scheme == Scheme::SplitUpwind) {
    if (std::abs(s) > 1.0) throw SolverError("upwind transport: CFL number exceeds 1");
    for (int i = 0; i < n; ++i) {
      if (s >= 0.0) {
        out[i] = in[i] - s * (in[i] - in[wrap(i - 1, n)]);
      } else {
        out[i] = in[i] - s * (in[wrap(i + 1, n)] - in[i]);
      }
    }
    return;
  }
  const double fl = std::floor(s);
  const double a = s - fl;  // out_i = in at position i - s = (i - fl - 1) + (1 - a)
  const long k = static_cast<long>(fl);
  if (a == 0.0) {
    for (int i = 0; i < n; ++i) out[i] = in[wrap(i - k, n)];
    return;
  }
  // Position p = i - k - a lies between nodes m = i - k - 1 and m + 1 with
  // fractional offset b = 1 - a from m.
  const double b = 1.0 - a;
  if (cfg.interpolation == Interpolation::Linear) {
    for (int i = 0; i < n; ++i) {
      const long m = i - k - 1;
      out[i] = (1.0 - b) * in[wrap(m, n)] + b * in[wrap(m + 1, n)];
    }
    return;
  }
  // 4-point Lagrange on nodes m-1, m, m+1, m+2.
  const double wm1 = -b * (b - 1.0) * (b - 2.0) / 6.0;
  const double w0 = (b + 1.0) * (b - 1.0) * (b - 2.0) / 2.0;
  const double w1 = -(b + 1.0) * b * (b - 2.0) / 2.0;
  const double w2 = (b + 1.0) * b * (b - 1.0) / 6.0;
  for (int i = 0; i < n; ++i) {
    const long m = i - k - 1;
    out[i] = wm1 * in[wrap(m - 1, n)] + w0 * in[wrap(m, n)] + w1 * in[wrap(m + 1, n)] + w2 * in[wrap(m + 2, n)];
  }
}

/// Transports every x-line belonging to velocity node iv.
void transport_velocity_node(std::vector<double>& values, const SolverConfig& cfg, double tau, std::size_t iv) {
  const PhaseGrid& g = cfg.grid;
  const int d = g.d;
  const int n = g.nx;
  const std::size_t nvc = g.v_count();
  const std::size_t nxc = g.x_count();
  std::array<int, kMaxDim> vidx{};
  g.unflatten_v(iv, vidx);
  std::vector<double> in(n), out(n);
  for (int a = 0; a < d; ++a) {
    const double s = g.v_node(vidx[a]) * tau / g.hx();
    if (s == 0.0) continue;
    // Stride of x-axis a in units of x-cells.
    std::size_t stride = 1;
    for (int b = a + 1; b < d; ++b) stride *= static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < nxc; ++base) {
      // Enumerate line starts: x-cells whose axis-a index is zero.
      if ((base / stride) % static_cast<std::size_t>(n) != 0) continue;
      for (int i = 0; i < n; ++i) in[i] = values[(base + i * stride) * nvc + iv];
      shift_line(in, out, s, cfg);
      for (int i = 0; i < n; ++i) values[(base + i * stride) * nvc + iv] = out[i];
    }
  }
}

// ---------------------------------------------------------------------------
// Velocity solve
// ---------------------------------------------------------------------------

struct CellCoefficients {
  std::vector<double> A;  // nvc * d * d
  std::vector<double> B;  // nvc * d
  std::vector<double> s;  // nvc
};

void sample_coefficients(const SolverConfig& cfg, std::size_t ix, double t, CellCoefficients& c) {
  const PhaseGrid& g = cfg.grid;
  const int d = g.d;
  const std::size_t nvc = g.v_count();
  c.A.assign(nvc * d * d, 0.0);
  c.B.assign(nvc * d, 0.0);
  c.s.assign(nvc, 0.0);
  if (!cfg.field) {
    for (std::size_t j = 0; j < nvc; ++j)
      for (int a = 0; a < d; ++a) c.A[j * d * d + a * d + a] = 1.0;
    return;
  }
  const std::size_t first = ix * nvc;
  for (std::size_t j = 0; j < nvc; ++j) {
    const CoefficientSample cs = cfg.field->evaluate(g.point(first + j, t));
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) c.A[j * d * d + a * d + b] = cs.A(a, b);
      c.B[j * d + a] = cs.B(a);
    }
    c.s[j] = cs.s;
  }
}

/// Thomas algorithm for a tridiagonal system (lower[0], upper[n-1] unused).
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> cp(n);
  double denom = diag[0];
  if (!(std::abs(denom) > 0.0)) throw SolverError("velocity solve: zero pivot");
  cp[0] = upper[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * cp[i - 1];
    if (!(std::abs(denom) > 0.0)) throw SolverError("velocity solve: zero pivot");
    cp[i] = i + 1 < n ? upper[i] / denom : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
}

/// Cyclic tridiagonal system with corner entries lower[0] (row 0, col n-1) and
/// upper[n-1] (row n-1, col 0), via the Sherman-Morrison correction.
void solve_cyclic(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                  std::span<double> rhs) {
  const std::size_t n = diag.size();
  const double alpha = upper[n - 1];
  const double beta = lower[0];
  const double gamma = -diag[0];
  std::vector<double> dd(diag.begin(), diag.end());
  dd[0] -= gamma;
  dd[n - 1] -= alpha * beta / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  solve_tridiagonal(lower, dd, upper, rhs);
  solve_tridiagonal(lower, dd, upper, u);
  const double fact = (rhs[0] + beta * rhs[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= fact * u[i];
}

void velocity_slice_1d(std::span<double> f, const CellCoefficients& c, const SolverConfig& cfg, double dt) {
  const int n = cfg.grid.nv;
  const double h = cfg.grid.hv();
  const double k2 = dt / (h * h);
  const double k1 = dt / h;
  const bool periodic = cfg.periodic_v();
  std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const bool has_left = periodic || j > 0;
    const bool has_right = periodic || j + 1 < n;
    const int jl = (j - 1 + n) % n;
    const int jr = (j + 1) % n;
    if (has_right) {
      const double af = 0.5 * (c.A[j] + c.A[jr]);
      up[j] -= k2 * af;
      di[j] += k2 * af;
    }
    if (has_left) {
      const double af = 0.5 * (c.A[j] + c.A[jl]);
      lo[j] -= k2 * af;
      di[j] += k2 * af;
    }
    const double b = c.B[j];
    if (b > 0.0 && has_right) {
      up[j] -= k1 * b;
      di[j] += k1 * b;
    } else if (b < 0.0 && has_left) {
      lo[j] += k1 * b;
      di[j] -= k1 * b;
    }
    f[j] += dt * c.s[j];
  }
  if (periodic) {
    solve_cyclic(lo, di, up, f);
  } else {
    solve_tridiagonal(lo, di, up, f);
  }
}

/// d = 2: face fluxes with the diagonal entries on the 5-point stencil and
/// the off-diagonal entry applied to the tangential gradient averaged over
/// the two cells sharing the face; solved by sparse LU.
void velocity_slice_2d(std::span<double> f, const CellCoefficients& c, const SolverConfig& cfg, double dt) {
  const int n = cfg.grid.nv;
  const double h = cfg.grid.hv();
  const bool periodic = cfg.periodic_v();
  const int N = n * n;
  auto id = [n](int j0, int j1) { return j0 * n + j1; };
  auto Aat = [&](int cell, int a, int b) { return c.A[static_cast<std::size_t>(cell) * 4 + a * 2 + b]; };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(N) * 13);
  // A face flux F = sum_k w_k f_k along +axis adds F/h to (L f)_lo and -F/h
  // to (L f)_hi; rows of I - dt L receive the negated contributions.
  auto add_flux = [&](int lo_cell, int hi_cell, const std::vector<std::pair<int, double>>& comb) {
    for (const auto& [col, w] : comb) {
      trip.emplace_back(lo_cell, col, -dt * w / h);
      trip.emplace_back(hi_cell, col, dt * w / h);
    }
  };
  std::vector<std::pair<int, double>> comb;
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    for (int j0 = 0; j0 < n; ++j0) {
      for (int j1 = 0; j1 < n; ++j1) {
        std::array<int, 2> lo_idx{j0, j1};
        std::array<int, 2> hi_idx = lo_idx;
        hi_idx[axis] += 1;
        if (hi_idx[axis] >= n) {
          if (!periodic) continue;
          hi_idx[axis] = 0;
        }
        const int lo_cell = id(lo_idx[0], lo_idx[1]);
        const int hi_cell = id(hi_idx[0], hi_idx[1]);
        const double a_nn = 0.5 * (Aat(lo_cell, axis, axis) + Aat(hi_cell, axis, axis));
        const double a_nt = 0.5 * (Aat(lo_cell, axis, other) + Aat(hi_cell, axis, other));
        comb.clear();
        comb.emplace_back(hi_cell, a_nn / h);
        comb.emplace_back(lo_cell, -a_nn / h);
        if (a_nt != 0.0) {
          // Tangential derivative at the face from both adjacent cells.
          for (const auto& cell_idx : {lo_idx, hi_idx}) {
            std::array<int, 2> p = cell_idx, m = cell_idx;
            p[other] += 1;
            m[other] -= 1;
            double span = 2.0;
            if (periodic) {
              p[other] = (p[other] + n) % n;
              m[other] = (m[other] + n) % n;
            } else {
              span = 0.0;
              if (p[other] >= n) p[other] = cell_idx[other]; else span += 1.0;
              if (m[other] < 0) m[other] = cell_idx[other]; else span += 1.0;
            }
            if (span == 0.0) continue;
            const double w = 0.5 * a_nt / (span * h);
            comb.emplace_back(id(p[0], p[1]), w);
            comb.emplace_back(id(m[0], m[1]), -w);
          }
        }
        add_flux(lo_cell, hi_cell, comb);
      }
    }
  }
  for (int k = 0; k < N; ++k) trip.emplace_back(k, k, 1.0);

  // Upwind drift B . grad f.
  for (int j0 = 0; j0 < n; ++j0) {
    for (int j1 = 0; j1 < n; ++j1) {
      const int cell = id(j0, j1);
      for (int axis = 0; axis < 2; ++axis) {
        const double b = c.B[static_cast<std::size_t>(cell) * 2 + axis];
        if (b == 0.0) continue;
        std::array<int, 2> nb{j0, j1};
        nb[axis] += b > 0.0 ? 1 : -1;
        if (nb[axis] < 0 || nb[axis] >= n) {
          if (!periodic) continue;
          nb[axis] = (nb[axis] + n) % n;
        }
        const double w = dt * std::abs(b) / h;
        trip.emplace_back(cell, id(nb[0], nb[1]), -w);
        trip.emplace_back(cell, cell, w);
      }
    }
  }

  Eigen::SparseMatrix<double> M(N, N);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw SolverError("velocity solve: sparse LU factorisation failed");
  Eigen::VectorXd rhs(N);
  for (int k = 0; k < N; ++k) rhs(k) = f[k] + dt * c.s[k];
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("velocity solve: sparse LU solve failed");
  for (int k = 0; k < N; ++k) f[k] = sol(k);
}

void velocity_x_cell(std::vector<double>& values, const SolverConfig& cfg, double t, double dt, std::size_t ix,
                     CellCoefficients& coef) {
  const std::size_t nvc = cfg.grid.v_count();
  sample_coefficients(cfg, ix, t, coef);
  std::span<double> f(values.data() + ix * nvc, nvc);
  if (cfg.grid.d == 1) {
    velocity_slice_1d(f, coef, cfg, dt);
  } else {
    velocity_slice_2d(f, coef, cfg, dt);
  }
  for (double v : f) {
    if (!std::isfinite(v)) throw SolverError("velocity solve produced a non-finite value");
  }
}

}  // namespace

void transport_step_serial(std::vector<double>& values, const SolverConfig& cfg, double tau) {
  const std::size_t nvc = cfg.grid.v_count();
  for (std::size_t iv = 0; iv < nvc; ++iv) transport_velocity_node(values, cfg, tau, iv);
}

void transport_step(std::vector<double>& values, const SolverConfig& cfg, double tau) {
  const std::ptrdiff_t nvc = static_cast<std::ptrdiff_t>(cfg.grid.v_count());
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t iv = 0; iv < nvc; ++iv) {
    try {
      transport_velocity_node(values, cfg, tau, static_cast<std::size_t>(iv));
    } catch (const std::exception& e) {
#pragma omp critical(kfp_transport_error)
      {
        failed = true;
        message = e.what();
      }
    }
  }
  if (failed) throw SolverError(message);
}

void velocity_step_serial(std::vector<double>& values, const SolverConfig& cfg, double t, double dt) {
  CellCoefficients coef;
  const std::size_t nxc = cfg.grid.x_count();
  for (std::size_t ix = 0; ix < nxc; ++ix) velocity_x_cell(values, cfg, t, dt, ix, coef);
}

void velocity_step(std::vector<double>& values, const SolverConfig& cfg, double t, double dt) {
  const std::ptrdiff_t nxc = static_cast<std::ptrdiff_t>(cfg.grid.x_count());
  bool failed = false;
  std::string message;
#pragma omp parallel
  {
    CellCoefficients coef;
#pragma omp for schedule(static)
    for (std::ptrdiff_t ix = 0; ix < nxc; ++ix) {
      try {
        velocity_x_cell(values, cfg, t, dt, static_cast<std::size_t>(ix), coef);
      } catch (const std::exception& e) {
#pragma omp critical(kfp_velocity_error)
        {
          failed = true;
          message = e.what();
        }
      }
    }
  }
  if (failed) throw SolverError(message);
}

}  // namespace kfp
