// Landau coefficient convolutions: direct-summation reference (serial and
// OpenMP) and the FFT route.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "kfp/landau.hpp"
#include "landau_detail.hpp"

namespace kfp {
namespace detail {

KernelTable::KernelTable(const VelocityGrid& grid, const LandauParams& p)
    : d_(grid.d), n_(grid.n), ncomp_(grid.d * grid.d + grid.d + 1), c_local_(p.gamma == -p.d) {
  if (p.d != grid.d) throw std::invalid_argument("landau: parameter and grid dimensions differ");
  if (grid.n < 2) throw std::invalid_argument("landau: grid needs at least two nodes per axis");
  const int span = 2 * n_ - 1;
  std::size_t count = 1;
  for (int j = 0; j < d_; ++j) count *= static_cast<std::size_t>(span);
  table_.assign(count * ncomp_, 0.0);

  const double h = grid.h();
  const double hd = grid.cell_volume();
  const double c_origin = c_local_ ? 0.0 : p.c_const * cell_average_power(d_, p.gamma, h) * hd;

  std::array<int, 3> m{};
  std::array<double, 3> w{};
  for (std::size_t e = 0; e < count; ++e) {
    std::size_t rem = e;
    double r2 = 0.0;
    for (int j = d_ - 1; j >= 0; --j) {
      m[j] = static_cast<int>(rem % span) - (n_ - 1);
      rem /= span;
      w[j] = m[j] * h;
      r2 += w[j] * w[j];
    }
    double* out = &table_[e * ncomp_];
    if (r2 == 0.0) {
      out[c_component()] = c_origin;
      continue;
    }
    const double r = std::sqrt(r2);
    const double rg = std::pow(r, p.gamma);
    const double ra = rg * r2;  // |w|^{gamma+2}
    for (int i = 0; i < d_; ++i) {
      for (int k = 0; k < d_; ++k) {
        const double proj = (i == k ? 1.0 : 0.0) - w[i] * w[k] / r2;
        out[a_component(i, k)] = p.a_const * proj * ra * hd;
      }
      out[b_component(i)] = p.b_const * rg * w[i] * hd;
    }
    out[c_component()] = c_local_ ? 0.0 : p.c_const * rg * hd;
  }
}

const double* KernelTable::at(std::span<const int> offset) const {
  const int span = 2 * n_ - 1;
  std::size_t e = 0;
  for (int j = 0; j < d_; ++j) e = e * span + static_cast<std::size_t>(offset[j] + n_ - 1);
  return &table_[e * ncomp_];
}

void direct_sum_at(const VelocityGridFunction& f, const KernelTable& K, std::size_t k_out, Padding padding,
                   std::span<double> out) {
  const VelocityGrid& g = f.grid;
  const int d = g.d;
  const int n = g.n;
  const int nc = K.n_components();
  std::array<int, 3> io{}, ij{}, m{};
  g.unflatten(k_out, std::span<int>(io.data(), d));
  std::fill(out.begin(), out.end(), 0.0);
  ij.fill(0);
  const std::size_t total = f.values.size();
  for (std::size_t j = 0; j < total; ++j) {
    const double fj = f.values[j];
    if (fj != 0.0) {
      for (int a = 0; a < d; ++a) {
        const int diff = io[a] - ij[a];
        m[a] = padding == Padding::Periodic ? periodic_image(diff, n) : diff;
      }
      const double* kern = K.at(std::span<const int>(m.data(), d));
      for (int c = 0; c < nc; ++c) out[c] += kern[c] * fj;
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++ij[a] < n) break;
      ij[a] = 0;
    }
  }
}

}  // namespace detail

namespace {

LandauFields allocate_fields(const VelocityGridFunction& f) {
  const int d = f.grid.d;
  const std::size_t N = f.grid.size();
  LandauFields F;
  F.d = d;
  F.A.assign(N * d * d, 0.0);
  F.B.assign(N * d, 0.0);
  F.c.assign(N, 0.0);
  return F;
}

void scatter(const detail::KernelTable& K, int d, std::size_t k, std::span<const double> sums, LandauFields& F) {
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) F.A[k * d * d + i * d + j] = sums[K.a_component(i, j)];
    F.B[k * d + i] = sums[K.b_component(i)];
  }
  F.c[k] = sums[K.c_component()];
}

void check_input(const VelocityGridFunction& f, const LandauParams& p) {
  p.validate();
  if (f.values.size() != f.grid.size()) throw std::invalid_argument("landau: value count does not match grid");
}

void fill_local_c(const VelocityGridFunction& f, const LandauParams& p, LandauFields& F) {
  for (std::size_t k = 0; k < F.c.size(); ++k) F.c[k] = p.c_const * f.values[k];
}

}  // namespace

LandauFields landau_fields_direct_serial(const VelocityGridFunction& f, const LandauParams& p, Padding padding) {
  check_input(f, p);
  const detail::KernelTable K(f.grid, p);
  LandauFields F = allocate_fields(f);
  std::vector<double> sums(K.n_components());
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    detail::direct_sum_at(f, K, k, padding, sums);
    scatter(K, p.d, k, sums, F);
  }
  if (K.c_is_local()) fill_local_c(f, p, F);
  return F;
}

LandauFields landau_fields_direct(const VelocityGridFunction& f, const LandauParams& p, Padding padding) {
  check_input(f, p);
  const detail::KernelTable K(f.grid, p);
  LandauFields F = allocate_fields(f);
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(f.values.size());
#pragma omp parallel
  {
    std::vector<double> sums(K.n_components());
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < N; ++k) {
      detail::direct_sum_at(f, K, static_cast<std::size_t>(k), padding, sums);
      scatter(K, p.d, static_cast<std::size_t>(k), sums, F);
    }
  }
  if (K.c_is_local()) fill_local_c(f, p, F);
  return F;
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_malloc(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

struct FftwPlan {
  fftw_plan plan = nullptr;
  ~FftwPlan() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

}  // namespace

LandauFields landau_fields_fft(const VelocityGridFunction& f, const LandauParams& p, Padding padding) {
  check_input(f, p);
  const detail::KernelTable K(f.grid, p);
  const int d = p.d;
  const int n = f.grid.n;
  const int L = padding == Padding::Zero ? 2 * n : n;

  std::array<int, 3> dims{};
  std::size_t real_count = 1;
  std::size_t cplx_count = 1;
  for (int a = 0; a < d; ++a) {
    dims[a] = L;
    real_count *= static_cast<std::size_t>(L);
    cplx_count *= static_cast<std::size_t>(a == d - 1 ? L / 2 + 1 : L);
  }

  FftwBuffer fin(real_count * sizeof(double));
  FftwBuffer kin(real_count * sizeof(double));
  FftwBuffer fhat(cplx_count * sizeof(fftw_complex));
  FftwBuffer khat(cplx_count * sizeof(fftw_complex));
  auto* fr = static_cast<double*>(fin.ptr);
  auto* kr = static_cast<double*>(kin.ptr);
  auto* fc = static_cast<fftw_complex*>(fhat.ptr);
  auto* kc = static_cast<fftw_complex*>(khat.ptr);

  FftwPlan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd.plan = fftw_plan_dft_r2c(d, dims.data(), fr, fc, FFTW_ESTIMATE);
    bwd.plan = fftw_plan_dft_c2r(d, dims.data(), kc, kr, FFTW_ESTIMATE);
  }
  if (!fwd.plan || !bwd.plan) throw std::runtime_error("landau_fields_fft: FFTW planning failed");

  // Padded-grid linear index for a multi-index with coordinates in [0, L).
  auto padded_index = [&](std::span<const int> idx) {
    std::size_t e = 0;
    for (int a = 0; a < d; ++a) e = e * L + static_cast<std::size_t>(idx[a]);
    return e;
  };

  std::fill(fr, fr + real_count, 0.0);
  std::array<int, 3> idx{};
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.grid.unflatten(k, std::span<int>(idx.data(), d));
    fr[padded_index(std::span<const int>(idx.data(), d))] = f.values[k];
  }
  fftw_execute_dft_r2c(fwd.plan, fr, fc);

  LandauFields F = allocate_fields(f);
  const double inv = 1.0 / static_cast<double>(real_count);
  const int ncomp = K.n_components();
  std::array<int, 3> m{};
  for (int comp = 0; comp < ncomp; ++comp) {
    if (comp == K.c_component() && K.c_is_local()) continue;
    const int row = comp / d;
    const int col = comp % d;
    if (comp < d * d && col < row) continue;  // A is symmetric; mirrored below

    // Kernel laid out circularly: offset m stored at m mod L.
    std::fill(kr, kr + real_count, 0.0);
    for (std::size_t e = 0; e < real_count; ++e) {
      std::size_t rem = e;
      bool inside = true;
      for (int a = d - 1; a >= 0; --a) {
        const int r = static_cast<int>(rem % L);
        rem /= L;
        if (padding == Padding::Zero) {
          m[a] = r < n ? r : r - L;
          if (m[a] <= -n) inside = false;
        } else {
          m[a] = detail::periodic_image(r, n);
        }
      }
      if (inside) kr[e] = K.value(std::span<const int>(m.data(), d), comp);
    }
    fftw_execute_dft_r2c(fwd.plan, kr, kc);
    for (std::size_t e = 0; e < cplx_count; ++e) {
      const std::complex<double> a(fc[e][0], fc[e][1]);
      const std::complex<double> b(kc[e][0], kc[e][1]);
      const std::complex<double> prod = a * b;
      kc[e][0] = prod.real();
      kc[e][1] = prod.imag();
    }
    fftw_execute_dft_c2r(bwd.plan, kc, kr);

    for (std::size_t k = 0; k < f.values.size(); ++k) {
      f.grid.unflatten(k, std::span<int>(idx.data(), d));
      const double val = kr[padded_index(std::span<const int>(idx.data(), d))] * inv;
      if (comp < d * d) {
        F.A[k * d * d + row * d + col] = val;
        F.A[k * d * d + col * d + row] = val;
      } else if (comp < d * d + d) {
        F.B[k * d + (comp - d * d)] = val;
      } else {
        F.c[k] = val;
      }
    }
  }
  if (K.c_is_local()) fill_local_c(f, p, F);
  return F;
}

}  // namespace kfp
