#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kfp {

/// Interaction exponent gamma and the (unspecified) normalising constants of
/// the Landau coefficient integrals. The constants default to 1.
struct LandauParams {
  int d = 3;
  double gamma = -3.0;
  double a_const = 1.0;
  double b_const = 1.0;
  double c_const = 1.0;

  /// Throws on invalid values; returns non-fatal warnings (hard potentials).
  std::vector<std::string> validate() const;
};

/// Uniform node grid on [-V, V]^d with n nodes per axis, h = 2V/(n-1).
/// Nodes are stored row-major with the first axis slowest.
struct VelocityGrid {
  int d = 1;
  int n = 2;
  double V = 1.0;

  double h() const { return 2.0 * V / static_cast<double>(n - 1); }
  double cell_volume() const;
  std::size_t size() const;
  double node(int i) const { return -V + h() * static_cast<double>(i); }
  /// Multi-index of a flat index.
  void unflatten(std::size_t flat, std::span<int> idx) const;
  std::size_t flatten(std::span<const int> idx) const;
};

struct VelocityGridFunction {
  VelocityGrid grid;
  std::vector<double> values;

  /// Samples g(v) at every node.
  template <class Fn>
  static VelocityGridFunction from_function(const VelocityGrid& grid, Fn&& g) {
    VelocityGridFunction f{grid, std::vector<double>(grid.size())};
    std::vector<int> idx(grid.d);
    std::vector<double> v(grid.d);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      grid.unflatten(k, idx);
      for (int j = 0; j < grid.d; ++j) v[j] = grid.node(idx[j]);
      f.values[k] = g(std::span<const double>(v));
    }
    return f;
  }
};

/// Maxwellian of unit mass and temperature: (2 pi)^{-d/2} exp(-|v|^2/2).
VelocityGridFunction maxwellian(const VelocityGrid& grid, double mass = 1.0, double temperature = 1.0);

struct Moments {
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
};

/// Discrete mass, energy and entropy (0 ln 0 = 0). Throws on negative entries.
Moments moments(const VelocityGridFunction& f);

struct MomentBounds {
  double M1 = 0.5;  ///< lower mass
  double M0 = 2.0;  ///< upper mass
  double E0 = 10.0; ///< upper energy
  double H0 = 10.0; ///< upper entropy
};

enum class Padding { Zero, Periodic };

/// A, B, c at every node of the velocity grid. `A` stores d*d entries per node
/// (row-major), `B` d entries per node.
struct LandauFields {
  int d = 0;
  std::vector<double> A;
  std::vector<double> B;
  std::vector<double> c;

  std::size_t size() const { return c.size(); }
  Eigen::MatrixXd A_at(std::size_t k) const;
  Eigen::VectorXd B_at(std::size_t k) const;
};

/// Average of |w|^gamma over the cell [-h/2, h/2]^d (gamma > -d); used for the
/// w = 0 cell of the c-kernel.
double cell_average_power(int d, double gamma, double h);

/// Coefficient evaluation at a single node (multi-index), by direct summation.
Eigen::MatrixXd landau_A(const VelocityGridFunction& f, const LandauParams& p, std::span<const int> node,
                         Padding padding = Padding::Zero);
Eigen::VectorXd landau_B(const VelocityGridFunction& f, const LandauParams& p, std::span<const int> node,
                         Padding padding = Padding::Zero);
double landau_c(const VelocityGridFunction& f, const LandauParams& p, std::span<const int> node,
                Padding padding = Padding::Zero);

/// All coefficient fields by O(N^2) direct summation; serial reference kernel.
LandauFields landau_fields_direct_serial(const VelocityGridFunction& f, const LandauParams& p,
                                         Padding padding = Padding::Zero);
/// Same sum, OpenMP-parallel over output nodes. Bit-identical to the serial kernel.
LandauFields landau_fields_direct(const VelocityGridFunction& f, const LandauParams& p,
                                  Padding padding = Padding::Zero);
/// FFT convolution (FFTW), zero-padded to 2n per axis or circular for periodic.
LandauFields landau_fields_fft(const VelocityGridFunction& f, const LandauParams& p,
                               Padding padding = Padding::Zero);

struct BoundsReport {
  LandauParams params;
  Moments moments;
  double kappa = 0.0;
  double min_det_ratio = 0.0;   ///< min_v det A / (1+|v|)^kappa
  double max_A_ratio = 0.0;     ///< max |A| over its growth envelope in (1+|v|)
  double max_B_ratio = 0.0;     ///< max |B| over its growth envelope in (1+|v|)
  double max_c_ratio = 0.0;     ///< max |c| over its growth envelope in (1+|v|)
  double f_sup = 0.0;
  std::vector<std::string> warnings;
  bool lower_bound_ok = false;  ///< min_det_ratio > 0
};

/// Checks the determinant lower bound and the coefficient upper-bound shapes
/// on every node. Throws if the moments leave the (M1, M0, E0, H0) window.
BoundsReport check_coefficient_bounds(const VelocityGridFunction& f, const LandauParams& p,
                                      const MomentBounds& bounds);

}  // namespace kfp
