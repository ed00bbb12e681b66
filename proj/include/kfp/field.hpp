#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kfp/geometry.hpp"

namespace kfp {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// lambda I <= A <= Lambda I.
struct EllipticityBounds {
  double lambda = 1.0;
  double Lambda = 1.0;

  void validate() const;
};

enum class Recipe { Constant, Checkerboard, SmoothRandom, RotatingAnisotropy };

std::string to_string(Recipe r);
Recipe recipe_from_string(const std::string& s);

enum class DriftMode { Zero, Random };

/// Everything needed to rebuild a coefficient field besides the seed.
struct FieldRecipe {
  Recipe kind = Recipe::Constant;
  /// Checkerboard: kinetic cell scale l, giving cells l^3 x l x l^2 in (x, v, t).
  double cell_scale = 0.5;
  /// SmoothRandom / RotatingAnisotropy: correlation lengths in (x, v, t).
  std::array<double, 3> correlation{1.0, 1.0, 1.0};
  int modes = 6;
  DriftMode drift = DriftMode::Zero;
  /// Random sources are uniform in [-s_max, s_max] per cell; s_max = 0 disables them.
  double s_max = 0.0;
  /// Constant part added to the source everywhere.
  double s_const = 0.0;
  /// Constant drift for the Constant recipe (empty means zero).
  std::vector<double> b_const;
  /// Multiplies A after construction; values other than 1 deliberately break
  /// the ellipticity certificate (negative control).
  double a_scale = 1.0;
  /// Multiplies the source; used to rescale a solution together with its data.
  double source_scale = 1.0;

  void validate() const;
};

struct CoefficientSample {
  SmallMatrix A;
  SmallVector B;
  double s = 0.0;
};

/// Rough coefficient data (A, B, s) as a pure function of the point and the seed.
class CoefficientField {
 public:
  CoefficientField(int d, FieldRecipe recipe, EllipticityBounds bounds, std::uint64_t seed);

  int dim() const { return d_; }
  const FieldRecipe& recipe() const { return recipe_; }
  const EllipticityBounds& bounds() const { return bounds_; }
  std::uint64_t seed() const { return seed_; }
  /// Declared sup bound on |s|.
  double source_bound() const;
  bool has_drift() const;
  bool has_source() const;

  CoefficientSample evaluate(const KineticPoint& z) const;
  /// Cheaper evaluation of the source only.
  double source(const KineticPoint& z) const;

  /// Same field with the source multiplied by c.
  CoefficientField with_source_scale(double c) const;

 private:
  struct Mode {
    std::array<double, 2 * kMaxDim + 1> k{};
    double phase = 0.0;
    double amp = 0.0;
  };

  std::uint64_t cell_key(const KineticPoint& z) const;
  double smooth_value(int channel, const KineticPoint& z) const;
  void build_modes();

  int d_;
  FieldRecipe recipe_;
  EllipticityBounds bounds_;
  std::uint64_t seed_;
  // SmoothRandom/RotatingAnisotropy: channel -> Fourier modes.
  std::vector<std::vector<Mode>> channels_;
};

CoefficientField sample_field(int d, const FieldRecipe& recipe, const EllipticityBounds& bounds,
                              std::uint64_t seed);

struct CertReport {
  std::size_t samples = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double max_drift = 0.0;
  double max_source = 0.0;
  double max_asymmetry = 0.0;
  bool ok = true;
  /// "certified" or "violated".
  std::string verdict;
  std::string reason;
  std::optional<KineticPoint> witness;
};

/// Samples n points of the box [x_lo, x_hi]^d x [v_lo, v_hi]^d x [t_lo, t_hi]
/// quasi-randomly and checks every ellipticity bound.
struct SampleBox {
  double x_lo = -1.0, x_hi = 1.0;
  double v_lo = -1.0, v_hi = 1.0;
  double t_lo = 0.0, t_hi = 1.0;
};

CertReport certify_field(const CoefficientField& field, std::size_t n_samples, const SampleBox& box = {},
                         std::uint64_t seed = 1);

}  // namespace kfp
