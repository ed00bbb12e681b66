#include "kfp/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

#include "kfp/sampling.hpp"

namespace kfp {

void EllipticityBounds::validate() const {
  if (!(lambda > 0.0 && Lambda >= lambda && std::isfinite(Lambda))) {
    throw std::invalid_argument("ellipticity bounds must satisfy 0 < lambda <= Lambda");
  }
}

std::string to_string(Recipe r) {
  switch (r) {
    case Recipe::Constant: return "constant";
    case Recipe::Checkerboard: return "checkerboard";
    case Recipe::SmoothRandom: return "smooth_random";
    case Recipe::RotatingAnisotropy: return "rotating_anisotropy";
  }
  return "unknown";
}

Recipe recipe_from_string(const std::string& s) {
  if (s == "constant") return Recipe::Constant;
  if (s == "checkerboard") return Recipe::Checkerboard;
  if (s == "smooth_random") return Recipe::SmoothRandom;
  if (s == "rotating_anisotropy") return Recipe::RotatingAnisotropy;
  throw std::invalid_argument("unknown field recipe '" + s + "'");
}

void FieldRecipe::validate() const {
  if (!(cell_scale > 0.0)) throw std::invalid_argument("field recipe: cell_scale must be positive");
  for (double c : correlation) {
    if (!(c > 0.0)) throw std::invalid_argument("field recipe: correlation lengths must be positive");
  }
  if (modes < 1) throw std::invalid_argument("field recipe: modes must be >= 1");
  if (!(s_max >= 0.0)) throw std::invalid_argument("field recipe: s_max must be >= 0");
  if (!std::isfinite(s_const) || !std::isfinite(a_scale) || !std::isfinite(source_scale)) {
    throw std::invalid_argument("field recipe: non-finite parameter");
  }
}

namespace {

// Channel layout for the smooth recipes.
constexpr int kEigChannel = 0;             // d channels
constexpr int kRotChannel = kMaxDim;       // up to 3 channels
constexpr int kDriftChannel = 2 * kMaxDim; // d channels
constexpr int kSourceChannel = 3 * kMaxDim;
constexpr int kChannelCount = 3 * kMaxDim + 1;

SmallMatrix random_rotation(int d, CounterRng& rng) {
  SmallMatrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<SmallMatrix> qr(G);
  SmallMatrix Q = qr.householderQ();
  const SmallMatrix Rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (Rm(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

SmallMatrix symmetric_from(const SmallMatrix& Q, const SmallVector& mu) {
  SmallMatrix A = Q * mu.asDiagonal() * Q.transpose();
  return 0.5 * (A + A.transpose());
}

}  // namespace

CoefficientField::CoefficientField(int d, FieldRecipe recipe, EllipticityBounds bounds, std::uint64_t seed)
    : d_(d), recipe_(std::move(recipe)), bounds_(bounds), seed_(seed) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("coefficient field: d must be in [1, 3]");
  bounds_.validate();
  recipe_.validate();
  if (!recipe_.b_const.empty() && static_cast<int>(recipe_.b_const.size()) != d) {
    throw std::invalid_argument("coefficient field: b_const must have d entries");
  }
  build_modes();
}

void CoefficientField::build_modes() {
  if (recipe_.kind != Recipe::SmoothRandom && recipe_.kind != Recipe::RotatingAnisotropy) return;
  channels_.resize(kChannelCount);
  const int nvar = 2 * d_ + 1;
  const double amp = std::sqrt(2.0 / recipe_.modes);
  for (int c = 0; c < kChannelCount; ++c) {
    CounterRng rng(hash_combine(seed_, 0x5eed0000ULL + static_cast<std::uint64_t>(c)));
    for (int m = 0; m < recipe_.modes; ++m) {
      Mode mode;
      for (int j = 0; j < nvar; ++j) mode.k[j] = rng.normal();
      mode.phase = 2.0 * std::numbers::pi * rng.uniform();
      mode.amp = amp;
      channels_[c].push_back(mode);
    }
  }
}

double CoefficientField::smooth_value(int channel, const KineticPoint& z) const {
  const auto& corr = recipe_.correlation;
  std::array<double, 2 * kMaxDim + 1> u{};
  for (int i = 0; i < d_; ++i) {
    u[i] = z.x(i) / corr[0];
    u[d_ + i] = z.v(i) / corr[1];
  }
  u[2 * d_] = z.t() / corr[2];
  double g = 0.0;
  for (const Mode& m : channels_[channel]) {
    double arg = m.phase;
    for (int j = 0; j < 2 * d_ + 1; ++j) arg += m.k[j] * u[j];
    g += m.amp * std::cos(arg);
  }
  return g;
}

std::uint64_t CoefficientField::cell_key(const KineticPoint& z) const {
  const double l = recipe_.cell_scale;
  const double lx = l * l * l;
  const double lt = l * l;
  std::uint64_t key = mix64(seed_ ^ 0xc0ffee0ddf00dULL);
  for (int i = 0; i < d_; ++i) {
    key = hash_combine(key, static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(z.x(i) / lx))));
  }
  for (int i = 0; i < d_; ++i) {
    key = hash_combine(key, static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(z.v(i) / l))));
  }
  return hash_combine(key, static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(z.t() / lt))));
}

double CoefficientField::source_bound() const {
  return std::abs(recipe_.source_scale) * (std::abs(recipe_.s_const) + recipe_.s_max);
}

bool CoefficientField::has_drift() const {
  if (recipe_.drift == DriftMode::Random && recipe_.kind != Recipe::Constant) return true;
  return std::any_of(recipe_.b_const.begin(), recipe_.b_const.end(), [](double b) { return b != 0.0; });
}

bool CoefficientField::has_source() const { return source_bound() != 0.0; }

double CoefficientField::source(const KineticPoint& z) const {
  if (z.dim() != d_) throw std::invalid_argument("coefficient field: point dimension mismatch");
  const double scale = recipe_.source_scale;
  if (recipe_.s_max == 0.0) return scale * recipe_.s_const;
  switch (recipe_.kind) {
    case Recipe::Constant: return scale * recipe_.s_const;
    case Recipe::Checkerboard: {
      CounterRng rng(hash_combine(cell_key(z), 0x50));
      return scale * (recipe_.s_const + rng.uniform(-recipe_.s_max, recipe_.s_max));
    }
    case Recipe::SmoothRandom:
    case Recipe::RotatingAnisotropy:
      return scale * (recipe_.s_const + recipe_.s_max * std::tanh(smooth_value(kSourceChannel, z)));
  }
  return 0.0;
}

CoefficientSample CoefficientField::evaluate(const KineticPoint& z) const {
  if (z.dim() != d_) throw std::invalid_argument("coefficient field: point dimension mismatch");
  const int d = d_;
  const double lo = bounds_.lambda;
  const double hi = bounds_.Lambda;
  CoefficientSample out;
  out.A = SmallMatrix::Zero(d, d);
  out.B = SmallVector::Zero(d);

  switch (recipe_.kind) {
    case Recipe::Constant: {
      out.A = SmallMatrix::Identity(d, d) * (0.5 * (lo + hi));
      for (int i = 0; i < static_cast<int>(recipe_.b_const.size()); ++i) out.B(i) = recipe_.b_const[i];
      break;
    }
    case Recipe::Checkerboard: {
      CounterRng rng(cell_key(z));
      SmallVector mu(d);
      for (int i = 0; i < d; ++i) mu(i) = rng.uniform(lo, hi);
      if (d == 1) {
        out.A(0, 0) = mu(0);
      } else {
        out.A = symmetric_from(random_rotation(d, rng), mu);
      }
      if (recipe_.drift == DriftMode::Random) {
        CounterRng brng(hash_combine(cell_key(z), 0xb));
        SmallVector dir(d);
        for (int i = 0; i < d; ++i) dir(i) = brng.normal();
        const double nrm = dir.norm();
        const double radius = hi * std::pow(brng.uniform(), 1.0 / d);
        if (nrm > 0.0) out.B = dir * (radius / nrm);
      }
      break;
    }
    case Recipe::SmoothRandom:
    case Recipe::RotatingAnisotropy: {
      SmallVector mu(d);
      SmallMatrix Q = SmallMatrix::Identity(d, d);
      if (recipe_.kind == Recipe::SmoothRandom) {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int i = 0; i < d; ++i) mu(i) = std::clamp(mid + half * smooth_value(kEigChannel + i, z), lo, hi);
        if (d > 1) {
          SmallMatrix S = SmallMatrix::Zero(d, d);
          int c = 0;
          for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j, ++c) {
              const double a = 0.5 * smooth_value(kRotChannel + c, z);
              S(i, j) = a;
              S(j, i) = -a;
            }
          const SmallMatrix I = SmallMatrix::Identity(d, d);
          Q = (I - S).partialPivLu().solve(I + S);
        }
      } else {
        double phase = 2.0 * std::numbers::pi * to_unit(mix64(seed_ ^ 0x707));
        double arg = phase + z.t() / recipe_.correlation[2];
        for (int i = 0; i < d; ++i) arg += z.x(i) / recipe_.correlation[0] + z.v(i) / recipe_.correlation[1];
        const double theta = 2.0 * std::numbers::pi * arg;
        if (d == 1) {
          mu(0) = lo + (hi - lo) * 0.5 * (1.0 + std::sin(theta));
        } else {
          mu = SmallVector::Constant(d, lo);
          mu(0) = hi;
          Q(0, 0) = std::cos(theta);
          Q(0, 1) = -std::sin(theta);
          Q(1, 0) = std::sin(theta);
          Q(1, 1) = std::cos(theta);
        }
      }
      out.A = d == 1 ? SmallMatrix(mu.asDiagonal()) : symmetric_from(Q, mu);
      if (recipe_.drift == DriftMode::Random) {
        for (int i = 0; i < d; ++i) out.B(i) = 0.5 * hi * smooth_value(kDriftChannel + i, z) / std::sqrt(d);
        const double nrm = out.B.norm();
        if (nrm > hi) out.B *= hi / nrm;
      }
      break;
    }
  }
  if (recipe_.a_scale != 1.0) out.A *= recipe_.a_scale;
  out.s = source(z);
  return out;
}

CoefficientField CoefficientField::with_source_scale(double c) const {
  FieldRecipe r = recipe_;
  r.source_scale *= c;
  return CoefficientField(d_, r, bounds_, seed_);
}

CoefficientField sample_field(int d, const FieldRecipe& recipe, const EllipticityBounds& bounds,
                              std::uint64_t seed) {
  return CoefficientField(d, recipe, bounds, seed);
}

CertReport certify_field(const CoefficientField& field, std::size_t n_samples, const SampleBox& box,
                         std::uint64_t seed) {
  const int d = field.dim();
  const EllipticityBounds b = field.bounds();
  const double tol = 1e-12 * std::max(1.0, b.Lambda);
  CertReport rep;
  rep.samples = n_samples;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.max_eigenvalue = -std::numeric_limits<double>::infinity();
  const QuasiRandom qr(static_cast<std::size_t>(2 * d + 1), seed);
  std::array<double, 2 * kMaxDim + 1> u{};
  std::array<double, kMaxDim> x{}, v{};
  for (std::size_t i = 0; i < n_samples; ++i) {
    qr.point(i, std::span<double>(u.data(), 2 * d + 1));
    for (int k = 0; k < d; ++k) {
      x[k] = box.x_lo + (box.x_hi - box.x_lo) * u[k];
      v[k] = box.v_lo + (box.v_hi - box.v_lo) * u[d + k];
    }
    const KineticPoint z(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d),
                         box.t_lo + (box.t_hi - box.t_lo) * u[2 * d]);
    const CoefficientSample c = field.evaluate(z);
    Eigen::SelfAdjointEigenSolver<SmallMatrix> es(c.A, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    const double asym = (c.A - c.A.transpose()).cwiseAbs().maxCoeff();
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, emin);
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, emax);
    rep.max_drift = std::max(rep.max_drift, c.B.norm());
    rep.max_source = std::max(rep.max_source, std::abs(c.s));
    rep.max_asymmetry = std::max(rep.max_asymmetry, asym);
    if (rep.ok) {
      std::string why;
      if (emin < b.lambda - tol) why = "eigenvalue below lambda";
      else if (emax > b.Lambda + tol) why = "eigenvalue above Lambda";
      else if (asym > tol) why = "A not symmetric";
      else if (c.B.norm() > b.Lambda + tol) why = "|B| exceeds Lambda";
      else if (std::abs(c.s) > field.source_bound() + tol) why = "|s| exceeds its declared bound";
      if (!why.empty()) {
        rep.ok = false;
        rep.reason = why;
        rep.witness = z;
      }
    }
  }
  rep.verdict = rep.ok ? "certified" : "violated";
  return rep;
}

}  // namespace kfp
