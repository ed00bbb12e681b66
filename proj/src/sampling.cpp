#include "kfp/sampling.hpp"

#include <cmath>
#include <numbers>

namespace kfp {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (mix64(value) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

QuasiRandom::QuasiRandom(std::size_t dim, std::uint64_t seed) : alpha_(dim), shift_(dim) {
  // phi_d is the unique positive root of x^{d+1} = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(dim + 1));
  CounterRng rng(mix64(seed ^ 0x51ed270b27f5a3c1ULL));
  for (std::size_t j = 0; j < dim; ++j) {
    alpha_[j] = std::fmod(1.0 / std::pow(phi, static_cast<double>(j + 1)), 1.0);
    shift_[j] = seed == 0 ? 0.5 : rng.uniform();
  }
}

void QuasiRandom::point(std::size_t i, std::span<double> out) const {
  const double n = static_cast<double>(i + 1);
  for (std::size_t j = 0; j < alpha_.size(); ++j) {
    double u = shift_[j] + n * alpha_[j];
    out[j] = u - std::floor(u);
  }
}

void cube_to_ball(std::span<const double> u, double radius, std::span<double> out) {
  double sup = 0.0;
  double two = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double c = 2.0 * u[j] - 1.0;
    out[j] = c;
    sup = std::max(sup, std::abs(c));
    two += c * c;
  }
  if (two == 0.0) return;
  const double stretch = radius * sup / std::sqrt(two);
  for (std::size_t j = 0; j < u.size(); ++j) out[j] *= stretch;
}

}  // namespace kfp
