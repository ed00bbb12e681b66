#pragma once

// Independent brute-force evaluation of the Landau coefficient sums at one
// node, in long double, straight from the integral formulas:
//   A(v) = a sum_u h^d f(u) (|w|^2 I - w w^T) |w|^gamma,  w = v - u, w != 0
//   B(v) = b sum_u h^d f(u) w |w|^gamma
// Zero padding only.

#include <cmath>
#include <vector>

#include "kfp/landau.hpp"

namespace kfp_oracle {

struct BruteCoefficients {
  std::vector<long double> A;  // d*d row-major
  std::vector<long double> B;
};

inline BruteCoefficients landau_brute(const kfp::VelocityGridFunction& f, const kfp::LandauParams& p,
                                      const std::vector<int>& node) {
  const auto& g = f.grid;
  const int d = g.d;
  const long double h = g.h();
  const long double hd = std::pow(h, static_cast<long double>(d));
  BruteCoefficients out{std::vector<long double>(d * d, 0.0L), std::vector<long double>(d, 0.0L)};
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.values[k] == 0.0) continue;
    g.unflatten(k, idx);
    std::vector<long double> w(d);
    long double r2 = 0.0L;
    for (int j = 0; j < d; ++j) {
      w[j] = (node[j] - idx[j]) * h;
      r2 += w[j] * w[j];
    }
    if (r2 == 0.0L) continue;
    const long double rg = std::pow(std::sqrt(r2), static_cast<long double>(p.gamma));
    const long double fk = f.values[k];
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        out.A[i * d + j] += p.a_const * hd * fk * ((i == j ? r2 : 0.0L) - w[i] * w[j]) * rg;
      }
      out.B[i] += p.b_const * hd * fk * w[i] * rg;
    }
  }
  return out;
}

}  // namespace kfp_oracle
