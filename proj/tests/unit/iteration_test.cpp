#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "kfp/iteration.hpp"

using namespace kfp;

TEST_CASE("closed-form exponent sum equals direct summation") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> alpha_dist(0.05, 1.6);
  std::uniform_int_distribution<int> n_dist(1, 40);
  for (int i = 0; i < 200; ++i) {
    const double a = alpha_dist(rng);
    const int n = n_dist(rng);
    const double direct = exponent_sum_direct(a, n);
    CAPTURE(a);
    CAPTURE(n);
    CHECK(std::abs(exponent_sum(a, n).value - direct) <= 1e-12 * direct);
  }
  const ExponentSum one = exponent_sum(1.0, 10);
  CHECK(one.alpha_is_one);
  CHECK(one.value == 55.0);
  CHECK(exponent_sum_direct(1.0, 10) == 55.0);
  CHECK(exponent_sum(1.0 + 1e-9, 10).value == doctest::Approx(55.0).epsilon(1e-6));
  CHECK_THROWS_AS(exponent_sum(2.0, 0), std::invalid_argument);
}

TEST_CASE("exact exponents") {
  CHECK(sobolev_p(3) == 42.0 / 19.0);
  CHECK(sobolev_p(1) == 18.0 / 7.0);
  CHECK(holder_alpha(0.5, 0.25) == 1.0 / 3.0);
  CHECK(kappa_exponent(-2.0, 3) == -2.0);
  CHECK(kappa_exponent(-3.0, 3) == -7.0);
  CHECK(kappa_exponent(0.0, 3) == 4.0);
  CHECK(degiorgi_alpha(2.0, 4.0) == 0.5);
  CHECK_THROWS_AS(holder_alpha(1.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(kappa_exponent(-3.5, 3), std::invalid_argument);
}

TEST_CASE("De Giorgi bound dominates the recursion") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double beta = 1.0 + 4.0 * u(rng);
    const double alpha = 1.05 + 2.0 * u(rng);
    const double V0 = std::exp(-10.0 * u(rng));
    const DeGiorgiReport r = degiorgi_threshold(beta, alpha, V0, 25);
    CHECK(r.bound_dominates);
    CHECK(r.log_bound.size() == 26);
    CHECK(r.converges == (r.gamma_threshold < 1.0));
    if (r.converges) CHECK(r.log_direct.back() < r.log_direct.front());
  }
  const DeGiorgiReport half = degiorgi_threshold(1.0, 2.0, 0.5, 8);
  CHECK(half.gamma_threshold == 0.5);
  CHECK(half.converges);
  for (int n = 0; n <= 8; ++n) CHECK(half.log_direct[n] == doctest::Approx(std::ldexp(1.0, n) * std::log(0.5)));
  // beta^{alpha/(alpha-1)^2} = 4^6, so V0 = 1.01 / 4096 puts Gamma just above 1.
  const DeGiorgiReport edge = degiorgi_threshold(4.0, 1.5, 1.01 / 4096.0, 8);
  CHECK(edge.gamma_threshold == doctest::Approx(1.01));
  CHECK(edge.verdict == "no conclusion");
  const DeGiorgiReport big = degiorgi_threshold(2.0, 1.5, 1.0, 10);
  CHECK_FALSE(big.converges);
  CHECK(big.verdict == "no conclusion");
  const DeGiorgiReport zero = degiorgi_threshold(2.0, 1.5, 0.0, 5);
  CHECK(zero.converges);
  CHECK(std::isinf(zero.log_direct.back()));
}

TEST_CASE("Moser product converges") {
  const MoserReport r = moser_product(4.0, 2.0, 1.0, 60);
  REQUIRE(r.partial.size() == 60);
  CHECK(std::abs(r.partial[59] - r.partial[29]) < 1e-6);
  CHECK(r.cauchy_gap == std::abs(r.partial[59] - r.partial[29]));
  for (std::size_t k = 1; k < r.partial.size(); ++k) CHECK(r.partial[k] >= r.partial[k - 1]);
  // Direct product oracle with q_k = 2^k.
  double prod = 1.0;
  for (int k = 1; k <= 60; ++k) prod *= std::pow(2.0 * std::pow(k, 4.0), 1.0 / std::pow(2.0, k));
  CHECK(r.limit_estimate == doctest::Approx(prod).epsilon(1e-12));
}

TEST_CASE("Moser exponents follow the Sobolev gain") {
  // p = 42/19 at d = 3 gives q_n = (21/19)^n.
  const double p = sobolev_p(3);
  const MoserReport r = moser_product(p, 3.0, 0.5, 12);
  double log_pi = 0.0;
  for (int k = 1; k <= 12; ++k) {
    log_pi += std::log(3.0 * 0.25 * std::pow(k, 4.0)) / std::pow(21.0 / 19.0, k);
    CHECK(r.partial[k - 1] == doctest::Approx(std::exp(log_pi)).epsilon(1e-12));
  }
}

TEST_CASE("gain and propagation constants") {
  CHECK(gain_constant(1.0, 0.5) == doctest::Approx(4.0 / 3.0 + 8.0 / 7.0 + 5.0).epsilon(1e-15));
  CHECK_THROWS_AS(gain_constant(0.5, 0.5), std::invalid_argument);
  CHECK(propagation_constant(0.5, 2.0) == doctest::Approx(0.1875));
}
