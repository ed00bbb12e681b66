#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "kfp/field.hpp"
#include "kfp/sampling.hpp"

using namespace kfp;

namespace {

KineticPoint random_point(CounterRng& rng, int d, double span) {
  std::array<double, kMaxDim> x{}, v{};
  for (int i = 0; i < d; ++i) {
    x[i] = rng.uniform(-span, span);
    v[i] = rng.uniform(-span, span);
  }
  return KineticPoint(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d),
                      rng.uniform(-span, span));
}

FieldRecipe recipe_of(Recipe r, DriftMode drift = DriftMode::Zero) {
  FieldRecipe out;
  out.kind = r;
  out.drift = drift;
  return out;
}

}  // namespace

TEST_CASE("every recipe respects the ellipticity bounds pointwise") {
  const EllipticityBounds b{0.3, 2.5};
  for (int d = 1; d <= 3; ++d) {
    for (Recipe r : {Recipe::Constant, Recipe::Checkerboard, Recipe::SmoothRandom, Recipe::RotatingAnisotropy}) {
      FieldRecipe rec = recipe_of(r, DriftMode::Random);
      rec.s_max = 0.4;
      rec.s_const = 0.1;
      const CoefficientField field(d, rec, b, 99);
      CounterRng rng(static_cast<std::uint64_t>(d * 10 + static_cast<int>(r)));
      for (int k = 0; k < 400; ++k) {
        const KineticPoint z = random_point(rng, d, 3.0);
        const CoefficientSample c = field.evaluate(z);
        Eigen::MatrixXd A = c.A;
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        // Rayleigh quotients on random directions stay inside [lambda, Lambda].
        for (int t = 0; t < 4; ++t) {
          Eigen::VectorXd xi(d);
          for (int i = 0; i < d; ++i) xi(i) = rng.normal();
          const double rq = xi.dot(A * xi) / xi.squaredNorm();
          CHECK(rq >= b.lambda - 1e-12);
          CHECK(rq <= b.Lambda + 1e-12);
        }
        CHECK(c.B.norm() <= b.Lambda + 1e-12);
        CHECK(std::abs(c.s) <= field.source_bound() + 1e-12);
      }
    }
  }
}

TEST_CASE("fields are pure functions of point and seed") {
  const EllipticityBounds b{0.5, 2.0};
  const CoefficientField f1(2, recipe_of(Recipe::SmoothRandom, DriftMode::Random), b, 7);
  const CoefficientField f2(2, recipe_of(Recipe::SmoothRandom, DriftMode::Random), b, 7);
  const CoefficientField f3(2, recipe_of(Recipe::SmoothRandom, DriftMode::Random), b, 8);
  const KineticPoint z({0.1, -0.2}, {0.3, 0.4}, 0.5);
  CHECK(f1.evaluate(z).A == f2.evaluate(z).A);
  CHECK(f1.evaluate(z).B == f2.evaluate(z).B);
  CHECK(f1.evaluate(z).A != f3.evaluate(z).A);
}

TEST_CASE("checkerboard is constant on kinetic cells") {
  FieldRecipe rec = recipe_of(Recipe::Checkerboard);
  rec.cell_scale = 0.5;  // cells 1/8 x 1/2 x 1/4 in (x, v, t)
  const CoefficientField field(1, rec, EllipticityBounds{0.5, 2.0}, 3);
  const KineticPoint a({0.01}, {0.01}, 0.01);
  const KineticPoint b({0.12}, {0.49}, 0.24);
  const KineticPoint c({0.13}, {0.01}, 0.01);
  CHECK(field.evaluate(a).A == field.evaluate(b).A);
  CHECK(field.evaluate(a).A != field.evaluate(c).A);
}

TEST_CASE("constant recipe is the midpoint multiple of the identity") {
  FieldRecipe rec;
  rec.b_const = {0.25, -0.5};
  const CoefficientField field(2, rec, EllipticityBounds{1.0, 3.0}, 1);
  const CoefficientSample c = field.evaluate(KineticPoint::origin(2));
  CHECK(c.A(0, 0) == 2.0);
  CHECK(c.A(1, 1) == 2.0);
  CHECK(c.A(0, 1) == 0.0);
  CHECK(c.B(1) == -0.5);
  CHECK(field.has_drift());
  CHECK_FALSE(field.has_source());
}

TEST_CASE("source scaling multiplies the source only") {
  FieldRecipe rec = recipe_of(Recipe::Checkerboard);
  rec.s_max = 1.0;
  const CoefficientField f(2, rec, EllipticityBounds{0.5, 2.0}, 11);
  const CoefficientField g = f.with_source_scale(3.0);
  const KineticPoint z({0.3, 0.1}, {-0.2, 0.7}, 0.4);
  CHECK(g.source(z) == doctest::Approx(3.0 * f.source(z)));
  CHECK(g.evaluate(z).A == f.evaluate(z).A);
  CHECK(g.source_bound() == doctest::Approx(3.0));
}

TEST_CASE("certification accepts valid fields and rejects corrupted ones") {
  const EllipticityBounds b{0.5, 2.0};
  for (Recipe r : {Recipe::Checkerboard, Recipe::SmoothRandom, Recipe::RotatingAnisotropy}) {
    const CoefficientField ok(2, recipe_of(r, DriftMode::Random), b, 5);
    const CertReport rep = certify_field(ok, 2000);
    CHECK(rep.ok);
    CHECK(rep.verdict == "certified");
    CHECK(rep.min_eigenvalue >= b.lambda - 1e-12);
    CHECK(rep.max_eigenvalue <= b.Lambda + 1e-12);
  }
  FieldRecipe bad = recipe_of(Recipe::Checkerboard);
  bad.a_scale = 0.1;
  const CertReport rep = certify_field(CoefficientField(2, bad, b, 5), 2000);
  CHECK_FALSE(rep.ok);
  CHECK(rep.verdict == "violated");
  CHECK(rep.reason == "eigenvalue below lambda");
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->dim() == 2);
}

TEST_CASE("recipe and bounds validation") {
  CHECK_THROWS_AS((EllipticityBounds{2.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((EllipticityBounds{0.0, 1.0}.validate()), std::invalid_argument);
  CHECK(recipe_from_string(to_string(Recipe::RotatingAnisotropy)) == Recipe::RotatingAnisotropy);
  CHECK_THROWS(recipe_from_string("plaid"));
  CHECK_THROWS(CoefficientField(2, FieldRecipe{}, EllipticityBounds{1.0, 1.0}, 1).evaluate(KineticPoint::origin(1)));
}
