#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "halpern/core.hpp"
#include "halpern/mappings.hpp"
#include "support.hpp"

using namespace halpern;
using testing_support::vec;

namespace {

// The two projections of R^1 onto (-inf, 0] and [1, inf).
MappingFamily two_rays() {
  return MappingFamily::custom(
      1, {[](const Vector& x, Vector& out) { out = x.cwiseMin(0.0); },
          [](const Vector& x, Vector& out) { out = x.cwiseMax(1.0); }});
}

}  // namespace

TEST_CASE("Point rejects non-finite and empty coordinates") {
  CHECK_THROWS_AS(Point(Vector(0)), DimensionError);
  CHECK_THROWS_AS((Point{1.0, std::numeric_limits<double>::quiet_NaN()}), DomainError);
  CHECK_THROWS_AS((Point{std::numeric_limits<double>::infinity()}), DomainError);
  const Point p{1.0, 2.0};
  CHECK(p.dim() == 2);
  CHECK(p[1] == 2.0);
  CHECK(Point::zeros(3) == (Point{0.0, 0.0, 0.0}));
}

TEST_CASE("f0_value") {
  CHECK(f0_value(Point{1.0, 2.0}, Point{1.0, 2.0}) == 0.0);
  CHECK(f0_value(Point{3.0, 4.0}, Point{0.0, 0.0}) == 12.5);
  CHECK(f0_value(Point{1.0, 2.0}, Point{1.0, 0.0}) == 2.0);
  CHECK_THROWS_AS(f0_value(Point{1.0}, Point{1.0, 0.0}), DimensionError);
}

TEST_CASE("f0_value is midpoint convex") {
  std::mt19937_64 rng(5);
  const Vector x0 = testing_support::gaussian(rng, 4);
  for (int t = 0; t < 200; ++t) {
    const Vector x = testing_support::gaussian(rng, 4, 3.0);
    const Vector y = testing_support::gaussian(rng, 4, 3.0);
    CHECK(f0_value(Vector(0.5 * (x + y)), x0) <=
          0.5 * (f0_value(x, x0) + f0_value(y, x0)) + 1e-12);
  }
}

TEST_CASE("exact mean of hand-evaluated families") {
  const auto fam = two_rays();
  CHECK(fam.kind() == FamilyKind::custom);
  CHECK(exact_mean_apply(fam, Point{0.5})[0] == 0.5);
  CHECK(exact_mean_apply(fam, Point{2.0})[0] == 1.0);
  CHECK(exact_mean_apply(fam, Point{-1.0})[0] == 0.0);
  CHECK_THROWS_AS(exact_mean_apply(fam, Point{1.0, 1.0}), DimensionError);

  const auto same = MappingFamily::custom(
      2, std::vector<MappingFamily::Component>(
             3, [](const Vector& x, Vector& out) { out = 0.5 * x + Vector::Ones(2); }));
  const Point x{4.0, -2.0};
  CHECK(exact_mean_apply(same, x) == same.component(0, x));
}

TEST_CASE("weighted_sum accumulates in the given order") {
  const auto fam = two_rays();
  std::vector<WeightedIndex> terms{{1, 0.25}, {0, 0.75}};
  Vector out;
  fam.weighted_sum(terms, vec({3.0}), out);
  CHECK(out[0] == doctest::Approx(0.75));
  CHECK_THROWS(fam.apply_component(2, vec({0.0}), out));
}

TEST_CASE("mean of built-in families is nonexpansive") {
  std::mt19937_64 rng(11);
  const auto proj = make_projection_family(testing_support::random_halfspaces(rng, 6, 3));
  const auto grad = make_gradient_family(testing_support::random_terms(rng, 5, 4, 3));
  for (const auto* fam : {&proj, &grad}) {
    Vector tx, ty;
    for (int t = 0; t < 1000; ++t) {
      const Vector x = testing_support::gaussian(rng, 3, 4.0);
      const Vector y = testing_support::gaussian(rng, 3, 4.0);
      fam->mean(x, tx);
      fam->mean(y, ty);
      REQUIRE((tx - ty).norm() <= (x - y).norm() + 1e-12);
    }
  }
}
