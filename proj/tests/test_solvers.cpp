#include <doctest.h>

#include "halpern/solvers.hpp"
#include "support.hpp"

using namespace halpern;
using testing_support::vec;

namespace {

SolverConfig config(Method m, StepSchedule step, std::uint64_t K,
                    BatchSchedule batch = BatchSchedule::constant(1)) {
  SolverConfig c;
  c.method = m;
  c.step = step;
  c.batch = batch;
  c.iterations = K;
  c.seed = 123;
  return c;
}

Problem single_set_problem() {
  return feasibility_problem({Halfspace(vec({1, 0}), 0.0)}, Point{1.0, 0.0});
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (auto m : {Method::km, Method::halpern, Method::stoch_km, Method::stoch_halpern,
                 Method::stoch_halpern_lambda}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_FALSE(parse_method("newton").has_value());
  CHECK(is_stochastic(Method::stoch_km));
  CHECK_FALSE(is_stochastic(Method::halpern));
  CHECK(is_halpern(Method::stoch_halpern_lambda));
  CHECK_FALSE(is_halpern(Method::km));
}

TEST_CASE("halpern_step") {
  CHECK(halpern_step(Point{1.0, 2.0}, Point{7.0, 7.0}, 1.0) == (Point{1.0, 2.0}));
  CHECK(halpern_step(Point{0.0, 0.0}, Point{2.0, 2.0}, 0.5) == (Point{1.0, 1.0}));
  CHECK(halpern_step(Point{3.0, -1.0}, Point{3.0, -1.0}, 0.37) == (Point{3.0, -1.0}));
  CHECK_THROWS_AS(halpern_step(Point{0.0}, Point{1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(halpern_step(Point{0.0}, Point{1.0}, 1.01), DomainError);
  CHECK_THROWS_AS(halpern_step(Point{0.0}, Point{1.0, 2.0}, 0.5), DimensionError);
}

TEST_CASE("km_step") {
  CHECK(km_step(Point{0.0, 0.0}, Point{2.0, 2.0}, 0.5) == (Point{1.0, 1.0}));
  CHECK(km_step(Point{4.0, 5.0}, Point{4.0, 5.0}, 0.3) == (Point{4.0, 5.0}));
  const Point x{0.0, 0.0}, t{1.0, 3.0};
  const Point out = km_step(x, t, 1e-3);
  CHECK((out.vec() - t.vec()).norm() < (x.vec() - t.vec()).norm());
  CHECK_THROWS_AS(km_step(x, t, 1.0), DomainError);
  CHECK_THROWS_AS(km_step(x, t, 0.0), DomainError);
}

TEST_CASE("check_config") {
  CHECK_THROWS_AS(check_config(config(Method::halpern, StepSchedule::poly(1), 0)),
                  ConfigurationError);
  auto c = config(Method::halpern, StepSchedule::poly(1), 10);
  c.record_every = 0;
  CHECK_THROWS_AS(check_config(c), ConfigurationError);

  // alpha_0 = 1 is fine for Halpern, not for KM.
  CHECK_NOTHROW(check_config(config(Method::halpern, StepSchedule::poly(0.5), 10)));
  CHECK_THROWS_AS(check_config(config(Method::km, StepSchedule::poly(0.5), 10)),
                  ConfigurationError);
  CHECK_THROWS_AS(check_config(config(Method::stoch_km, StepSchedule::constant(1.0), 10)),
                  ConfigurationError);
  CHECK_NOTHROW(check_config(config(Method::km, StepSchedule::constant(0.5), 10)));

  auto lam = config(Method::stoch_halpern_lambda, StepSchedule::lambda_poly(0.5, 0.6), 10);
  lam.lambda = 0.6;
  CHECK_NOTHROW(check_config(lam));
  lam.lambda = 0.9;
  CHECK_THROWS_AS(check_config(lam), ConfigurationError);
  lam.lambda = 0.5;
  CHECK_THROWS_AS(check_config(lam), ConfigurationError);
  lam.lambda = 0.6;
  lam.step = StepSchedule::poly(0.5);  // alpha_0 = 1 > 1/4
  CHECK_THROWS_AS(check_config(lam), ConfigurationError);
}

TEST_CASE("two Halpern steps by hand") {
  const auto p = single_set_problem();
  auto c = config(Method::halpern, StepSchedule::poly(1), 2);
  const auto rec = run(p, c);
  REQUIRE(rec.iterations.size() == 3);
  CHECK(rec.final_point == (Point{0.5, 0.0}));
  CHECK(rec.iterations[0].k == 0);
  CHECK(rec.iterations[0].residual == 1.0);
  CHECK(rec.iterations[0].f0_value == 0.0);
  CHECK(*rec.iterations[0].step_norm == 0.0);  // x_1 = x_0
  CHECK(rec.iterations[1].residual == 1.0);
  CHECK(*rec.iterations[1].step_norm == 0.5);
  CHECK_FALSE(rec.iterations[2].step_norm.has_value());
  CHECK(rec.iterations[2].residual == 0.5);
  CHECK(rec.seed == 123);
}

TEST_CASE("recording stride") {
  const auto p = single_set_problem();
  auto c = config(Method::halpern, StepSchedule::poly(1), 100);
  c.record_every = 7;
  const auto rec = run(p, c, Point{0.0, 0.0});
  CHECK(rec.iterations.size() == 15 + 1);  // 0, 7, ..., 98 and 100
  for (std::size_t i = 1; i < rec.iterations.size(); ++i)
    CHECK(rec.iterations[i].k > rec.iterations[i - 1].k);
  CHECK(rec.iterations.back().k == 100);
  for (const auto& it : rec.iterations) {
    CHECK(it.residual >= 0.0);
    CHECK(it.f0_value >= 0.0);
    REQUIRE(it.dist_sq_to_oracle.has_value());
    if (it.k < 100) CHECK(*it.batch_map_dist_sq >= 0.0);
  }
}

TEST_CASE("n = 1 stochastic runs match deterministic runs bit for bit") {
  const auto p = single_set_problem();
  const auto batch = BatchSchedule::exponential(2, 1.3).with_cap(1000);
  const auto hal = run(p, config(Method::halpern, StepSchedule::poly(0.7), 200));
  const auto shal = run(p, config(Method::stoch_halpern, StepSchedule::poly(0.7), 200, batch));
  const auto km = run(p, config(Method::km, StepSchedule::constant(0.3), 200));
  const auto skm = run(p, config(Method::stoch_km, StepSchedule::constant(0.3), 200, batch));
  for (std::size_t i = 0; i < hal.iterations.size(); ++i) {
    CHECK(hal.iterations[i].residual == shal.iterations[i].residual);
    CHECK(hal.iterations[i].f0_value == shal.iterations[i].f0_value);
    CHECK(km.iterations[i].residual == skm.iterations[i].residual);
  }
  CHECK(hal.final_point == shal.final_point);
  CHECK(km.final_point == skm.final_point);
}

TEST_CASE("lambda = 0 reduces the averaged method to stoch_halpern") {
  const auto p = testing_support::two_halfspace_problem();
  const auto batch = BatchSchedule::exponential(1, 1.2).with_cap(500);
  auto a = config(Method::stoch_halpern, StepSchedule::poly(0.5), 300, batch);
  auto b = a;
  b.method = Method::stoch_halpern_lambda;
  b.lambda = 0.0;
  CHECK_THROWS_AS(run(p, b), ConfigurationError);
  const auto ra = run(p, a);
  const auto rb = detail::run_unchecked(p, b, std::nullopt);
  CHECK(ra.final_point == rb.final_point);
  for (std::size_t i = 0; i < ra.iterations.size(); ++i)
    CHECK(ra.iterations[i].residual == rb.iterations[i].residual);
}

TEST_CASE("runs are deterministic given the seed") {
  const auto p = testing_support::two_halfspace_problem();
  const auto c = config(Method::stoch_halpern, StepSchedule::poly(0.5), 500,
                        BatchSchedule::exponential(2, 1.01));
  CHECK(run(p, c).final_point == run(p, c).final_point);
  auto d = c;
  d.seed = 124;
  CHECK_FALSE(run(p, c).final_point == run(p, d).final_point);
}

TEST_CASE("iterates stay inside the anchor ball for projection families") {
  // Each iterate is a convex combination of x0 and a point no farther from
  // x* than the previous iterate.
  const auto p = testing_support::two_halfspace_problem();
  const Point xs{1.0, 0.0};
  const double r0 = (p.x0.vec() - xs.vec()).squaredNorm();
  auto c = config(Method::stoch_halpern, StepSchedule::poly(0.5), 2000, BatchSchedule::constant(1));
  const auto rec = run(p, c, xs);
  for (const auto& it : rec.iterations) REQUIRE(*it.dist_sq_to_oracle <= r0 * (1 + 1e-12));
}

TEST_CASE("divergence aborts with the seed") {
  const auto blowup = MappingFamily::custom(1, {[](const Vector& x, Vector& out) { out = 3.0 * x; }});
  const Problem p(blowup, Point{1.0});
  auto c = config(Method::halpern, StepSchedule::poly(1), 5000);
  c.seed = 99;
  try {
    run(p, c);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.seed() == 99);
    CHECK(e.iteration() > 100);
    CHECK(e.iteration() < 5000);
  }
}
