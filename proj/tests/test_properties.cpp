// Ensemble-level invariants on the two-halfspace benchmark.
#include <doctest.h>

#include <cmath>

#include "halpern/config.hpp"
#include "halpern/experiment.hpp"

using namespace halpern;

namespace {

struct Bench {
  ExperimentSetup setup;
  EnsembleStats stats;
};

const Bench& bench() {
  static const Bench b = [] {
    auto cfg = load_config(std::string(HALPERN_CONFIG_DIR) + "/twohalf_stoch_halpern.cfg");
    cfg.solver.record_every = 1;
    auto setup = prepare_experiment(cfg);
    EnsembleOptions opt;
    opt.x_star = setup.oracle.x_star;
    auto stats = ensemble(setup.problem, cfg.solver, cfg.trials, opt);
    return Bench{std::move(setup), std::move(stats)};
  }();
  return b;
}

const EnsembleRow& row(std::size_t k) {
  const auto& r = bench().stats.rows.at(k);
  REQUIRE(r.k == k);
  return r;
}

}  // namespace

TEST_CASE("sampled maps stay within M + sigma^2") {
  const auto& c = bench().setup.constants;
  const auto& rows = bench().stats.rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& b = rows[i].batch_map_dist_sq;
    REQUIRE(b.mean <= c.M + c.sigma_sq_hat + 3.0 * b.se);
  }
}

TEST_CASE("successive differences vanish") {
  const std::size_t K = bench().stats.rows.back().k;
  REQUIRE(K == 10000);
  const double early = row((K + 9) / 10).step_norm.mean;
  const double late = row(K - 1).step_norm.mean;
  MESSAGE("E||x_{k+1} - x_k||: " << early << " at K/10, " << late << " at K-1");
  CHECK(late < 0.2 * early);
  CHECK(std::isnan(bench().stats.rows.back().step_norm.mean));
}

TEST_CASE("without the batch cap the successive differences vanish faster") {
  // Same benchmark with the 2^16 cap removed: the sampling noise keeps
  // shrinking after k ~ 975 instead of tracking dist(x_k, x*) alone.
  auto cfg = load_config(std::string(HALPERN_CONFIG_DIR) + "/twohalf_stoch_halpern.cfg");
  cfg.solver.record_every = 1;
  cfg.solver.batch = BatchSchedule::exponential(4, 1.01);
  EnsembleOptions opt;
  opt.x_star = bench().setup.oracle.x_star;
  const auto stats = ensemble(bench().setup.problem, cfg.solver, cfg.trials, opt);
  const double early = stats.rows.at(1000).step_norm.mean;
  const double late = stats.rows.at(9999).step_norm.mean;
  MESSAGE("uncapped E||x_{k+1} - x_k||: " << early << " at K/10, " << late << " at K-1");
  CHECK(late < 0.2 * early);
}

TEST_CASE("residual drops at least fivefold from k = 100 to k = 10^4") {
  const double r100 = row(100).residual.mean;
  const double rK = row(10000).residual.mean;
  MESSAGE("residual " << r100 << " -> " << rK);
  CHECK(r100 >= 5.0 * rK);
}
