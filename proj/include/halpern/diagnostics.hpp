#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "halpern/core.hpp"
#include "halpern/mappings.hpp"
#include "halpern/problem.hpp"
#include "halpern/schedules.hpp"
#include "halpern/solvers.hpp"

namespace halpern {

enum class OracleMethod { dykstra, normal_equations };

std::string to_string(OracleMethod m);

/// x* = P_Fix(T)(x0) computed without running any of the solvers.
struct OracleResult {
  Point x_star;
  double residual_at_star = 0.0;
  OracleMethod method = OracleMethod::dykstra;
  std::uint64_t iterations_used = 0;        ///< Dykstra sweeps
  std::optional<double> condition_number;   ///< normal equations
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projection of x0 onto the intersection of the halfspaces by Dykstra's
/// algorithm. Stops once a sweep moves the iterate by less than 1e-12, or
/// fails after 10^6 sweeps. residual_at_star is the largest distance from x*
/// to any of the halfspaces.
OracleResult oracle_feasibility(const std::vector<Halfspace>& halfspaces, const Point& x0);

/// Unique minimizer of sum_i f_i from the normal equations
/// (sum A_i^T A_i) x = sum A_i^T b_i. residual_at_star is the relative
/// residual of that system.
OracleResult oracle_quadratic(const std::vector<QuadraticTerm>& terms, const Point& x0);

/// Dispatches on problem.oracle_info; throws OracleError when it is absent.
OracleResult oracle_for(const Problem& problem);

/// `count` points uniform in the ball of radius 2 ||x0 - x*|| around x*,
/// preceded by x* and x0 themselves.
std::vector<Point> probe_points(const Point& x_star, const Point& x0, std::size_t count,
                                std::uint64_t seed);

/// max over probes of (1/n) sum_i ||T_i(x) - T(x)||^2.
double estimate_sigma_sq(const MappingFamily& family, const std::vector<Point>& probes);

struct EnsembleOptions {
  /// Reference point; computed with oracle_for when unset.
  std::optional<Point> x_star;
  /// Worker threads; unset reads HALPERN_THREADS (default 1).
  std::optional<unsigned> threads;
};

/// Thread count from HALPERN_THREADS, 1 when unset or malformed.
unsigned threads_from_env();

/// Runs `trials` seeded runs (trial i uses SeedStream(cfg.seed).trial(i))
/// and aggregates each recorded k in trial order. Throws DivergenceError with
/// the offending trial seed.
EnsembleStats ensemble(const Problem& problem, const SolverConfig& cfg, std::size_t trials,
                       const EnsembleOptions& options = {});

/// Least-squares slope of log(y) against log(x). Needs >= 2 points with
/// x > 0 and y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(running-min |mean f0 gap|) against log k over rows with
/// k in [k_lo, k_hi]. The running minimum starts at the first row.
double fit_rate(const EnsembleStats& stats, std::size_t k_lo, std::size_t k_hi);

/// Rate the theory predicts for min_k E[f0(x_k)] - f0* with
/// alpha_k proportional to (k+1)^-a.
struct PredictedRate {
  double exponent = 0.0;     ///< power of K
  bool log_factor = false;   ///< extra log K in the numerator
  bool inverse_log = false;  ///< 1/log K (a = 1)
  std::string text;
};

std::optional<PredictedRate> predicted_rate(const StepSchedule& step);

struct TheoremConstants {
  double sigma_sq_hat = 0.0;
  double dist0_sq = 0.0;  ///< ||x0 - x*||^2
  double M = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;
  std::optional<double> B;  ///< absent for constant batches
};

TheoremConstants theorem_constants(const Problem& problem, const OracleResult& oracle,
                                   double sigma_sq, const BatchSchedule& batch);

/// Right-hand side of the rate bound, minus f0*:
/// (||x0 - x*||^2 + M3 sum alpha^2 + sigma^2 sum 1/b) / (2 sum alpha),
/// sums over k in [0, K-1].
double theorem2_gap_bound(const TheoremConstants& c, const StepSchedule& step,
                          const BatchSchedule& batch, std::uint64_t K);

}  // namespace halpern
