#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "halpern/core.hpp"
#include "halpern/problem.hpp"
#include "halpern/schedules.hpp"

namespace halpern {

enum class Method { km, halpern, stoch_km, stoch_halpern, stoch_halpern_lambda };

std::string to_string(Method m);
std::optional<Method> parse_method(const std::string& name);
bool is_stochastic(Method m);
bool is_halpern(Method m);

struct SolverConfig {
  Method method = Method::stoch_halpern;
  double lambda = 0.75;  ///< only read by stoch_halpern_lambda
  StepSchedule step = StepSchedule::poly(0.5);
  BatchSchedule batch = BatchSchedule::constant(1);
  std::uint64_t iterations = 1;  ///< K
  std::uint64_t seed = 0;
  std::uint64_t record_every = 1;
};

/// Schedule/method incompatibility detected before iterating.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterate left the finite reals.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::uint64_t seed, std::uint64_t k)
      : std::runtime_error(what), seed_(seed), k_(k) {}
  std::uint64_t seed() const { return seed_; }
  std::uint64_t iteration() const { return k_; }

 private:
  std::uint64_t seed_;
  std::uint64_t k_;
};

/// alpha * x0 + (1 - alpha) * t_val, alpha in (0, 1].
Point halpern_step(const Point& x0, const Point& t_val, double alpha);
/// (1 - alpha) * x + alpha * t_val, alpha in (0, 1).
Point km_step(const Point& x, const Point& t_val, double alpha);

/// Throws ConfigurationError when the method cannot run with these settings.
void check_config(const SolverConfig& cfg);

/// Runs exactly cfg.iterations steps and records k in {0, s, 2s, ...} below K
/// plus K itself (s = record_every). `x_star`, when given, is the reference
/// point for distance and f0 diagnostics.
RunRecord run(const Problem& problem, const SolverConfig& cfg,
              const std::optional<Point>& x_star = std::nullopt);

namespace detail {
/// run() without check_config. Test use only.
RunRecord run_unchecked(const Problem& problem, const SolverConfig& cfg,
                        const std::optional<Point>& x_star);
}  // namespace detail

}  // namespace halpern
