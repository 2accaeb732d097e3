#include "halpern/solvers.hpp"

#include <limits>
#include <sstream>

#include "halpern/sampling.hpp"

namespace halpern {

std::string to_string(Method m) {
  switch (m) {
    case Method::km: return "km";
    case Method::halpern: return "halpern";
    case Method::stoch_km: return "stoch_km";
    case Method::stoch_halpern: return "stoch_halpern";
    case Method::stoch_halpern_lambda: return "stoch_halpern_lambda";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (auto m : {Method::km, Method::halpern, Method::stoch_km, Method::stoch_halpern,
                 Method::stoch_halpern_lambda}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool is_stochastic(Method m) {
  return m == Method::stoch_km || m == Method::stoch_halpern ||
         m == Method::stoch_halpern_lambda;
}

bool is_halpern(Method m) { return m != Method::km && m != Method::stoch_km; }

Point halpern_step(const Point& x0, const Point& t_val, double alpha) {
  require_same_dim(x0.dim(), t_val.dim(), "halpern_step");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("halpern_step: alpha must lie in (0, 1]");
  return Point(alpha * x0.vec() + (1.0 - alpha) * t_val.vec());
}

Point km_step(const Point& x, const Point& t_val, double alpha) {
  require_same_dim(x.dim(), t_val.dim(), "km_step");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("km_step: alpha must lie in (0, 1)");
  return Point((1.0 - alpha) * x.vec() + alpha * t_val.vec());
}

void check_config(const SolverConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigurationError("iteration count K must be >= 1");
  if (cfg.record_every < 1) throw ConfigurationError("record_every must be >= 1");

  if (cfg.method == Method::stoch_halpern_lambda) {
    if (!(cfg.lambda > 0.5 && cfg.lambda <= 0.75)) {
      std::ostringstream msg;
      msg << "stoch_halpern_lambda needs lambda in (1/2, 3/4], got " << cfg.lambda;
      throw ConfigurationError(msg.str());
    }
    const double bound = lambda_step_bound(cfg.lambda);
    for (std::uint64_t k = 0; k < cfg.iterations; ++k) {
      if (cfg.step.at(k) > bound) {
        std::ostringstream msg;
        msg << "step alpha_" << k << " = " << cfg.step.at(k)
            << " exceeds (2 lambda - 1)/(2 (1 - lambda)) = " << bound;
        throw ConfigurationError(msg.str());
      }
    }
  }
  if (!is_halpern(cfg.method)) {
    for (std::uint64_t k = 0; k < cfg.iterations; ++k) {
      const double a = cfg.step.at(k);
      if (!(a > 0.0 && a < 1.0)) {
        std::ostringstream msg;
        msg << "KM iterations need alpha_k in (0, 1); alpha_" << k << " = " << a;
        throw ConfigurationError(msg.str());
      }
    }
  }
}

namespace detail {

RunRecord run_unchecked(const Problem& problem, const SolverConfig& cfg,
                        const std::optional<Point>& x_star) {
  const auto& family = problem.family;
  const Vector& x0 = problem.x0.vec();
  if (x_star) require_same_dim(x0.size(), x_star->dim(), "run: reference point");

  const bool stochastic = is_stochastic(cfg.method);
  const bool anchored = is_halpern(cfg.method);
  const SeedStream stream(cfg.seed);
  const auto K = cfg.iterations;

  RunRecord record;
  record.seed = cfg.seed;
  record.iterations.reserve(K / cfg.record_every + 2);

  Vector x = x0;
  Vector t_val(x0.size());
  Vector mean_buf(x0.size());
  Vector next(x0.size());
  double best_f0 = std::numeric_limits<double>::infinity();

  for (std::uint64_t k = 0;; ++k) {
    const bool recorded = k % cfg.record_every == 0 || k == K;
    const double alpha = cfg.step.at(k);
    const std::uint64_t b = stochastic ? cfg.batch.at(k) : 0;

    if (recorded) {
      IterationRecord it;
      it.k = k;
      it.alpha = alpha;
      it.batch_size = b;
      family.mean(x, mean_buf);
      it.residual = (x - mean_buf).norm();
      it.f0_value = 0.5 * (x - x0).squaredNorm();
      if (x_star) it.dist_sq_to_oracle = (x - x_star->vec()).squaredNorm();
      if (k < K && it.f0_value < best_f0) {
        best_f0 = it.f0_value;
        record.min_f0_k = k;
      }
      record.iterations.push_back(it);
    }
    if (k == K) break;

    if (stochastic) {
      const auto draw = sample_batch(stream, k, family.size(), b);
      apply_mini_batch(family, draw, x, t_val);
      if (cfg.method == Method::stoch_halpern_lambda) {
        t_val = cfg.lambda * x + (1.0 - cfg.lambda) * t_val;
      }
    } else {
      family.mean(x, t_val);
    }

    if (anchored) {
      next.noalias() = alpha * x0 + (1.0 - alpha) * t_val;
    } else {
      next.noalias() = (1.0 - alpha) * x + alpha * t_val;
    }
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "iterate became non-finite at k = " << k + 1 << " (seed " << cfg.seed << ")";
      throw DivergenceError(msg.str(), cfg.seed, k + 1);
    }
    if (recorded) {
      auto& it = record.iterations.back();
      it.step_norm = (next - x).norm();
      if (x_star) it.batch_map_dist_sq = (t_val - x_star->vec()).squaredNorm();
    }
    x.swap(next);
  }
  record.final_point = Point(x);
  return record;
}

}  // namespace detail

RunRecord run(const Problem& problem, const SolverConfig& cfg,
              const std::optional<Point>& x_star) {
  check_config(cfg);
  return detail::run_unchecked(problem, cfg, x_star);
}

}  // namespace halpern
