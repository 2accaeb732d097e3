#include "halpern/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace halpern {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    if (i) s += ", ";
    s += fmt17(p[i]);
  }
  return s + ")";
}

std::string fmt_scan(const ConditionScan& s) {
  std::ostringstream os;
  if (s.holds_everywhere) {
    os << "holds for all k (k0 = 0)";
  } else if (s.k0) {
    os << "holds from k0 = " << *s.k0 << " (first violation at k = " << *s.first_violation << ")";
  } else {
    os << "never within horizon (violated at k = K-1)";
  }
  return os.str();
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string problem_line(const ProblemSpec& p, const Problem& built) {
  std::ostringstream os;
  switch (p.family) {
    case ProblemFamily::halfspaces: os << "halfspaces"; break;
    case ProblemFamily::random_halfspaces: os << "random_halfspaces"; break;
    case ProblemFamily::quadratic: os << "quadratic"; break;
    case ProblemFamily::random_quadratic: os << "random_quadratic"; break;
  }
  os << " n = " << built.family.size() << " dim = " << built.family.dim();
  if (p.family == ProblemFamily::random_halfspaces || p.family == ProblemFamily::random_quadratic)
    os << " data_seed = " << p.data_seed;
  return os.str();
}

void write_header(std::ostream& out, const ExperimentConfig& cfg, const ExperimentSetup& p) {
  const auto& s = cfg.solver;
  out << "config: " << cfg.source << "\n"
      << "problem: " << problem_line(cfg.problem, p.problem) << "\n"
      << "x0: " << fmt_point(p.problem.x0) << "\n"
      << "method: " << to_string(s.method);
  if (s.method == Method::stoch_halpern_lambda) out << " lambda = " << s.lambda;
  out << "\n"
      << "step: " << s.step.describe() << "\n";
  if (is_stochastic(s.method)) out << "batch: " << s.batch.describe() << "\n";
  out << "K: " << s.iterations << "\n"
      << "record_every: " << s.record_every << "\n"
      << "trials: " << cfg.trials << "\n"
      << "seed: " << s.seed << "\n\n";

  out << "[oracle]\n"
      << "method: " << to_string(p.oracle.method) << "\n"
      << "x_star: " << fmt_point(p.oracle.x_star) << "\n"
      << "residual_at_star: " << fmt17(p.oracle.residual_at_star) << "\n";
  if (p.oracle.method == OracleMethod::dykstra)
    out << "sweeps: " << p.oracle.iterations_used << "\n";
  if (p.oracle.condition_number) out << "condition_number: " << fmt17(*p.oracle.condition_number) << "\n";
  out << "f0_star: " << fmt17(f0_value(p.oracle.x_star, p.problem.x0)) << "\n\n";

  const auto& c = p.constants;
  out << "[theorem constants]\n"
      << "sigma_sq_hat: " << fmt17(c.sigma_sq_hat) << " (max over " << p.probe_count
      << " probes in the ball of radius 2 ||x0 - x*|| around x*)\n"
      << "dist0_sq: " << fmt17(c.dist0_sq) << "\n"
      << "M: " << fmt17(c.M) << "\n"
      << "M1: " << fmt17(c.M1) << "\n"
      << "M2: " << fmt17(c.M2) << "\n"
      << "M3: " << fmt17(c.M3) << "\n";
  if (!is_stochastic(s.method)) {
    out << "B: not applicable (deterministic method)\n";
  } else if (c.B) {
    out << "B: " << fmt17(*c.B) << "\n";
  } else {
    out << "B: undefined (" << (s.batch.kind() == BatchSchedule::Kind::constant
                                    ? "constant batch"
                                    : "polynomial batch with c <= 1")
        << ")\n";
  }
  if (s.method == Method::stoch_halpern_lambda) {
    out << "gap_bound_at_K: " << fmt17(theorem2_gap_bound(c, s.step, s.batch, s.iterations))
        << "\n";
  }
  out << "\n";
}

/// Runs `body`, mapping exceptions to exit codes.
template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const OracleError& e) {
    log << "error: " << e.what() << "\n";
    return kExitOracle;
  } catch (const DivergenceError& e) {
    log << "error: run diverged: " << e.what() << " [seed " << e.seed() << "]\n";
    return kExitDiverged;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg) {
  Problem problem = build_problem(cfg.problem);
  OracleResult oracle = oracle_for(problem);
  const auto probes = probe_points(oracle.x_star, problem.x0, cfg.probes, cfg.solver.seed);
  const double sigma = estimate_sigma_sq(problem.family, probes);
  auto constants = theorem_constants(problem, oracle, sigma, cfg.solver.batch);
  return ExperimentSetup{std::move(problem), std::move(oracle), constants, probes.size()};
}

ValidationReport validate_config(const SolverConfig& cfg) {
  std::optional<double> lambda;
  if (cfg.method == Method::stoch_halpern_lambda) lambda = cfg.lambda;
  return validate(cfg.step, cfg.batch, cfg.iterations, lambda);
}

std::vector<ConditionCheck> method_conditions(const SolverConfig& cfg,
                                              const ValidationReport& r) {
  const auto& c = r.certified;
  std::vector<ConditionCheck> out;
  auto add = [&](const char* name, bool holds) { out.push_back({name, holds}); };
  const bool stoch = is_stochastic(cfg.method);

  switch (cfg.method) {
    case Method::km:
    case Method::stoch_km:
      add("sum alpha_k (1 - alpha_k) = inf", c.step_km_sum_diverges);
      if (stoch) add("sum 1/sqrt(b_k) < inf", c.inv_sqrt_batch_summable);
      break;
    case Method::halpern:
    case Method::stoch_halpern:
      add("alpha_k -> 0", c.step_vanishes);
      add("sum alpha_k = inf", c.step_sum_diverges);
      add("sum |alpha_{k+1} - alpha_k| < inf", c.step_variation_finite);
      if (stoch) {
        add("1/b_k <= alpha_k^2 from some k0", r.one_over_b_le_alpha_sq.k0.has_value());
        add("sum 1/sqrt(b_k) < inf", c.inv_sqrt_batch_summable);
      }
      break;
    case Method::stoch_halpern_lambda:
      add("1/b_k <= alpha_k from some k0", r.one_over_b_le_alpha.k0.has_value());
      add("alpha_k <= (2 lambda - 1)/(2 (1 - lambda))",
          r.alpha_le_lambda_bound && r.alpha_le_lambda_bound->holds_everywhere);
      add("sum alpha_k = inf", c.step_sum_diverges);
      add("sum 1/b_k < inf", c.inv_batch_summable);
      break;
  }
  return out;
}

void write_validation(std::ostream& out, const SolverConfig& cfg, const ValidationReport& r,
                      const std::vector<ConditionCheck>& checks) {
  out << "[validation]\n"
      << "horizon K: " << r.horizon << "\n";
  if (is_stochastic(cfg.method)) {
    out << "1/b_k <= alpha_k: " << fmt_scan(r.one_over_b_le_alpha) << "\n"
        << "1/b_k <= alpha_k^2: " << fmt_scan(r.one_over_b_le_alpha_sq) << "\n";
  }
  if (r.alpha_le_lambda_bound) {
    out << "alpha_k <= " << fmt17(*r.lambda_bound) << ": " << fmt_scan(*r.alpha_le_lambda_bound)
        << "\n";
  }
  out << "sum alpha_k: " << fmt17(r.step_sum) << "\n";
  if (r.step_sum_lower_bound) out << "  closed-form lower bound: " << fmt17(*r.step_sum_lower_bound) << "\n";
  out << "sum alpha_k^2: " << fmt17(r.step_sq_sum) << "\n";
  if (r.step_sq_sum_upper_bound)
    out << "  closed-form upper bound: " << fmt17(*r.step_sq_sum_upper_bound) << "\n";
  out << "sum |alpha_{k+1} - alpha_k|: " << fmt17(r.step_variation_sum) << "\n";
  if (is_stochastic(cfg.method)) {
    out << "sum 1/sqrt(b_k): " << fmt17(r.inv_sqrt_batch_sum) << "\n"
        << "sum 1/b_k: " << fmt17(r.inv_batch_sum) << "\n";
    if (r.B_bound) {
      out << "B: " << fmt17(*r.B_bound) << "\n"
          << "  sum 1/sqrt(b_k) <= B: " << yes_no(r.inv_sqrt_sum_le_B) << "\n"
          << "  sum 1/b_k <= B: " << yes_no(r.inv_sum_le_B) << "\n";
    } else {
      out << "B: undefined\n";
    }
    if (r.cap_first_hit) out << "cap first hit at k = " << *r.cap_first_hit << "\n";
  }
  out << "conditions (" << to_string(cfg.method) << "):\n";
  for (const auto& c : checks) out << "  [" << (c.holds ? "ok" : "FAILS") << "] " << c.name << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  out << "\n";
}

void write_trace_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "k,alpha,batch,residual_mean,residual_se,f0gap_mean,f0gap_se,msq_dist_mean,msq_dist_se\n";
  for (const auto& row : stats.rows) {
    out << row.k << ',' << fmt17(row.alpha) << ',' << row.batch_size << ','
        << fmt17(row.residual.mean) << ',' << fmt17(row.residual.se) << ','
        << fmt17(row.f0_gap.mean) << ',' << fmt17(row.f0_gap.se) << ','
        << fmt17(row.msq_dist.mean) << ',' << fmt17(row.msq_dist.se) << '\n';
  }
}

int validate_only(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const auto p = prepare_experiment(cfg);
    const auto report = validate_config(cfg.solver);
    const auto checks = method_conditions(cfg.solver, report);
    write_header(out, cfg, p);
    write_validation(out, cfg.solver, report, checks);
    for (const auto& c : checks)
      if (!c.holds) return static_cast<int>(kExitConditions);
    return static_cast<int>(kExitOk);
  });
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const auto p = prepare_experiment(cfg);
    const auto report = validate_config(cfg.solver);
    const auto checks = method_conditions(cfg.solver, report);
    for (const auto& w : report.warnings) log << "warning: " << w << "\n";

    EnsembleOptions opts;
    opts.x_star = p.oracle.x_star;
    const auto stats = ensemble(p.problem, cfg.solver, cfg.trials, opts);

    const auto K = static_cast<std::size_t>(cfg.solver.iterations);
    const auto window =
        cfg.fit_window ? *cfg.fit_window : std::pair<std::size_t, std::size_t>{std::max<std::size_t>(1, K / 100), K};

    std::ostringstream summary;
    summary << "# experiment summary\n";
    write_header(summary, cfg, p);
    write_validation(summary, cfg.solver, report, checks);

    summary << "[rate]\n"
            << "quantity: running min over k of |mean f0 gap|\n"
            << "window: [" << window.first << ", " << window.second << "]\n";
    try {
      summary << "fitted_slope: " << fmt17(fit_rate(stats, window.first, window.second)) << "\n";
    } catch (const std::invalid_argument& e) {
      summary << "fitted_slope: unavailable (" << e.what() << ")\n";
    }
    if (const auto pred = predicted_rate(cfg.solver.step)) {
      summary << "predicted: " << pred->text << " (exponent " << fmt17(pred->exponent) << ")\n";
    } else {
      summary << "predicted: none (constant step)\n";
    }
    const auto& last = stats.rows.back();
    summary << "\n[final k = " << last.k << "]\n"
            << "residual_mean: " << fmt17(last.residual.mean) << " se " << fmt17(last.residual.se) << "\n"
            << "f0gap_mean: " << fmt17(last.f0_gap.mean) << " se " << fmt17(last.f0_gap.se) << "\n"
            << "msq_dist_mean: " << fmt17(last.msq_dist.mean) << " se " << fmt17(last.msq_dist.se)
            << "\n";

    const std::filesystem::path prefix(cfg.out_prefix);
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
    const std::string trace_path = cfg.out_prefix + "_trace.csv";
    const std::string summary_path = cfg.out_prefix + "_summary.txt";
    std::ofstream trace(trace_path, std::ios::binary);
    std::ofstream sum(summary_path, std::ios::binary);
    if (!trace || !sum) {
      log << "error: cannot write outputs under prefix '" << cfg.out_prefix << "'\n";
      return static_cast<int>(kExitConfig);
    }
    write_trace_csv(trace, stats);
    sum << summary.str();
    log << "wrote " << trace_path << " and " << summary_path << "\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace halpern
