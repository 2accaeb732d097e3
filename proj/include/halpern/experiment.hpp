#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "halpern/config.hpp"
#include "halpern/diagnostics.hpp"
#include "halpern/schedules.hpp"

namespace halpern {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitOracle = 2,
  kExitDiverged = 3,
  kExitConditions = 4,
};

/// One convergence requirement of the method, evaluated on a report.
struct ConditionCheck {
  std::string name;
  bool holds = false;
};

/// Requirements for the method's convergence guarantee:
///   km             sum alpha (1 - alpha) = inf
///   halpern        alpha -> 0, sum alpha = inf, sum |alpha_{k+1} - alpha_k| < inf
///   stoch_km       km conditions and sum 1/sqrt(b) < inf
///   stoch_halpern  halpern conditions, 1/b <= alpha^2 from some k0, sum 1/sqrt(b) < inf
///   λ method       1/b <= alpha from some k0, alpha <= (2λ-1)/(2(1-λ)),
///                  sum alpha = inf, sum 1/b < inf
std::vector<ConditionCheck> method_conditions(const SolverConfig& cfg,
                                              const ValidationReport& report);

/// Problem, oracle point and theorem constants for a config. sigma^2 is
/// estimated on `probes` points drawn with the experiment seed.
struct ExperimentSetup {
  Problem problem;
  OracleResult oracle;
  TheoremConstants constants;
  std::size_t probe_count = 0;
};

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg);

ValidationReport validate_config(const SolverConfig& cfg);

/// Writes the validation section of a summary.
void write_validation(std::ostream& out, const SolverConfig& cfg, const ValidationReport& report,
                      const std::vector<ConditionCheck>& checks);

/// Formats a double with 17 significant digits.
std::string fmt17(double v);

void write_trace_csv(std::ostream& out, const EnsembleStats& stats);

/// Runs the configured ensemble and writes <prefix>_trace.csv and
/// <prefix>_summary.txt. Diagnostics go to `log`. Returns an ExitCode.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Prints the validation report and theorem-constant preview. Returns
/// kExitOk when every condition holds within the horizon, kExitConditions
/// otherwise.
int validate_only(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace halpern
