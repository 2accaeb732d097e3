// Command-line front end: `halpern run <config>` and `halpern validate <config>`.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "halpern/config.hpp"
#include "halpern/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mini-batch stochastic Halpern experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  auto* run = app.add_subcommand("run", "run the ensemble and write trace CSV and summary");
  auto* validate = app.add_subcommand("validate", "print the schedule validation report only");
  for (auto* sub : {run, validate}) {
    sub->add_option("config", config_path, "experiment config file")->required();
    sub->add_option("--trials", trials, "override experiment.trials");
    sub->add_option("--seed", seed, "override experiment.seed");
  }
  run->add_option("--out", out, "override experiment.out (output path prefix)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : halpern::kExitConfig;
  }

  halpern::ExperimentConfig cfg;
  try {
    cfg = halpern::load_config(config_path);
    if (trials) {
      if (*trials < 2) throw halpern::ConfigError("--trials", 0, "trials", "must be >= 2");
      cfg.trials = *trials;
    }
    if (seed) cfg.solver.seed = *seed;
    if (out) cfg.out_prefix = *out;
  } catch (const halpern::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return halpern::kExitConfig;
  }

  if (*validate) return halpern::validate_only(cfg, std::cout, std::cerr);
  return halpern::run_experiment(cfg, std::cerr);
}
