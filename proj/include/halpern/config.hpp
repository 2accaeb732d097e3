#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halpern/core.hpp"
#include "halpern/mappings.hpp"
#include "halpern/problem.hpp"
#include "halpern/solvers.hpp"

namespace halpern {

/// Rejected configuration. what() reads "<source>:<line>: <field>: <message>".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& field,
              const std::string& message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

enum class ProblemFamily { halfspaces, random_halfspaces, quadratic, random_quadratic };

struct ProblemSpec {
  ProblemFamily family = ProblemFamily::halfspaces;
  std::size_t dim = 0;
  std::size_t n = 0;          ///< random families
  std::size_t rows = 0;       ///< random_quadratic: rows of each A_i
  std::uint64_t data_seed = 0;
  double x0_scale = 5.0;      ///< random x0 ~ N(0, x0_scale^2 I) when x0 is not given
  std::vector<Halfspace> halfspaces;
  std::vector<QuadraticTerm> terms;
  std::optional<Vector> x0;
  std::optional<double> eta;  ///< unset means 1/L_max
};

struct ExperimentConfig {
  std::string source;
  ProblemSpec problem;
  SolverConfig solver;
  std::size_t trials = 2;
  std::string out_prefix = "out";
  std::optional<std::pair<std::size_t, std::size_t>> fit_window;
  std::size_t probes = 64;
};

/// Parses the sectioned key = value format described in the README.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Materializes the problem, generating random data from data_seed.
Problem build_problem(const ProblemSpec& spec);

}  // namespace halpern
