#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "halpern/core.hpp"
#include "halpern/mappings.hpp"

namespace halpern {

/// Data an independent oracle needs to compute P_Fix(T)(x0).
using OracleInfo = std::variant<std::vector<Halfspace>, std::vector<QuadraticTerm>>;

/// A stochastic fixed-point problem: the family, the anchor x0, and
/// optionally the raw data behind the family.
struct Problem {
  MappingFamily family;
  Point x0;
  std::optional<OracleInfo> oracle_info;

  Problem(MappingFamily family, Point x0, std::optional<OracleInfo> oracle_info = std::nullopt);
};

/// Convex feasibility problem: T = mean of projections onto the halfspaces.
Problem feasibility_problem(std::vector<Halfspace> halfspaces, Point x0);

/// Convex minimization problem: T = mean of Id - eta grad f_i.
Problem quadratic_problem(std::vector<QuadraticTerm> terms, Point x0,
                          std::optional<double> eta = std::nullopt, std::uint64_t seed = 0);

}  // namespace halpern
