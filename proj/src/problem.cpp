#include "halpern/problem.hpp"

namespace halpern {

Problem::Problem(MappingFamily family_in, Point x0_in, std::optional<OracleInfo> info)
    : family(std::move(family_in)), x0(std::move(x0_in)), oracle_info(std::move(info)) {
  require_same_dim(family.dim(), x0.dim(), "Problem: anchor x0");
}

Problem feasibility_problem(std::vector<Halfspace> halfspaces, Point x0) {
  auto family = make_projection_family(halfspaces);
  return Problem(std::move(family), std::move(x0), OracleInfo(std::move(halfspaces)));
}

Problem quadratic_problem(std::vector<QuadraticTerm> terms, Point x0, std::optional<double> eta,
                          std::uint64_t seed) {
  auto family = make_gradient_family(terms, eta, seed);
  return Problem(std::move(family), std::move(x0), OracleInfo(std::move(terms)));
}

}  // namespace halpern
