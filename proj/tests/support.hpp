#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "halpern/core.hpp"
#include "halpern/mappings.hpp"
#include "halpern/problem.hpp"

namespace testing_support {

using halpern::Halfspace;
using halpern::Matrix;
using halpern::Vector;

inline Vector gaussian(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * n(rng);
  return v;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline bool feasible(const std::vector<Halfspace>& hs, const Vector& x) {
  for (const auto& h : hs)
    if (h.normal().dot(x) > h.offset()) return false;
  return true;
}

/// Brute-force nearest feasible point in R^2: a grid of step 1e-3 on the box
/// of half-width `radius` around x0, then local grids ten times finer.
inline Vector grid_projection_2d(const std::vector<Halfspace>& hs, const Vector& x0,
                                 double radius) {
  double h = 1e-3;
  Vector center = x0;
  double half = radius;
  Vector best = x0;
  double best_d = INFINITY;
  for (int round = 0; round < 4; ++round) {
    const long steps = static_cast<long>(std::ceil(half / h));
    Vector p(2);
    for (long i = -steps; i <= steps; ++i) {
      p[0] = center[0] + static_cast<double>(i) * h;
      for (long j = -steps; j <= steps; ++j) {
        p[1] = center[1] + static_cast<double>(j) * h;
        if (!feasible(hs, p)) continue;
        const double d = (p - x0).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = p;
        }
      }
    }
    center = best;
    half = 3.0 * h;
    h /= 10.0;
  }
  return best;
}

/// Halfspaces through points near the origin so the intersection is
/// nonempty; shared by the property tests.
inline std::vector<Halfspace> random_halfspaces(std::mt19937_64& rng, std::size_t n,
                                                Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<Halfspace> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector a = gaussian(rng, d);
    out.emplace_back(a, u(rng) * a.norm());
  }
  return out;
}

inline std::vector<halpern::QuadraticTerm> random_terms(std::mt19937_64& rng, std::size_t n,
                                                        Eigen::Index rows, Eigen::Index d) {
  std::vector<halpern::QuadraticTerm> out;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix a(rows, d);
    for (Eigen::Index c = 0; c < d; ++c) a.col(c) = gaussian(rng, rows);
    out.emplace_back(a, gaussian(rng, rows));
  }
  return out;
}

/// The two-halfspace benchmark {x1 <= 1} and {x1 + x2 <= 1} with x0 = (3, 1).
inline halpern::Problem two_halfspace_problem() {
  std::vector<Halfspace> hs{Halfspace(vec({1, 0}), 1.0), Halfspace(vec({1, 1}), 1.0)};
  return halpern::feasibility_problem(hs, halpern::Point{3.0, 1.0});
}

}  // namespace testing_support
