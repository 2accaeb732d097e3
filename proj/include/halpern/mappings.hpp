#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "halpern/core.hpp"

namespace halpern {

/// Closed halfspace {x : <a, x> <= beta}.
class Halfspace {
 public:
  Halfspace(Vector normal, double offset);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  Eigen::Index dim() const { return normal_.size(); }
  bool contains(const Vector& x, double tol = 0.0) const;

 private:
  Vector normal_;
  double offset_;
  double normal_sq_;

  friend void project_halfspace(const Halfspace&, const Vector&, Vector&);
};

/// Metric projection onto the halfspace: x - max(0, <a,x> - beta)/||a||^2 a.
void project_halfspace(const Halfspace& h, const Vector& x, Vector& out);
Point project_halfspace(const Halfspace& h, const Point& x);

/// f(x) = 0.5 * ||A x - b||^2 with A of size m x d.
class QuadraticTerm {
 public:
  QuadraticTerm(Matrix a, Vector b);

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  Eigen::Index dim() const { return a_.cols(); }

  /// A^T A and A^T b, cached at construction.
  const Matrix& gram() const { return gram_; }
  const Vector& rhs() const { return rhs_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Smallest singular value of A exceeds 1e-10.
  bool has_full_column_rank() const;

 private:
  Matrix a_;
  Vector b_;
  Matrix gram_;
  Vector rhs_;
};

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration (relative tolerance 1e-10, at most 10'000 iterations). The start
/// vector is drawn from `seed`.
double largest_eigenvalue(const Matrix& sym, std::uint64_t seed);

MappingFamily make_projection_family(std::vector<Halfspace> halfspaces);

/// T_i = Id - eta * grad f_i. With `eta` unset the step is 1/L_max, where
/// L_max is the largest Lipschitz constant among the gradients.
///
/// Throws DomainError("nonexpansivity violated") for an explicit eta above
/// 2/L_max.
MappingFamily make_gradient_family(std::vector<QuadraticTerm> terms,
                                   std::optional<double> eta = std::nullopt,
                                   std::uint64_t seed = 0);

/// The step make_gradient_family would use for these terms: `eta` after the
/// nonexpansivity check, or 1/L_max when unset.
double resolve_gradient_eta(const std::vector<QuadraticTerm>& terms,
                            std::optional<double> eta, std::uint64_t seed = 0);

struct AveragedFamily {
  MappingFamily base;
  double lambda;
  /// Components lambda * x + (1 - lambda) * T_i(x).
  MappingFamily family;
};

AveragedFamily make_averaged(MappingFamily base, double lambda);

}  // namespace halpern
