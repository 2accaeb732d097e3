#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace halpern {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when two objects disagree on the ambient dimension d.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for parameters outside the range a routine accepts.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point of R^d with finite coordinates.
///
/// Points are the values exchanged at API boundaries (anchors, oracle
/// solutions, final iterates). Hot loops work on raw `Vector`s and convert
/// at the edges.
class Point {
 public:
  explicit Point(Vector coords);
  Point(std::initializer_list<double> coords);

  static Point zeros(Eigen::Index dim);

  Eigen::Index dim() const { return coords_.size(); }
  const Vector& vec() const { return coords_; }
  double operator[](Eigen::Index i) const { return coords_[i]; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

 private:
  Vector coords_;
};

void require_same_dim(Eigen::Index expected, Eigen::Index got, const char* what);

/// f0(x) = 0.5 * ||x - x0||^2, the distance-to-anchor objective.
double f0_value(const Point& x, const Point& x0);
double f0_value(const Vector& x, const Vector& x0);

enum class FamilyKind { projection_mean, gradient_mean, custom };

std::string to_string(FamilyKind kind);

namespace detail {

/// Evaluation backend of a mapping family. Implementations must be pure.
class FamilyModel {
 public:
  virtual ~FamilyModel() = default;
  virtual std::size_t size() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual void apply(std::size_t i, const Vector& x, Vector& out) const = 0;
};

}  // namespace detail

/// Term of a weighted component sum: weight * T_index(x).
struct WeightedIndex {
  std::size_t index;
  double weight;
};

/// n component mappings T_1..T_n : R^d -> R^d and their mean T.
///
/// Immutable and cheap to copy (shared backend), so one family can be used
/// by many concurrent trials.
class MappingFamily {
 public:
  using Component = std::function<void(const Vector& x, Vector& out)>;

  MappingFamily(std::shared_ptr<const detail::FamilyModel> model, FamilyKind kind);

  /// Family backed by arbitrary callables. Nonexpansivity is the caller's
  /// responsibility.
  static MappingFamily custom(Eigen::Index dim, std::vector<Component> components);

  std::size_t size() const { return model_->size(); }
  Eigen::Index dim() const { return model_->dim(); }
  FamilyKind kind() const { return kind_; }

  void apply_component(std::size_t i, const Vector& x, Vector& out) const;
  Point component(std::size_t i, const Point& x) const;

  /// out = sum_j w_j T_{i_j}(x), accumulated in the order given.
  void weighted_sum(std::span<const WeightedIndex> terms, const Vector& x,
                    Vector& out) const;

  /// Exact mean (1/n) sum_i T_i(x), indices ascending.
  void mean(const Vector& x, Vector& out) const;

 private:
  std::shared_ptr<const detail::FamilyModel> model_;
  FamilyKind kind_;
};

Point exact_mean_apply(const MappingFamily& family, const Point& x);

/// One recorded iteration of a solver run.
struct IterationRecord {
  std::size_t k = 0;
  double alpha = 0.0;
  std::uint64_t batch_size = 0;
  double residual = 0.0;  ///< ||x_k - T(x_k)|| with the exact mean T
  double f0_value = 0.0;
  std::optional<double> dist_sq_to_oracle;
  /// ||x_{k+1} - x_k||; absent for the final iterate.
  std::optional<double> step_norm;
  /// ||T_xi_k(x_k) - x*||^2 for the sampled mapping used at step k.
  std::optional<double> batch_map_dist_sq;
};

struct RunRecord {
  std::vector<IterationRecord> iterations;
  Point final_point = Point::zeros(1);
  std::uint64_t seed = 0;
  /// Recorded k with the smallest f0 value (the iterate the rate bound speaks
  /// about); `final_point` is still x_K.
  std::size_t min_f0_k = 0;
};

/// Monte-Carlo mean and standard error of one scalar.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct EnsembleRow {
  std::size_t k = 0;
  double alpha = 0.0;
  std::uint64_t batch_size = 0;
  MeanSe residual;
  MeanSe f0_gap;
  MeanSe msq_dist;
  MeanSe step_norm;          ///< NaN mean for the final row
  MeanSe batch_map_dist_sq;  ///< NaN mean for the final row
};

struct EnsembleStats {
  std::vector<EnsembleRow> rows;
  std::size_t trial_count = 0;
  double f0_star = 0.0;
};

}  // namespace halpern
