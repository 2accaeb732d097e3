#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace halpern {

/// Step sizes alpha_k in (0, 1].
class StepSchedule {
 public:
  enum class Kind { poly, lambda_poly, constant };

  /// alpha_k = (k+1)^(-a), a in (0, 1].
  static StepSchedule poly(double a);
  /// alpha_k = (2 lambda - 1) / (2 (1 - lambda) (k+1)^a), a in (0, 1],
  /// lambda in (1/2, 3/4].
  static StepSchedule lambda_poly(double a, double lambda);
  /// alpha_k = c, c in (0, 1].
  static StepSchedule constant(double c);

  double at(std::uint64_t k) const;

  Kind kind() const { return kind_; }
  double exponent() const { return a_; }
  double lambda() const { return lambda_; }
  /// Leading factor: 1 for poly, (2 lambda - 1)/(2 (1 - lambda)) for
  /// lambda_poly, c for constant.
  double scale() const { return scale_; }
  bool diminishing() const { return kind_ != Kind::constant; }

  std::string describe() const;

 private:
  StepSchedule(Kind kind, double a, double lambda, double scale)
      : kind_(kind), a_(a), lambda_(lambda), scale_(scale) {}

  Kind kind_;
  double a_;
  double lambda_;
  double scale_;
};

inline double step_at(const StepSchedule& s, std::uint64_t k) { return s.at(k); }

/// Upper bound on alpha_k required by the lambda-averaged rate analysis.
double lambda_step_bound(double lambda);

/// Batch sizes b_k >= 1, optionally capped.
class BatchSchedule {
 public:
  enum class Kind { constant, polynomial, exponential };

  /// Formula values at or above this are saturated before capping.
  static constexpr std::uint64_t kSaturation = std::uint64_t{1} << 62;

  static BatchSchedule constant(std::uint64_t b);
  /// b_k = floor((a0 k + b0)^c).
  static BatchSchedule polynomial(double a0, double b0, double c);
  /// b_k = floor(b0 delta^k), delta > 1.
  static BatchSchedule exponential(double b0, double delta);

  BatchSchedule with_cap(std::uint64_t cap) const;

  /// Emitted batch size, min(formula, cap).
  std::uint64_t at(std::uint64_t k) const;
  std::uint64_t uncapped_at(std::uint64_t k) const;
  bool cap_hit(std::uint64_t k) const;

  Kind kind() const { return kind_; }
  std::optional<std::uint64_t> cap() const { return cap_; }
  double p1() const { return p1_; }  ///< b (constant), a0, or b0 (exponential)
  double p2() const { return p2_; }  ///< b0 (polynomial) or delta
  double p3() const { return p3_; }  ///< c (polynomial)
  bool increasing() const { return kind_ != Kind::constant; }

  /// Constant B bounding the batch series for the increasing kinds.
  std::optional<double> series_bound() const;

  std::string describe() const;

 private:
  BatchSchedule(Kind kind, double p1, double p2, double p3)
      : kind_(kind), p1_(p1), p2_(p2), p3_(p3) {}

  Kind kind_;
  double p1_;
  double p2_;
  double p3_;
  std::optional<std::uint64_t> cap_;
};

inline std::uint64_t batch_at(const BatchSchedule& b, std::uint64_t k) { return b.at(k); }

/// Pointwise scan of one condition over k in [0, K-1].
struct ConditionScan {
  bool holds_everywhere = false;
  /// Smallest k0 with the condition holding on all of [k0, K-1]; empty means
  /// "never within horizon".
  std::optional<std::uint64_t> k0;
  std::optional<std::uint64_t> first_violation;
};

/// Properties of the infinite sequences, certified from the schedule kinds.
struct SeriesCertificates {
  bool step_vanishes = false;          ///< lim alpha_k = 0
  bool step_sum_diverges = false;      ///< sum alpha_k = inf
  bool step_km_sum_diverges = false;   ///< sum alpha_k (1 - alpha_k) = inf
  bool step_variation_finite = false;  ///< sum |alpha_{k+1} - alpha_k| < inf
  bool inv_sqrt_batch_summable = false;
  bool inv_batch_summable = false;
};

struct ValidationReport {
  std::uint64_t horizon = 0;

  ConditionScan one_over_b_le_alpha;
  ConditionScan one_over_b_le_alpha_sq;
  std::optional<ConditionScan> alpha_le_lambda_bound;
  std::optional<double> lambda_bound;

  double step_sum = 0.0;
  double step_sq_sum = 0.0;
  double step_variation_sum = 0.0;  ///< sum_{k<K} |alpha_{k+1} - alpha_k|
  double inv_sqrt_batch_sum = 0.0;
  double inv_batch_sum = 0.0;

  /// Closed-form lower bound on step_sum (poly kinds).
  std::optional<double> step_sum_lower_bound;
  /// Closed-form upper bound on step_sq_sum (poly kinds).
  std::optional<double> step_sq_sum_upper_bound;

  std::optional<double> B_bound;
  bool inv_sqrt_sum_le_B = false;
  bool inv_sum_le_B = false;

  SeriesCertificates certified;
  std::optional<std::uint64_t> cap_first_hit;
  std::vector<std::string> warnings;
};

ValidationReport validate(const StepSchedule& step, const BatchSchedule& batch,
                          std::uint64_t horizon, std::optional<double> lambda = std::nullopt);

}  // namespace halpern
