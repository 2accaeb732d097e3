#include "halpern/schedules.hpp"

#include <cmath>
#include <sstream>

#include "halpern/core.hpp"

namespace halpern {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

StepSchedule StepSchedule::poly(double a) {
  require(a > 0.0 && a <= 1.0, "poly step: exponent a must lie in (0, 1], got " + num(a));
  return StepSchedule(Kind::poly, a, 0.0, 1.0);
}

double lambda_step_bound(double lambda) { return (2.0 * lambda - 1.0) / (2.0 * (1.0 - lambda)); }

StepSchedule StepSchedule::lambda_poly(double a, double lambda) {
  require(a > 0.0 && a <= 1.0, "lambda_poly step: exponent a must lie in (0, 1], got " + num(a));
  require(lambda > 0.5 && lambda <= 0.75,
          "lambda_poly step: lambda must lie in (1/2, 3/4], got " + num(lambda));
  return StepSchedule(Kind::lambda_poly, a, lambda, lambda_step_bound(lambda));
}

StepSchedule StepSchedule::constant(double c) {
  require(c > 0.0 && c <= 1.0, "constant step: c must lie in (0, 1], got " + num(c));
  return StepSchedule(Kind::constant, 0.0, 0.0, c);
}

double StepSchedule::at(std::uint64_t k) const {
  switch (kind_) {
    case Kind::poly: return std::pow(static_cast<double>(k) + 1.0, -a_);
    case Kind::lambda_poly: return scale_ / std::pow(static_cast<double>(k) + 1.0, a_);
    case Kind::constant: return scale_;
  }
  return scale_;
}

std::string StepSchedule::describe() const {
  switch (kind_) {
    case Kind::poly: return "poly(a=" + num(a_) + ")";
    case Kind::lambda_poly: return "lambda_poly(a=" + num(a_) + ", lambda=" + num(lambda_) + ")";
    case Kind::constant: return "constant(c=" + num(scale_) + ")";
  }
  return "?";
}

BatchSchedule BatchSchedule::constant(std::uint64_t b) {
  require(b >= 1, "constant batch: b must be >= 1");
  return BatchSchedule(Kind::constant, static_cast<double>(b), 0.0, 0.0);
}

BatchSchedule BatchSchedule::polynomial(double a0, double b0, double c) {
  require(a0 > 0.0 && std::isfinite(a0), "polynomial batch: a0 must be > 0, got " + num(a0));
  require(b0 > 0.0 && std::isfinite(b0), "polynomial batch: b0 must be > 0, got " + num(b0));
  require(c > 0.0 && std::isfinite(c), "polynomial batch: c must be > 0, got " + num(c));
  return BatchSchedule(Kind::polynomial, a0, b0, c);
}

BatchSchedule BatchSchedule::exponential(double b0, double delta) {
  require(b0 > 0.0 && std::isfinite(b0), "exponential batch: b0 must be > 0, got " + num(b0));
  require(delta > 1.0 && std::isfinite(delta),
          "exponential batch: delta must be > 1, got " + num(delta));
  return BatchSchedule(Kind::exponential, b0, delta, 0.0);
}

BatchSchedule BatchSchedule::with_cap(std::uint64_t cap) const {
  require(cap >= 1, "batch cap must be >= 1");
  BatchSchedule out = *this;
  out.cap_ = cap;
  return out;
}

std::uint64_t BatchSchedule::uncapped_at(std::uint64_t k) const {
  const double kk = static_cast<double>(k);
  double v = 0.0;
  switch (kind_) {
    case Kind::constant: return static_cast<std::uint64_t>(p1_);
    case Kind::polynomial: v = std::pow(p1_ * kk + p2_, p3_); break;
    case Kind::exponential: v = p1_ * std::pow(p2_, kk); break;
  }
  v = std::floor(v);
  if (!(v < static_cast<double>(kSaturation))) return kSaturation;
  if (v < 1.0) return 1;
  return static_cast<std::uint64_t>(v);
}

std::uint64_t BatchSchedule::at(std::uint64_t k) const {
  const auto b = uncapped_at(k);
  return cap_ && b > *cap_ ? *cap_ : b;
}

bool BatchSchedule::cap_hit(std::uint64_t k) const { return cap_ && uncapped_at(k) > *cap_; }

std::optional<double> BatchSchedule::series_bound() const {
  switch (kind_) {
    case Kind::constant: return std::nullopt;
    case Kind::polynomial:
      if (p3_ <= 1.0) return std::nullopt;
      return (2.0 * p3_ - 1.0) / ((p3_ - 1.0) * std::min(p1_, p2_));
    case Kind::exponential: return p2_ / ((p2_ - 1.0) * p1_);
  }
  return std::nullopt;
}

std::string BatchSchedule::describe() const {
  std::string s;
  switch (kind_) {
    case Kind::constant: s = "constant(b=" + num(p1_) + ")"; break;
    case Kind::polynomial:
      s = "polynomial(a0=" + num(p1_) + ", b0=" + num(p2_) + ", c=" + num(p3_) + ")";
      break;
    case Kind::exponential: s = "exponential(b0=" + num(p1_) + ", delta=" + num(p2_) + ")"; break;
  }
  if (cap_) s += " cap " + std::to_string(*cap_);
  return s;
}

namespace {

template <class Pred>
ConditionScan scan(std::uint64_t horizon, Pred holds) {
  ConditionScan out;
  std::optional<std::uint64_t> last_violation;
  for (std::uint64_t k = 0; k < horizon; ++k) {
    if (!holds(k)) {
      if (!out.first_violation) out.first_violation = k;
      last_violation = k;
    }
  }
  out.holds_everywhere = !out.first_violation;
  if (!last_violation) {
    out.k0 = 0;
  } else if (*last_violation + 1 < horizon) {
    out.k0 = *last_violation + 1;
  }
  return out;
}

SeriesCertificates certify(const StepSchedule& step, const BatchSchedule& batch) {
  SeriesCertificates c;
  c.step_vanishes = step.diminishing();
  // (k+1)^-a with a <= 1 is not summable; a constant step is not either.
  c.step_sum_diverges = true;
  c.step_km_sum_diverges = step.kind() != StepSchedule::Kind::constant || step.scale() < 1.0;
  c.step_variation_finite = true;  // monotone and bounded
  switch (batch.kind()) {
    case BatchSchedule::Kind::constant: break;
    case BatchSchedule::Kind::polynomial:
      c.inv_sqrt_batch_summable = batch.p3() > 2.0;
      c.inv_batch_summable = batch.p3() > 1.0;
      break;
    case BatchSchedule::Kind::exponential:
      c.inv_sqrt_batch_summable = true;
      c.inv_batch_summable = true;
      break;
  }
  return c;
}

}  // namespace

ValidationReport validate(const StepSchedule& step, const BatchSchedule& batch,
                          std::uint64_t horizon, std::optional<double> lambda) {
  require(horizon >= 1, "validate: horizon K must be >= 1");
  ValidationReport r;
  r.horizon = horizon;

  std::vector<double> alpha(horizon);
  std::vector<double> inv_b(horizon);
  for (std::uint64_t k = 0; k < horizon; ++k) {
    alpha[k] = step.at(k);
    inv_b[k] = 1.0 / static_cast<double>(batch.at(k));
    if (!r.cap_first_hit && batch.cap_hit(k)) r.cap_first_hit = k;
  }

  r.one_over_b_le_alpha = scan(horizon, [&](auto k) { return inv_b[k] <= alpha[k]; });
  r.one_over_b_le_alpha_sq =
      scan(horizon, [&](auto k) { return inv_b[k] <= alpha[k] * alpha[k]; });
  if (lambda) {
    const double bound = lambda_step_bound(*lambda);
    r.lambda_bound = bound;
    r.alpha_le_lambda_bound = scan(horizon, [&](auto k) { return alpha[k] <= bound; });
  }

  for (std::uint64_t k = 0; k < horizon; ++k) {
    r.step_sum += alpha[k];
    r.step_sq_sum += alpha[k] * alpha[k];
    r.step_variation_sum += std::abs(step.at(k + 1) - alpha[k]);
    r.inv_sqrt_batch_sum += std::sqrt(inv_b[k]);
    r.inv_batch_sum += inv_b[k];
  }

  if (step.diminishing()) {
    const double a = step.exponent();
    const double c = step.scale();
    const double kk = static_cast<double>(horizon);
    r.step_sum_lower_bound =
        a < 1.0 ? c * (std::pow(kk + 1.0, 1.0 - a) - 1.0) / (1.0 - a) : c * std::log(kk + 1.0);
    double sq;
    if (a < 0.5) {
      sq = std::pow(kk, 1.0 - 2.0 * a) / (1.0 - 2.0 * a);
    } else if (a == 0.5) {
      sq = 1.0 + std::log(kk);
    } else {
      sq = 2.0 * a / (2.0 * a - 1.0);
    }
    r.step_sq_sum_upper_bound = c * c * sq;
  }

  r.B_bound = batch.series_bound();
  if (r.B_bound) {
    r.inv_sqrt_sum_le_B = r.inv_sqrt_batch_sum <= *r.B_bound;
    r.inv_sum_le_B = r.inv_batch_sum <= *r.B_bound;
  }

  r.certified = certify(step, batch);

  if (r.one_over_b_le_alpha_sq.first_violation && r.one_over_b_le_alpha_sq.k0) {
    r.warnings.push_back("1/b_k <= alpha_k^2 fails on a prefix; holds from k0 = " +
                         std::to_string(*r.one_over_b_le_alpha_sq.k0));
  }
  if (r.one_over_b_le_alpha.first_violation && r.one_over_b_le_alpha.k0) {
    r.warnings.push_back("1/b_k <= alpha_k fails on a prefix; holds from k0 = " +
                         std::to_string(*r.one_over_b_le_alpha.k0));
  }
  if (r.cap_first_hit) {
    r.warnings.push_back("batch cap " + std::to_string(*batch.cap()) + " reached at k = " +
                         std::to_string(*r.cap_first_hit) +
                         "; batch sizes are constant from there on");
  }
  return r;
}

}  // namespace halpern
