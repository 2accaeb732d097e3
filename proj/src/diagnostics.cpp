#include "halpern/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "halpern/sampling.hpp"

namespace halpern {

std::string to_string(OracleMethod m) {
  return m == OracleMethod::dykstra ? "dykstra" : "normal_equations";
}

namespace {

constexpr double kDykstraTol = 1e-12;
constexpr std::uint64_t kDykstraMaxSweeps = 1'000'000;

double max_violation(const std::vector<Halfspace>& hs, const Vector& x) {
  double worst = 0.0;
  for (const auto& h : hs) {
    const double excess = h.normal().dot(x) - h.offset();
    if (excess > 0.0) worst = std::max(worst, excess / h.normal().norm());
  }
  return worst;
}

}  // namespace

OracleResult oracle_feasibility(const std::vector<Halfspace>& halfspaces, const Point& x0) {
  if (halfspaces.empty()) throw DomainError("oracle_feasibility: no halfspaces");
  for (const auto& h : halfspaces) require_same_dim(x0.dim(), h.dim(), "oracle_feasibility");

  const auto n = halfspaces.size();
  Vector x = x0.vec();
  std::vector<Vector> corr(n, Vector::Zero(x.size()));
  Vector z(x.size());
  Vector prev(x.size());

  std::uint64_t sweep = 0;
  double change = std::numeric_limits<double>::infinity();
  while (sweep < kDykstraMaxSweeps) {
    prev = x;
    for (std::size_t i = 0; i < n; ++i) {
      z = x + corr[i];
      project_halfspace(halfspaces[i], z, x);
      corr[i] = z - x;
    }
    ++sweep;
    change = (x - prev).norm();
    if (change < kDykstraTol) break;
  }
  const double residual = max_violation(halfspaces, x);
  if (change >= kDykstraTol || residual > 1e-8) {
    std::ostringstream msg;
    msg << "oracle failed / possibly empty intersection (" << sweep
        << " sweeps, last change " << change << ", max violation " << residual << ")";
    throw OracleError(msg.str());
  }
  OracleResult out{Point(x), residual, OracleMethod::dykstra, sweep, std::nullopt};
  return out;
}

OracleResult oracle_quadratic(const std::vector<QuadraticTerm>& terms, const Point& x0) {
  if (terms.empty()) throw DomainError("oracle_quadratic: no terms");
  const auto d = x0.dim();
  Matrix g = Matrix::Zero(d, d);
  Vector r = Vector::Zero(d);
  for (const auto& t : terms) {
    require_same_dim(d, t.dim(), "oracle_quadratic");
    g += t.gram();
    r += t.rhs();
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= 1e-10 * hi) {
    throw OracleError(
        "oracle failed: sum of A_i^T A_i is singular, so the fixed-point set is not a single "
        "point; use a full-rank construction or model the problem as a feasibility family");
  }

  Eigen::LDLT<Matrix> ldlt(g);
  Vector x = ldlt.solve(r);
  x += ldlt.solve(r - g * x);  // one step of iterative refinement

  const double scale = g.norm() * x.norm() + r.norm();
  const double residual = scale > 0.0 ? (g * x - r).norm() / scale : 0.0;
  if (!x.allFinite() || residual > 1e-10) {
    std::ostringstream msg;
    msg << "oracle failed: normal-equation residual " << residual << " above 1e-10";
    throw OracleError(msg.str());
  }
  return OracleResult{Point(x), residual, OracleMethod::normal_equations, 0, hi / lo};
}

OracleResult oracle_for(const Problem& problem) {
  if (!problem.oracle_info) throw OracleError("oracle failed: problem carries no oracle data");
  if (const auto* hs = std::get_if<std::vector<Halfspace>>(&*problem.oracle_info)) {
    return oracle_feasibility(*hs, problem.x0);
  }
  return oracle_quadratic(std::get<std::vector<QuadraticTerm>>(*problem.oracle_info),
                          problem.x0);
}

std::vector<Point> probe_points(const Point& x_star, const Point& x0, std::size_t count,
                                std::uint64_t seed) {
  require_same_dim(x_star.dim(), x0.dim(), "probe_points");
  const auto d = x_star.dim();
  const double radius = 2.0 * (x0.vec() - x_star.vec()).norm();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Point> out{x_star, x0};
  out.reserve(count + 2);
  Vector dir(d);
  for (std::size_t j = 0; j < count; ++j) {
    double len = 0.0;
    do {
      for (Eigen::Index i = 0; i < d; ++i) dir[i] = normal(rng);
      len = dir.norm();
    } while (len == 0.0);
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(d));
    out.emplace_back(Vector(x_star.vec() + (r / len) * dir));
  }
  return out;
}

double estimate_sigma_sq(const MappingFamily& family, const std::vector<Point>& probes) {
  if (probes.empty()) throw DomainError("estimate_sigma_sq: no probe points");
  const auto n = family.size();
  Vector mean(family.dim());
  Vector comp(family.dim());
  double worst = 0.0;
  for (const auto& p : probes) {
    require_same_dim(family.dim(), p.dim(), "estimate_sigma_sq");
    family.mean(p.vec(), mean);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      family.apply_component(i, p.vec(), comp);
      acc += (comp - mean).squaredNorm();
    }
    worst = std::max(worst, acc / static_cast<double>(n));
  }
  return worst;
}

unsigned threads_from_env() {
  const char* raw = std::getenv("HALPERN_THREADS");
  if (!raw) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) return 1;
  return static_cast<unsigned>(std::min<long>(v, 256));
}

namespace {

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  MeanSe finish() const {
    if (n < 2) return {mean, 0.0};
    const double var = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
  }
};

struct RowAcc {
  Welford residual, gap, dist, step, batch_map;
  bool has_step = true;
};

}  // namespace

EnsembleStats ensemble(const Problem& problem, const SolverConfig& cfg, std::size_t trials,
                       const EnsembleOptions& options) {
  if (trials < 2) throw DomainError("ensemble: trials must be >= 2");
  check_config(cfg);
  const Point x_star = options.x_star ? *options.x_star : oracle_for(problem).x_star;
  const double f0_star = f0_value(x_star, problem.x0);
  const unsigned threads = std::max(1u, options.threads ? *options.threads : threads_from_env());
  const SeedStream master(cfg.seed);

  std::vector<RowAcc> acc;
  std::vector<IterationRecord> layout;

  auto run_trial = [&](std::size_t i) {
    SolverConfig c = cfg;
    c.seed = master.trial(i).seed();
    return detail::run_unchecked(problem, c, x_star);
  };

  auto merge = [&](const RunRecord& rec) {
    if (acc.empty()) {
      acc.resize(rec.iterations.size());
      layout = rec.iterations;
    }
    for (std::size_t r = 0; r < rec.iterations.size(); ++r) {
      const auto& it = rec.iterations[r];
      auto& a = acc[r];
      a.residual.add(it.residual);
      a.gap.add(it.f0_value - f0_star);
      a.dist.add(*it.dist_sq_to_oracle);
      if (it.step_norm) {
        a.step.add(*it.step_norm);
        a.batch_map.add(*it.batch_map_dist_sq);
      } else {
        a.has_step = false;
      }
    }
  };

  for (std::size_t start = 0; start < trials; start += threads) {
    const std::size_t stop = std::min(trials, start + threads);
    std::vector<std::optional<RunRecord>> results(stop - start);
    std::vector<std::exception_ptr> errors(stop - start);
    if (stop - start == 1) {
      try {
        results[0] = run_trial(start);
      } catch (...) {
        errors[0] = std::current_exception();
      }
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = start; i < stop; ++i) {
        pool.emplace_back([&, i] {
          try {
            results[i - start] = run_trial(i);
          } catch (...) {
            errors[i - start] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    for (std::size_t j = 0; j < results.size(); ++j) {
      if (errors[j]) std::rethrow_exception(errors[j]);
      merge(*results[j]);
    }
  }

  EnsembleStats out;
  out.trial_count = trials;
  out.f0_star = f0_star;
  out.rows.reserve(acc.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < acc.size(); ++r) {
    EnsembleRow row;
    row.k = layout[r].k;
    row.alpha = layout[r].alpha;
    row.batch_size = layout[r].batch_size;
    row.residual = acc[r].residual.finish();
    row.f0_gap = acc[r].gap.finish();
    row.msq_dist = acc[r].dist.finish();
    if (acc[r].has_step) {
      row.step_norm = acc[r].step.finish();
      row.batch_map_dist_sq = acc[r].batch_map.finish();
    } else {
      row.step_norm = {nan, nan};
      row.batch_map_dist_sq = {nan, nan};
    }
    out.rows.push_back(row);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("loglog_slope: length mismatch");
  if (x.size() < 2) throw DomainError("loglog_slope: need at least 2 points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw DomainError("loglog_slope: x values are all equal");
  return sxy / sxx;
}

double fit_rate(const EnsembleStats& stats, std::size_t k_lo, std::size_t k_hi) {
  if (k_lo < 1 || k_hi <= k_lo) throw DomainError("fit_rate: window must satisfy 1 <= k_lo < k_hi");
  std::vector<double> ks, gaps;
  double running = std::numeric_limits<double>::infinity();
  for (const auto& row : stats.rows) {
    running = std::min(running, std::abs(row.f0_gap.mean));
    if (row.k < k_lo || row.k > k_hi) continue;
    if (!(running > 0.0)) throw DomainError("gap below noise floor; shrink window");
    ks.push_back(static_cast<double>(row.k));
    gaps.push_back(running);
  }
  if (ks.size() < 5) {
    std::ostringstream msg;
    msg << "fit_rate: only " << ks.size() << " recorded points in [" << k_lo << ", " << k_hi
        << "], need at least 5";
    throw DomainError(msg.str());
  }
  return loglog_slope(ks, gaps);
}

std::optional<PredictedRate> predicted_rate(const StepSchedule& step) {
  if (!step.diminishing()) return std::nullopt;
  const double a = step.exponent();
  PredictedRate p;
  std::ostringstream text;
  if (a < 0.5) {
    p.exponent = -a;
    text << "O(K^-" << a << ")";
  } else if (a == 0.5) {
    p.exponent = -0.5;
    p.log_factor = true;
    text << "O(log K / sqrt K)";
  } else if (a < 1.0) {
    p.exponent = -(1.0 - a);
    text << "O(K^-" << 1.0 - a << ")";
  } else {
    p.exponent = 0.0;
    p.inverse_log = true;
    text << "O(1 / log K)";
  }
  p.text = text.str();
  return p;
}

TheoremConstants theorem_constants(const Problem& problem, const OracleResult& oracle,
                                   double sigma_sq, const BatchSchedule& batch) {
  if (!(sigma_sq >= 0.0)) throw DomainError("theorem_constants: sigma^2 must be >= 0");
  require_same_dim(problem.x0.dim(), oracle.x_star.dim(), "theorem_constants");
  const Vector& x0 = problem.x0.vec();
  const Vector& xs = oracle.x_star.vec();
  TheoremConstants c;
  c.sigma_sq_hat = sigma_sq;
  c.dist0_sq = (x0 - xs).squaredNorm();
  c.M = c.dist0_sq + sigma_sq;
  c.M1 = x0.norm() + std::sqrt(2.0 * (c.M + xs.squaredNorm() + sigma_sq));
  c.M2 = c.M;
  c.M3 = 4.0 * (c.M + sigma_sq + (xs - x0).squaredNorm());
  c.B = batch.series_bound();
  return c;
}

double theorem2_gap_bound(const TheoremConstants& c, const StepSchedule& step,
                          const BatchSchedule& batch, std::uint64_t K) {
  if (K < 1) throw DomainError("theorem2_gap_bound: K must be >= 1");
  double s1 = 0.0, s2 = 0.0, sb = 0.0;
  for (std::uint64_t k = 0; k < K; ++k) {
    const double a = step.at(k);
    s1 += a;
    s2 += a * a;
    sb += 1.0 / static_cast<double>(batch.at(k));
  }
  return (c.dist0_sq + c.M3 * s2 + c.sigma_sq_hat * sb) / (2.0 * s1);
}

}  // namespace halpern
