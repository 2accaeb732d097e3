#include "halpern/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace halpern {

Halfspace::Halfspace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset), normal_sq_(normal_.squaredNorm()) {
  if (normal_.size() < 1) throw DimensionError("halfspace normal must have dimension >= 1");
  if (!normal_.allFinite() || !std::isfinite(offset_))
    throw DomainError("halfspace data must be finite");
  if (!(normal_sq_ > 0.0)) throw DomainError("halfspace normal must be nonzero");
}

bool Halfspace::contains(const Vector& x, double tol) const {
  return normal_.dot(x) - offset_ <= tol;
}

void project_halfspace(const Halfspace& h, const Vector& x, Vector& out) {
  require_same_dim(h.dim(), x.size(), "project_halfspace");
  const double excess = h.normal_.dot(x) - h.offset_;
  if (excess <= 0.0) {
    out = x;
  } else {
    out = x - (excess / h.normal_sq_) * h.normal_;
  }
}

Point project_halfspace(const Halfspace& h, const Point& x) {
  Vector out;
  project_halfspace(h, x.vec(), out);
  return Point(std::move(out));
}

QuadraticTerm::QuadraticTerm(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() < 1 || a_.cols() < 1) throw DimensionError("quadratic term matrix is empty");
  if (a_.rows() != b_.size()) {
    std::ostringstream msg;
    msg << "quadratic term: A has " << a_.rows() << " rows but b has " << b_.size()
        << " entries";
    throw DimensionError(msg.str());
  }
  if (!a_.allFinite() || !b_.allFinite()) throw DomainError("quadratic term data must be finite");
  gram_ = a_.transpose() * a_;
  rhs_ = a_.transpose() * b_;
}

double QuadraticTerm::value(const Vector& x) const {
  require_same_dim(dim(), x.size(), "QuadraticTerm::value");
  return 0.5 * (a_ * x - b_).squaredNorm();
}

Vector QuadraticTerm::gradient(const Vector& x) const {
  require_same_dim(dim(), x.size(), "QuadraticTerm::gradient");
  return gram_ * x - rhs_;
}

bool QuadraticTerm::has_full_column_rank() const {
  if (a_.rows() < a_.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(a_);
  return svd.singularValues().minCoeff() > 1e-10;
}

double largest_eigenvalue(const Matrix& sym, std::uint64_t seed) {
  if (sym.rows() != sym.cols() || sym.rows() < 1)
    throw DimensionError("largest_eigenvalue: matrix must be square and nonempty");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(sym.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  double estimate = 0.0;
  for (int it = 0; it < 10'000; ++it) {
    Vector w = sym * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // v in the null space; sym is (numerically) zero along it
    const double next = v.dot(w);
    v = w / norm;
    if (it > 0 && std::abs(next - estimate) <= 1e-10 * std::max(1.0, std::abs(next))) {
      return next;
    }
    estimate = next;
  }
  return estimate;
}

namespace {

class ProjectionModel final : public detail::FamilyModel {
 public:
  explicit ProjectionModel(std::vector<Halfspace> sets) : sets_(std::move(sets)) {}
  std::size_t size() const override { return sets_.size(); }
  Eigen::Index dim() const override { return sets_.front().dim(); }
  void apply(std::size_t i, const Vector& x, Vector& out) const override {
    project_halfspace(sets_[i], x, out);
  }

 private:
  std::vector<Halfspace> sets_;
};

class GradientModel final : public detail::FamilyModel {
 public:
  GradientModel(std::vector<QuadraticTerm> terms, double eta)
      : terms_(std::move(terms)), eta_(eta) {}
  std::size_t size() const override { return terms_.size(); }
  Eigen::Index dim() const override { return terms_.front().dim(); }
  void apply(std::size_t i, const Vector& x, Vector& out) const override {
    const auto& t = terms_[i];
    out.noalias() = x - eta_ * (t.gram() * x - t.rhs());
  }

 private:
  std::vector<QuadraticTerm> terms_;
  double eta_;
};

class AveragedModel final : public detail::FamilyModel {
 public:
  AveragedModel(MappingFamily base, double lambda) : base_(std::move(base)), lambda_(lambda) {}
  std::size_t size() const override { return base_.size(); }
  Eigen::Index dim() const override { return base_.dim(); }
  void apply(std::size_t i, const Vector& x, Vector& out) const override {
    base_.apply_component(i, x, out);
    out = lambda_ * x + (1.0 - lambda_) * out;
  }

 private:
  MappingFamily base_;
  double lambda_;
};

}  // namespace

MappingFamily make_projection_family(std::vector<Halfspace> halfspaces) {
  if (halfspaces.empty()) throw DomainError("projection family needs at least one halfspace");
  const auto d = halfspaces.front().dim();
  for (const auto& h : halfspaces) require_same_dim(d, h.dim(), "make_projection_family");
  return MappingFamily(std::make_shared<ProjectionModel>(std::move(halfspaces)),
                       FamilyKind::projection_mean);
}

double resolve_gradient_eta(const std::vector<QuadraticTerm>& terms, std::optional<double> eta,
                            std::uint64_t seed) {
  if (terms.empty()) throw DomainError("gradient family needs at least one term");
  const auto d = terms.front().dim();
  double l_max = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require_same_dim(d, terms[i].dim(), "make_gradient_family");
    l_max = std::max(l_max, largest_eigenvalue(terms[i].gram(), seed + i));
  }
  if (!eta) return l_max > 0.0 ? 1.0 / l_max : 1.0;
  if (!std::isfinite(*eta) || *eta < 0.0) throw DomainError("eta must be finite and >= 0");
  if (l_max > 0.0 && *eta > 2.0 / l_max) {
    std::ostringstream msg;
    msg << "nonexpansivity violated: eta = " << *eta << " exceeds 2/L_max = " << 2.0 / l_max;
    throw DomainError(msg.str());
  }
  return *eta;
}

MappingFamily make_gradient_family(std::vector<QuadraticTerm> terms, std::optional<double> eta,
                                   std::uint64_t seed) {
  const double step = resolve_gradient_eta(terms, eta, seed);
  return MappingFamily(std::make_shared<GradientModel>(std::move(terms), step),
                       FamilyKind::gradient_mean);
}

AveragedFamily make_averaged(MappingFamily base, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    std::ostringstream msg;
    msg << "averaging weight lambda = " << lambda << " outside [0, 1]";
    throw DomainError(msg.str());
  }
  const auto kind = base.kind();
  MappingFamily averaged(std::make_shared<AveragedModel>(base, lambda), kind);
  return AveragedFamily{std::move(base), lambda, std::move(averaged)};
}

}  // namespace halpern
