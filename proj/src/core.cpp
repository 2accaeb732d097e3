#include "halpern/core.hpp"

#include <sstream>

namespace halpern {

Point::Point(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 1) throw DimensionError("point must have dimension >= 1");
  if (!coords_.allFinite()) throw DomainError("point has non-finite coordinates");
}

Point::Point(std::initializer_list<double> coords)
    : Point(Vector(Eigen::Map<const Vector>(coords.begin(),
                                            static_cast<Eigen::Index>(coords.size())))) {}

Point Point::zeros(Eigen::Index dim) { return Point(Vector::Zero(dim)); }

void require_same_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
    throw DimensionError(msg.str());
  }
}

double f0_value(const Vector& x, const Vector& x0) {
  require_same_dim(x0.size(), x.size(), "f0_value");
  return 0.5 * (x - x0).squaredNorm();
}

double f0_value(const Point& x, const Point& x0) { return f0_value(x.vec(), x0.vec()); }

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::projection_mean: return "projection-mean";
    case FamilyKind::gradient_mean: return "gradient-mean";
    case FamilyKind::custom: return "custom";
  }
  return "unknown";
}

namespace {

class CallableFamily final : public detail::FamilyModel {
 public:
  CallableFamily(Eigen::Index dim, std::vector<MappingFamily::Component> components)
      : dim_(dim), components_(std::move(components)) {}

  std::size_t size() const override { return components_.size(); }
  Eigen::Index dim() const override { return dim_; }
  void apply(std::size_t i, const Vector& x, Vector& out) const override {
    components_[i](x, out);
  }

 private:
  Eigen::Index dim_;
  std::vector<MappingFamily::Component> components_;
};

}  // namespace

MappingFamily::MappingFamily(std::shared_ptr<const detail::FamilyModel> model,
                             FamilyKind kind)
    : model_(std::move(model)), kind_(kind) {
  if (!model_ || model_->size() == 0) throw DomainError("mapping family must be nonempty");
  if (model_->dim() < 1) throw DimensionError("mapping family dimension must be >= 1");
}

MappingFamily MappingFamily::custom(Eigen::Index dim, std::vector<Component> components) {
  return MappingFamily(std::make_shared<CallableFamily>(dim, std::move(components)),
                       FamilyKind::custom);
}

void MappingFamily::apply_component(std::size_t i, const Vector& x, Vector& out) const {
  if (i >= size()) throw std::out_of_range("component index out of range");
  require_same_dim(dim(), x.size(), "apply_component");
  out.resize(dim());
  model_->apply(i, x, out);
}

Point MappingFamily::component(std::size_t i, const Point& x) const {
  Vector out(dim());
  apply_component(i, x.vec(), out);
  return Point(std::move(out));
}

void MappingFamily::weighted_sum(std::span<const WeightedIndex> terms, const Vector& x,
                                 Vector& out) const {
  require_same_dim(dim(), x.size(), "weighted_sum");
  Vector acc = Vector::Zero(dim());
  Vector tmp(dim());
  for (const auto& t : terms) {
    if (t.index >= size()) throw std::out_of_range("component index out of range");
    model_->apply(t.index, x, tmp);
    acc.noalias() += t.weight * tmp;
  }
  out = std::move(acc);
}

void MappingFamily::mean(const Vector& x, Vector& out) const {
  require_same_dim(dim(), x.size(), "exact_mean_apply");
  const double w = 1.0 / static_cast<double>(size());
  Vector acc = Vector::Zero(dim());
  Vector tmp(dim());
  for (std::size_t i = 0; i < size(); ++i) {
    model_->apply(i, x, tmp);
    acc.noalias() += w * tmp;
  }
  out = std::move(acc);
}

Point exact_mean_apply(const MappingFamily& family, const Point& x) {
  Vector out;
  family.mean(x.vec(), out);
  return Point(std::move(out));
}

}  // namespace halpern
