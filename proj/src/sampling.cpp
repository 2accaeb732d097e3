#include "halpern/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace halpern {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 SeedStream::engine_for(std::uint64_t k) const {
  return std::mt19937_64(mix_seed(seed_, k));
}

SeedStream SeedStream::trial(std::uint64_t index) const {
  return SeedStream(mix_seed(mix_seed(seed_, 0x7472'6961'6C00ULL), index));
}

std::vector<std::size_t> BatchDraw::indices() const {
  std::vector<std::size_t> out;
  out.reserve(batch_size);
  for (const auto& e : entries) out.insert(out.end(), e.count, e.index);
  return out;
}

namespace {

BatchDraw compress(std::vector<std::size_t> idx, std::uint64_t k) {
  std::sort(idx.begin(), idx.end());
  BatchDraw draw;
  draw.iteration = k;
  draw.batch_size = idx.size();
  for (auto i : idx) {
    if (!draw.entries.empty() && draw.entries.back().index == i) {
      ++draw.entries.back().count;
    } else {
      draw.entries.push_back({i, 1});
    }
  }
  return draw;
}

}  // namespace

namespace {

// std::binomial_distribution stops terminating near 2^62 trials; above 2^53
// the normal approximation is used (its error is O(1 / sd), sd >= 2^25).
constexpr std::uint64_t kExactBinomialLimit = std::uint64_t{1} << 53;

std::uint64_t binomial(std::mt19937_64& rng, std::uint64_t trials, double p) {
  if (trials <= kExactBinomialLimit) {
    std::binomial_distribution<std::uint64_t> bin(trials, p);
    return bin(rng);
  }
  const double t = static_cast<double>(trials);
  std::normal_distribution<double> z;
  const double v = std::round(t * p + std::sqrt(t * p * (1.0 - p)) * z(rng));
  if (v <= 0.0) return 0;
  if (v >= t) return trials;
  return std::min(trials, static_cast<std::uint64_t>(v));
}

}  // namespace

BatchDraw sample_batch(const SeedStream& stream, std::uint64_t k, std::size_t n, std::uint64_t b) {
  if (n < 1) throw DomainError("sample_batch: n must be >= 1");
  if (b < 1) throw DomainError("sample_batch: b must be >= 1");
  auto rng = stream.engine_for(k);

  if (b < n) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(b);
    for (auto& i : idx) i = pick(rng);
    return compress(std::move(idx), k);
  }

  // Multinomial(b; 1/n, ..., 1/n) as a chain of conditional binomials.
  BatchDraw draw;
  draw.iteration = k;
  draw.batch_size = b;
  std::uint64_t left = b;
  for (std::size_t i = 0; i < n && left > 0; ++i) {
    std::uint64_t c = left;
    if (i + 1 < n) c = binomial(rng, left, 1.0 / static_cast<double>(n - i));
    if (c > 0) draw.entries.push_back({i, c});
    left -= c;
  }
  return draw;
}

BatchDraw draw_from_indices(std::vector<std::size_t> indices, std::uint64_t k) {
  if (indices.empty()) throw DomainError("draw_from_indices: empty batch");
  return compress(std::move(indices), k);
}

void apply_mini_batch(const MappingFamily& family, const BatchDraw& draw, const Vector& x,
                      Vector& out) {
  if (draw.batch_size < 1) throw DomainError("apply_mini_batch: empty draw");
  const double b = static_cast<double>(draw.batch_size);
  std::vector<WeightedIndex> terms;
  terms.reserve(draw.entries.size());
  for (const auto& e : draw.entries) {
    if (e.index >= family.size()) throw std::out_of_range("apply_mini_batch: index out of range");
    terms.push_back({e.index, static_cast<double>(e.count) / b});
  }
  family.weighted_sum(terms, x, out);
}

Point apply_mini_batch(const MappingFamily& family, const BatchDraw& draw, const Point& x) {
  Vector out;
  apply_mini_batch(family, draw, x.vec(), out);
  return Point(std::move(out));
}

}  // namespace halpern
