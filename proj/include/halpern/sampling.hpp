#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "halpern/core.hpp"

namespace halpern {

/// Seed for one trial. Each iteration k gets its own generator derived from
/// (seed, k), so draws at iteration k do not depend on what earlier
/// iterations consumed.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64 engine_for(std::uint64_t k) const;
  /// Independent stream for trial `index` of an ensemble seeded with seed().
  SeedStream trial(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

/// Mixes two words into one (splitmix64 finalizer over a combined key).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// b i.i.d. DU(n) indices, stored as (index, multiplicity) with distinct
/// indices ascending. Indices are 0-based.
struct BatchDraw {
  struct Entry {
    std::size_t index;
    std::uint64_t count;
  };

  std::uint64_t iteration = 0;
  std::uint64_t batch_size = 0;
  std::vector<Entry> entries;

  /// The multiset expanded into a sorted index list of length batch_size.
  std::vector<std::size_t> indices() const;
};

/// Draws b indices uniformly from {0, ..., n-1} with replacement for
/// iteration k. Only the multiplicities are kept: small batches draw the
/// indices one by one, large ones draw the multinomial counts directly.
BatchDraw sample_batch(const SeedStream& stream, std::uint64_t k, std::size_t n, std::uint64_t b);

/// Builds a draw from explicit (possibly repeated) indices.
BatchDraw draw_from_indices(std::vector<std::size_t> indices, std::uint64_t k = 0);

/// Mini-batch mapping (1/b) sum_i T_{xi_i}(x), accumulated over distinct
/// indices ascending with weights count/b.
void apply_mini_batch(const MappingFamily& family, const BatchDraw& draw, const Vector& x,
                      Vector& out);
Point apply_mini_batch(const MappingFamily& family, const BatchDraw& draw, const Point& x);

}  // namespace halpern
