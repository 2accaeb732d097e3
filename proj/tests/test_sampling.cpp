#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "halpern/mappings.hpp"
#include "halpern/sampling.hpp"
#include "support.hpp"

using namespace halpern;
using testing_support::vec;

namespace {

std::uint64_t total(const BatchDraw& d) {
  std::uint64_t s = 0;
  for (const auto& e : d.entries) s += e.count;
  return s;
}

MappingFamily two_rays() {
  return MappingFamily::custom(
      1, {[](const Vector& x, Vector& out) { out = x.cwiseMin(0.0); },
          [](const Vector& x, Vector& out) { out = x.cwiseMax(1.0); }});
}

}  // namespace

TEST_CASE("single support point") {
  const SeedStream s(1);
  for (std::uint64_t b : {1, 7, 1000, 100000}) {
    const auto d = sample_batch(s, 3, 1, b);
    REQUIRE(d.entries.size() == 1);
    CHECK(d.entries[0].index == 0);
    CHECK(d.entries[0].count == b);
    CHECK(d.batch_size == b);
    CHECK(d.iteration == 3);
  }
}

TEST_CASE("indices stay in range and counts sum to b") {
  const SeedStream s(2);
  for (std::uint64_t k = 0; k < 50; ++k) {
    for (std::uint64_t b : {1, 3, 5, 6, 40, 5000}) {
      const auto d = sample_batch(s, k, 5, b);
      CHECK(total(d) == b);
      CHECK(d.indices().size() == b);
      for (std::size_t j = 0; j < d.entries.size(); ++j) {
        CHECK(d.entries[j].index < 5);
        CHECK(d.entries[j].count >= 1);
        if (j) CHECK(d.entries[j - 1].index < d.entries[j].index);
      }
    }
  }
  CHECK_THROWS_AS(sample_batch(s, 0, 0, 1), DomainError);
  CHECK_THROWS_AS(sample_batch(s, 0, 3, 0), DomainError);
}

TEST_CASE("draws are reproducible per (seed, k) and independent of other iterations") {
  const SeedStream a(77), b(77), c(78);
  const auto first = sample_batch(a, 10, 9, 30);
  sample_batch(b, 9, 9, 1000);  // unrelated draw on the other stream
  const auto again = sample_batch(b, 10, 9, 30);
  CHECK(first.indices() == again.indices());
  CHECK(sample_batch(c, 10, 9, 30).indices() != first.indices());
  CHECK(sample_batch(a, 11, 9, 30).indices() != first.indices());
  CHECK(a.trial(0).seed() != a.trial(1).seed());
  CHECK(a.trial(3).seed() == b.trial(3).seed());
}

TEST_CASE("frequency of index 0 for n = 2, b = 10^5") {
  for (std::uint64_t seed : {1, 2, 3, 42, 2024}) {
    const auto d = sample_batch(SeedStream(seed), 0, 2, 100000);
    const double freq = d.entries[0].index == 0 ? d.entries[0].count / 1e5 : 0.0;
    CHECK(freq >= 0.49);
    CHECK(freq <= 0.51);
  }
}

TEST_CASE("both sampling paths follow DU(n)") {
  // Pooled counts from the per-index path (b < n) and the multinomial path
  // (b >= n); each is checked with a chi-square statistic on 6 cells.
  const std::size_t n = 6;
  for (std::uint64_t b : {4, 60}) {
    std::vector<double> counts(n, 0.0);
    const SeedStream s(9);
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) {
      for (const auto& e : sample_batch(s, k, n, b).entries) counts[e.index] += e.count;
    }
    const double expected = static_cast<double>(draws) * b / n;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 20.5);  // 0.999 quantile of chi-square with 5 degrees of freedom
  }
}

TEST_CASE("mini-batch mapping examples") {
  const auto fam = two_rays();
  CHECK(apply_mini_batch(fam, draw_from_indices({1, 1, 1}), Point{0.5})[0] == 1.0);
  CHECK(apply_mini_batch(fam, draw_from_indices({0, 1}), Point{0.5})[0] == 0.5);
  CHECK(apply_mini_batch(fam, draw_from_indices({1, 0}), Point{2.0})[0] == 1.0);
  CHECK(apply_mini_batch(fam, draw_from_indices({1, 1, 0, 1}), Point{2.0})[0] == 1.5);
  CHECK_THROWS(apply_mini_batch(fam, draw_from_indices({0, 2}), Point{0.5}));

  const auto d = draw_from_indices({3, 1, 3, 0}, 5);
  CHECK(d.iteration == 5);
  CHECK(d.indices() == std::vector<std::size_t>{0, 1, 3, 3});
}

TEST_CASE("each index once reproduces the exact mean") {
  std::mt19937_64 rng(31);
  const auto fam = make_projection_family(testing_support::random_halfspaces(rng, 9, 4));
  std::vector<std::size_t> all(fam.size());
  std::iota(all.begin(), all.end(), 0);
  const auto d = draw_from_indices(all);
  for (int t = 0; t < 20; ++t) {
    const Point x(testing_support::gaussian(rng, 4, 3.0));
    const Point got = apply_mini_batch(fam, d, x);
    CHECK(got == exact_mean_apply(fam, x));
  }
}

TEST_CASE("saturated batch sizes still sample") {
  const std::uint64_t b = std::uint64_t{1} << 62;
  for (std::size_t n : {2, 7}) {
    const auto d = sample_batch(SeedStream(5), 0, n, b);
    CHECK(total(d) == b);
    CHECK(d.entries.size() == n);
    for (const auto& e : d.entries) {
      const double share = static_cast<double>(e.count) / static_cast<double>(b);
      CHECK(std::abs(share - 1.0 / static_cast<double>(n)) < 1e-6);
    }
  }
}
