#include "doctest.h"

#include <cmath>

#include "essf/marked_partition.hpp"
#include "essf/rng.hpp"

using namespace essf;

namespace {

MarkedPartition random_partition(uint32_t n, Rng& rng) {
  std::vector<uint32_t> assignment(n);
  uint32_t labels = 0;
  std::vector<double> marks;
  for (uint32_t i = 0; i < n; ++i) {
    // new block with probability 1/2, otherwise reuse an existing label
    if (labels == 0 || rng.uniform01() < 0.5) {
      assignment[i] = ++labels;
      marks.push_back(rng.uniform01() < 0.25 ? 0.0 : rng.uniform01() * 3.0);
    } else {
      assignment[i] = 1 + static_cast<uint32_t>(rng.below(labels));
    }
  }
  return MarkedPartition::from_assignment(assignment, marks);
}

bool canonical(const MarkedPartition& x) {
  uint32_t seen = 0;
  for (uint32_t a : x.assignment()) {
    if (a > seen + 1) return false;
    seen = std::max(seen, a);
  }
  return seen == x.block_count();
}

std::vector<uint32_t> random_permutation(uint32_t n, Rng& rng) {
  std::vector<uint32_t> sigma(n);
  for (uint32_t i = 0; i < n; ++i) sigma[i] = i + 1;
  for (uint32_t i = n; i > 1; --i) std::swap(sigma[i - 1], sigma[rng.below(i)]);
  return sigma;
}

}  // namespace

TEST_CASE("restriction basics") {
  const auto one5 = MarkedPartition::single_block(5, 2.5);
  CHECK(restrict(one5, 3) == MarkedPartition::single_block(3, 2.5));

  const auto x = MarkedPartition::from_assignment({1, 2, 1}, {1.5, 0.0});
  const auto r = restrict(x, 2);
  CHECK(r.block_count() == 2);
  CHECK(r.label_of(1) == 1);
  CHECK(r.label_of(2) == 2);
  CHECK(r.mark_of(1) == 1.5);
  CHECK(r.mark_of(2) == 0.0);

  CHECK_THROWS_AS(restrict(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(restrict(x, 4), std::invalid_argument);
}

TEST_CASE("restriction tower property") {
  Rng rng(99);
  for (int it = 0; it < 50; ++it) {
    const auto x = random_partition(8, rng);
    const uint32_t k = 3 + static_cast<uint32_t>(rng.below(6));  // 3..8
    const uint32_t n = 1 + static_cast<uint32_t>(rng.below(k));
    CHECK(restrict(restrict(x, k), n) == restrict(x, n));
  }
}

TEST_CASE("permutation action") {
  const auto x = MarkedPartition::from_assignment({1, 1, 2}, {0.7, 0.2});
  // identity
  CHECK(apply_permutation(x, {1, 2, 3}) == x);
  // swap 1 and 3: {{1},{2,3}} with marks (0.2, 0.7)
  const auto y = apply_permutation(x, {3, 2, 1});
  CHECK(y.label_of(1) == 1);
  CHECK(y.label_of(2) == 2);
  CHECK(y.label_of(3) == 2);
  CHECK(y.mark_of(1) == 0.2);
  CHECK(y.mark_of(2) == 0.7);
  CHECK_THROWS_AS(apply_permutation(x, {1, 1, 2}), std::invalid_argument);
}

TEST_CASE("permutation group action composes") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    const uint32_t n = 2 + static_cast<uint32_t>(rng.below(6));
    const auto x = random_partition(n, rng);
    const auto sigma = random_permutation(n, rng);
    const auto tau = random_permutation(n, rng);
    // (x^sigma)^tau = x^(sigma o tau)
    std::vector<uint32_t> comp(n);
    for (uint32_t i = 0; i < n; ++i) comp[i] = sigma[tau[i] - 1];
    CHECK(apply_permutation(apply_permutation(x, sigma), tau) == apply_permutation(x, comp));
  }
}

TEST_CASE("restriction commutes with permutations fixing the tail") {
  Rng rng(13);
  for (int it = 0; it < 50; ++it) {
    const uint32_t m = 6;
    const uint32_t n = 3;
    const auto x = random_partition(m, rng);
    auto sigma = random_permutation(n, rng);
    std::vector<uint32_t> sigma_full = sigma;
    for (uint32_t i = n; i < m; ++i) sigma_full.push_back(i + 1);
    CHECK(restrict(apply_permutation(x, sigma_full), n) ==
          apply_permutation(restrict(x, n), sigma));
  }
}

TEST_CASE("frag identity and products") {
  Rng rng(4);
  const auto x = random_partition(6, rng);
  std::vector<MarkedPartition> identity_parts;
  for (uint32_t k = 1; k <= x.block_count(); ++k)
    identity_parts.push_back(
        MarkedPartition::single_block(static_cast<uint32_t>(x.members(k).size()), 1.0));
  CHECK(frag(x, identity_parts) == x);

  const auto two = MarkedPartition::single_block(2, 3.0);
  const auto split = MarkedPartition::from_assignment({1, 2}, {0.5, 0.25});
  const auto kids = frag(two, {split});
  CHECK(kids.block_count() == 2);
  CHECK(kids.mark_of(1) == doctest::Approx(1.5));
  CHECK(kids.mark_of(2) == doctest::Approx(0.75));

  // frozen mothers stay intact
  const auto frozen = MarkedPartition::single_block(2, 0.0);
  CHECK(frag(frozen, {split}) == frozen);

  CHECK_THROWS_AS(frag(x, {}), std::invalid_argument);
}

TEST_CASE("frag never merges and keeps canonical labels") {
  Rng rng(21);
  for (int it = 0; it < 60; ++it) {
    const uint32_t n = 2 + static_cast<uint32_t>(rng.below(6));
    const auto x = random_partition(n, rng);
    std::vector<MarkedPartition> parts;
    for (uint32_t k = 1; k <= x.block_count(); ++k)
      parts.push_back(random_partition(static_cast<uint32_t>(x.members(k).size()), rng));
    const auto y = frag(x, parts);
    CHECK(canonical(y));
    CHECK(y.finer_or_equal(x));
    // operations preserve canonical labels
    CHECK(canonical(restrict(x, 1 + static_cast<uint32_t>(rng.below(n)))));
    CHECK(canonical(apply_permutation(x, random_permutation(n, rng))));
  }
}

TEST_CASE("empirical frequencies") {
  const auto one = MarkedPartition::single_block(7, 1.25);
  auto est = empirical_frequencies(one);
  REQUIRE(est.pairs.size() == 1);
  CHECK(est.pairs[0].first == doctest::Approx(1.0));
  CHECK(est.pairs[0].second == doctest::Approx(1.25));

  const auto dust = MarkedPartition::singletons(4, 0.0);
  est = empirical_frequencies(dust);
  REQUIRE(est.pairs.size() == 4);
  for (const auto& [f, v] : est.pairs) {
    CHECK(f == doctest::Approx(0.25));
    CHECK(v == 0.0);
  }

  // entries sum to exactly one and come sorted lexicographically
  Rng rng(31);
  for (int it = 0; it < 40; ++it) {
    const auto x = random_partition(9, rng);
    est = empirical_frequencies(x);
    double total = 0.0;
    for (size_t i = 0; i < est.pairs.size(); ++i) {
      total += est.pairs[i].first;
      if (i > 0) {
        const bool ordered = est.pairs[i - 1].first > est.pairs[i].first ||
                             (est.pairs[i - 1].first == est.pairs[i].first &&
                              est.pairs[i - 1].second >= est.pairs[i].second);
        CHECK(ordered);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("text serialization round trip") {
  Rng rng(77);
  for (int it = 0; it < 30; ++it) {
    const auto x = random_partition(6, rng);
    CHECK(MarkedPartition::from_text(x.to_text()) == x);
  }
  const auto x = MarkedPartition::from_assignment({1, 2, 1}, {0.5, 0.0});
  CHECK(x.to_text() == "n=3\n1 2 1\n0.5 0\n");
  CHECK_THROWS_AS(MarkedPartition::from_text("bogus"), std::invalid_argument);
}

TEST_CASE("frag uses only the restriction of larger parts") {
  // a part may come at any level at or above the block size
  const auto x = MarkedPartition::from_assignment({1, 2, 1}, {2.0, 3.0});
  const auto big_a = MarkedPartition::from_assignment({1, 2, 1, 2, 2}, {0.5, 0.25});
  const auto big_b = MarkedPartition::from_assignment({1, 1, 2}, {1.0, 9.0});
  const auto y = frag(x, {big_a, big_b});
  // block {1,3} of x splits via big_a|_2 = {{1},{2}}, block {2} stays whole
  CHECK(y.block_count() == 3);
  CHECK(y.label_of(1) != y.label_of(3));
  CHECK(y.mark_of(1) == doctest::Approx(2.0 * 0.5));
  CHECK(y.mark_of(3) == doctest::Approx(2.0 * 0.25));
  CHECK(y.mark_of(2) == doctest::Approx(3.0 * 1.0));
  // extra parts beyond the block count are ignored
  const auto pad = MarkedPartition::single_block(4, 1.0);
  CHECK(frag(x, {big_a, big_b, pad}) == y);
  // a part below the block size is an error
  CHECK_THROWS_AS(frag(x, {MarkedPartition::single_block(1, 1.0), big_b}),
                  std::invalid_argument);
}
