#include "stablelab/genprefs.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace stablelab;

TEST_CASE("n = 1 instances are trivial") {
  const auto s = gen_bipartite_strict(1, {5, 0});
  CHECK(s.prefs(Side::First) == std::vector<Permutation>{{0}});
  CHECK(s.prefs(Side::Second) == std::vector<Permutation>{{0}});
  const auto c = gen_cyclic_strict(3, 1, {5, 0});
  for (int side = 0; side < 3; ++side) CHECK(c.row(side, 0) == Permutation{0});
  const auto p = gen_bipartite_poset(1, 1, 1, {5, 0});
  CHECK(validate(p).empty());
  CHECK(p.points(Side::First).rows() == 1);
}

TEST_CASE("generators are deterministic per seed and valid") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const SeedSpec seed{99, t};
    const auto a = gen_bipartite_strict(3, seed);
    CHECK(a == gen_bipartite_strict(3, seed));
    CHECK(validate(a).empty());
    const auto c = gen_cyclic_strict(3, 2, seed);
    CHECK(c == gen_cyclic_strict(3, 2, seed));
    CHECK(validate(c).empty());
    const auto p = gen_bipartite_poset(4, 2, 3, seed);
    CHECK(p == gen_bipartite_poset(4, 2, 3, seed));
    CHECK(validate(p).empty());
    CHECK(p.dimension(Side::First) == 2);
    CHECK(p.dimension(Side::Second) == 3);
  }
  CHECK_FALSE(gen_bipartite_strict(4, {1, 0}) == gen_bipartite_strict(4, {1, 1}));
  CHECK_THROWS_WITH_AS(gen_bipartite_strict(0, {}), "n must be ≥ 1", std::invalid_argument);
  CHECK_THROWS_AS(gen_cyclic_strict(1, 2, {}), std::invalid_argument);
}

TEST_CASE("strict rows are uniform permutations") {
  // n = 2: man 1's row is (1,2) with probability 1/2.
  const int trials = 100000;
  int identity_rows = 0;
  for (int t = 0; t < trials; ++t) {
    identity_rows += gen_bipartite_strict(2, {2024, static_cast<std::uint64_t>(t)}).row(Side::First, 0)[0] == 0;
  }
  CHECK(std::abs(identity_rows / double(trials) - 0.5) < 0.005);

  // n = 3: chi-square over the 6 permutations, 5 degrees of freedom.
  Stream rng({3, 0}, "perm-test");
  std::map<Permutation, int> freq;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++freq[random_permutation(3, rng)];
  REQUIRE(freq.size() == 6);
  double chi2 = 0;
  for (const auto& [perm, c] : freq) chi2 += (c - draws / 6.0) * (c - draws / 6.0) / (draws / 6.0);
  CHECK(chi2 < 20.5);  // 0.999 quantile of chi-square(5)
}

TEST_CASE("two-dimensional points are comparable with probability 1/2") {
  // Two independent uniform points of [0,1]^k are comparable with
  // probability 2 / 2^k; for k = 2 that is 1/2.
  int comparable = 0, pairs = 0;
  for (std::uint64_t t = 0; pairs < 100000; ++t) {
    const auto p = gen_bipartite_poset(5, 2, 1, {11, t});
    for (int a = 0; a < 5; ++a) {
      for (int c = 0; c + 1 < 5; c += 2) {
        comparable += compare(p, Side::First, a, c, c + 1) != PrefComparison::Incomparable;
        ++pairs;
      }
    }
  }
  CHECK(std::abs(comparable / double(pairs) - 0.5) < 0.01);
}

TEST_CASE("linear extensions respect the partial order") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto p = gen_bipartite_poset(6, 3, 2, {8, t});
    for (Side s : {Side::First, Side::Second}) {
      for (int a = 0; a < 6; ++a) {
        const Permutation ext = extend_to_linear(p, s, a, {8, t});
        REQUIRE(is_permutation_of_range(ext, 6));
        CHECK(ext == extend_to_linear(p, s, a, {8, t}));
        for (int i = 0; i < 6; ++i) {
          for (int j = i + 1; j < 6; ++j) {
            CHECK(compare(p, s, a, ext[i], ext[j]) != PrefComparison::StrictlyWorse);
          }
        }
      }
    }
  }
}

TEST_CASE("dimension-1 extension is the sorted order") {
  const auto p = gen_bipartite_poset(5, 1, 1, {4, 4});
  const auto sorted = sorted_lists(p);
  for (int a = 0; a < 5; ++a) {
    CHECK(extend_to_linear(p, Side::First, a, {1, 2}) == sorted.row(Side::First, a));
    CHECK(extend_to_linear(p, Side::Second, a, {1, 2}) == sorted.row(Side::Second, a));
    for (int i = 0; i + 1 < 5; ++i) {
      const int c = sorted.row(Side::First, a)[i], d = sorted.row(Side::First, a)[i + 1];
      CHECK(p.point(Side::First, a, c)(0) < p.point(Side::First, a, d)(0));
    }
  }
  CHECK_THROWS_AS(sorted_lists(gen_bipartite_poset(2, 2, 1, {})), std::invalid_argument);
}

TEST_CASE("pairwise incomparable points reach every extension") {
  // Points on the anti-diagonal are pairwise incomparable.
  PointMatrix x(9, 2), y(9, 1);
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      x(a * 3 + c, 0) = 0.1 + 0.3 * c;
      x(a * 3 + c, 1) = 0.9 - 0.3 * c;
      y(a * 3 + c, 0) = 0.2 + 0.3 * c;
    }
  }
  const BipartitePosetInstance p(3, x, y);
  std::set<Permutation> seen;
  for (std::uint64_t t = 0; t < 500; ++t) seen.insert(extend_to_linear(p, Side::First, 0, {77, t}));
  CHECK(seen.size() == 6);
}

TEST_CASE("adding a dimension only intersects orders") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto base = gen_bipartite_poset(5, 2, 2, {6, t});
    const auto coupled = couple_add_dimension(base, Side::First, {6, t});
    CHECK(coupled.dimension(Side::First) == 3);
    CHECK(coupled.points(Side::Second) == base.points(Side::Second));
    CHECK(coupled.points(Side::First).leftCols(2) == base.points(Side::First));
    CHECK(validate(coupled).empty());
    for (int a = 0; a < 5; ++a) {
      for (int c = 0; c < 5; ++c) {
        for (int d = 0; d < 5; ++d) {
          if (c == d) continue;
          const auto before = compare(base, Side::First, a, c, d);
          const auto after = compare(coupled, Side::First, a, c, d);
          if (before == PrefComparison::StrictlyBetter) CHECK(after != PrefComparison::StrictlyWorse);
          if (before == PrefComparison::Incomparable) CHECK(after == PrefComparison::Incomparable);
        }
      }
    }
  }
}
