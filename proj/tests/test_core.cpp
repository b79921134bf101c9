#include "stablelab/core.hpp"
#include "stablelab/rng.hpp"

#include <doctest.h>

using namespace stablelab;

namespace {

BipartitePosetInstance two_point_poset(double a0, double a1, double b0, double b1) {
  // n = 2, agent 0 of the first side holds points a (cand 0) and b (cand 1).
  PointMatrix x(4, 2), y(4, 1);
  x << a0, a1, b0, b1, 0.5, 0.6, 0.7, 0.8;
  y << 0.1, 0.2, 0.3, 0.4;
  return BipartitePosetInstance(2, x, y);
}

}  // namespace

TEST_CASE("strict list comparison follows list position") {
  const BipartiteStrictInstance inst(3, {{1, 0, 2}, {0, 1, 2}, {0, 1, 2}}, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  CHECK(compare(inst, Side::First, 0, 1, 2) == PrefComparison::StrictlyBetter);
  CHECK(compare(inst, Side::First, 0, 2, 0) == PrefComparison::StrictlyWorse);
  CHECK(compare(inst, Side::First, 0, 1, 1) == PrefComparison::Same);
  CHECK(inst.rank(Side::First, 0, 1) == 0);
  CHECK(inst.rank(Side::First, 0, 2) == 2);
  CHECK_THROWS_AS(compare(inst, Side::First, 3, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(compare(inst, Side::Second, 0, 0, 5), std::out_of_range);
}

TEST_CASE("poset comparison is componentwise dominance") {
  CHECK(compare(two_point_poset(0.1, 0.2, 0.3, 0.9), Side::First, 0, 0, 1) == PrefComparison::StrictlyBetter);
  CHECK(compare(two_point_poset(0.1, 0.2, 0.3, 0.9), Side::First, 0, 1, 0) == PrefComparison::StrictlyWorse);
  CHECK(compare(two_point_poset(0.1, 0.9, 0.3, 0.2), Side::First, 0, 0, 1) == PrefComparison::Incomparable);
  CHECK(compare(two_point_poset(0.1, 0.9, 0.3, 0.2), Side::First, 0, 1, 1) == PrefComparison::Same);
  CHECK_THROWS_AS(compare(two_point_poset(0.1, 0.9, 0.1, 0.2), Side::First, 0, 0, 1), InvalidInstance);
}

TEST_CASE("validate reports broken rows and tied coordinates") {
  const BipartiteStrictInstance bad(2, {{0, 0}, {0, 1}}, {{0, 1}, {1, 0}});
  const auto problems = validate(bad);
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("row not a permutation") != std::string::npos);

  const BipartiteStrictInstance good(2, {{1, 0}, {0, 1}}, {{0, 1}, {1, 0}});
  CHECK(validate(good).empty());

  const auto tied = validate(two_point_poset(0.1, 0.9, 0.3, 0.9));
  REQUIRE(tied.size() == 1);
  CHECK(tied[0].find("tied coordinate") != std::string::npos);
  CHECK(validate(two_point_poset(0.1, 0.9, 0.3, 0.2)).empty());

  PointMatrix outside(1, 1), inside(1, 1);
  outside << 1.5;
  inside << 0.5;
  const auto range = validate(BipartitePosetInstance(1, outside, inside));
  REQUIRE(range.size() == 1);
  CHECK(range[0].find("outside [0,1]") != std::string::npos);
}

TEST_CASE("cyclic instances and matchings") {
  const CyclicStrictInstance inst(3, 2, {{{0, 1}, {1, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}});
  CHECK(validate(inst).empty());
  CHECK(compare(inst, 1, 0, 1, 0) == PrefComparison::StrictlyBetter);
  CHECK(compare(inst, 2, 1, 1, 0) == PrefComparison::StrictlyWorse);
  CHECK(inst.rank(0, 1, 1) == 0);

  const CyclicMatching m{{{1, 0}, {0, 1}}};
  CHECK(m.sides() == 3);
  CHECK(m.size() == 2);
  const auto succ = m.successors();
  // Cycles are (0, 1, 0) and (1, 0, 1).
  CHECK(succ[0] == Permutation{1, 0});
  CHECK(succ[1] == Permutation{1, 0});
  CHECK(succ[2] == Permutation{0, 1});
  CHECK(CyclicMatching::identity(3, 2).maps == std::vector<Permutation>{{0, 1}, {0, 1}});

  const CyclicStrictInstance short_rows(3, 2, {{{0, 1}, {1}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}});
  CHECK_FALSE(validate(short_rows).empty());
}

TEST_CASE("bipartite matching inverse") {
  const BipartiteMatching m{{2, 0, 1}};
  CHECK(m.inverse() == Permutation{1, 2, 0});
  CHECK(is_permutation_of_range({2, 0, 1}, 3));
  CHECK_FALSE(is_permutation_of_range({2, 2, 1}, 3));
  CHECK_FALSE(is_permutation_of_range({0, 1}, 3));
}

TEST_CASE("seed parsing and stream reproducibility") {
  CHECK(parse_seed("42") == 42u);
  CHECK(parse_seed("0x2a") == 42u);
  CHECK(parse_seed("18446744073709551615") == ~std::uint64_t{0});
  CHECK_THROWS_AS(parse_seed("4x2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed("18446744073709551616"), std::invalid_argument);

  // Reference values of the two public mixing functions.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

  Stream a({7, 3}, "label"), b({7, 3}, "label"), c({7, 4}, "label"), d({7, 3}, "other");
  const auto va = a(), vb = b(), vc = c(), vd = d();
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);

  Stream u({1, 0}, "uniform");
  int counts[5] = {};
  for (int i = 0; i < 50000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    ++counts[u.below(5)];
  }
  for (int c5 : counts) CHECK(std::abs(c5 - 10000) < 4 * 90);  // sd = sqrt(50000 * 0.2 * 0.8) ~ 89
}
