#include "stablelab/genprefs.hpp"
#include "stablelab/matchalg.hpp"
#include "stablelab/stability.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace stablelab;

TEST_CASE("first choices forming a matching need n proposals") {
  const BipartiteStrictInstance inst(3, {{2, 0, 1}, {0, 1, 2}, {1, 2, 0}}, {{1, 0, 2}, {2, 0, 1}, {0, 1, 2}});
  const auto trace = gale_shapley(inst);
  CHECK(trace.matching.partner == Permutation{2, 0, 1});
  CHECK(trace.total_proposals == 3);
  CHECK(trace.per_man_rank == std::vector<int>{1, 1, 1});
}

TEST_CASE("hand-simulated n = 2 proposal sequence") {
  const BipartiteStrictInstance inst(2, {{0, 1}, {0, 1}}, {{0, 1}, {0, 1}});
  for (auto order : {ProposalOrder::LowestFreeFirst, ProposalOrder::LastRejectedFirst}) {
    const auto trace = gale_shapley(inst, order);
    CHECK(trace.matching.partner == Permutation{0, 1});
    CHECK(trace.total_proposals == 3);
    CHECK(trace.per_man_rank == std::vector<int>{1, 2});
  }
}

TEST_CASE("gale_shapley matches the round-based oracle and is stable") {
  for (std::uint64_t t = 0; t < 2000; ++t) {
    const auto inst = gen_bipartite_strict(8, {41, t});
    const auto trace = gale_shapley(inst);
    const auto chain = gale_shapley(inst, ProposalOrder::LastRejectedFirst);
    const auto ref = oracle::deferred_acceptance(inst);
    REQUIRE(trace.matching.partner == ref.partner);
    CHECK(chain.matching == trace.matching);
    CHECK(trace.total_proposals == ref.proposals);
    CHECK(chain.total_proposals == ref.proposals);
    CHECK(oracle::strict_stable(inst, trace.matching.partner));
  }
}

TEST_CASE("man-optimal and woman-optimal extremes") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(t % 4);
    const auto inst = gen_bipartite_strict(n, {73, t});
    const auto men = gale_shapley(inst).matching;
    const auto women = woman_optimal(inst);
    CHECK(oracle::strict_stable(inst, women.partner));
    const auto stable = oracle::stable_set(n, [&](const Permutation& p) { return oracle::strict_stable(inst, p); });
    for (const auto& p : stable) {
      for (int m = 0; m < n; ++m) {
        CHECK(inst.rank(Side::First, m, men.partner[m]) <= inst.rank(Side::First, m, p[m]));
        CHECK(inst.rank(Side::First, m, women.partner[m]) >= inst.rank(Side::First, m, p[m]));
      }
    }
  }
}

TEST_CASE("swap_sides is an involution") {
  const auto inst = gen_bipartite_strict(5, {2, 2});
  CHECK(swap_sides(swap_sides(inst)) == inst);
  CHECK(swap_sides(inst).prefs(Side::First) == inst.prefs(Side::Second));
}

TEST_CASE("extension on dimension 1 equals gale_shapley on sorted lists") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto poset = gen_bipartite_poset(6, 1, 1, {19, t});
    CHECK(weak_stable_via_extension(poset, {19, t}) == gale_shapley(sorted_lists(poset)).matching);
    CHECK(linear_extension_instance(poset, {19, t}) == sorted_lists(poset));
  }
}

TEST_CASE("extension output is weakly stable on the poset") {
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto poset = gen_bipartite_poset(8, 2, 2, {23, t});
    const auto m = weak_stable_via_extension(poset, {23, t});
    CHECK(oracle::poset_stable(poset, m.partner, 0));
  }
}

TEST_CASE("proposal statistics") {
  const auto one = proposal_statistics(1, 10, {1, 0});
  CHECK(one.mean == 1.0);
  CHECK(one.stddev == 0.0);

  const auto s = proposal_statistics(20, 400, {9, 0}, 4);
  CHECK(s.trials == 400);
  CHECK(s.ci_low < s.mean);
  CHECK(s.mean < s.ci_high);
  // Thread count does not change the result.
  const auto serial = proposal_statistics(20, 400, {9, 0}, 1);
  CHECK(serial.mean == s.mean);
  CHECK(serial.stddev == s.stddev);
  CHECK_THROWS_AS(proposal_statistics(5, 1, {}), std::invalid_argument);
}

TEST_CASE("exhaustive n = 2 proposal mean is 5/2") {
  // Total proposals are 2 when the men's first choices differ and 3
  // otherwise, each with probability 1/2.
  std::uint64_t total = 0, instances = 0;
  oracle::for_each_strict_instance(2, [&](const BipartiteStrictInstance& inst) {
    total += gale_shapley(inst).total_proposals;
    ++instances;
  });
  CHECK(instances == 16);
  CHECK(total == 40);
}
