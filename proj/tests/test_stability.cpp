#include "stablelab/genprefs.hpp"
#include "stablelab/stability.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace stablelab;

namespace {

const BipartiteMatching kIdentity2{{0, 1}};

PairWitness pair_of(const StabilityResult& r) { return std::get<PairWitness>(*r.witness); }

}  // namespace

TEST_CASE("weak block on a hand-checked pair") {
  // Man 1 ranks w2 first and w2 ranks m1 first; the pair (m2, w1) blocks as well.
  const BipartiteStrictInstance inst(2, {{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
  CHECK(is_weak_block_bipartite(inst, kIdentity2, 0, 1));
  CHECK(is_weak_block_bipartite(inst, kIdentity2, 1, 0));
  CHECK_THROWS_AS(is_weak_block_bipartite(inst, kIdentity2, 0, 0), std::invalid_argument);

  const auto res = is_stable(inst, kIdentity2, Notion::Weak);
  CHECK_FALSE(res.stable);
  CHECK(pair_of(res) == PairWitness{0, 1});
}

TEST_CASE("own partner first means no blocks") {
  const BipartiteStrictInstance inst(2, {{0, 1}, {1, 0}}, {{0, 1}, {1, 0}});
  for (Notion nt : {Notion::Weak, Notion::Strong, Notion::Super}) {
    CHECK(is_stable(inst, kIdentity2, nt).stable);
    CHECK_FALSE(is_block(inst, kIdentity2, 0, 1, nt));
    CHECK_FALSE(is_block(inst, kIdentity2, 1, 0, nt));
  }
}

TEST_CASE("men (2,1),(1,2) women (1,2),(2,1) under the identity is stable") {
  // Each woman ranks her own partner first, so no pair can block.
  const BipartiteStrictInstance inst(2, {{1, 0}, {0, 1}}, {{0, 1}, {1, 0}});
  CHECK(is_stable(inst, kIdentity2, Notion::Weak).stable);
  CHECK(oracle::strict_stable(inst, kIdentity2.partner));
}

TEST_CASE("poset predicates on incomparable pairs") {
  // First side agent 0 holds (0.1, 0.9) for cand 0 = M(0) and (0.3, 0.2) for cand 1.
  PointMatrix x(4, 2), y(4, 2);
  x << 0.1, 0.9, 0.3, 0.2,  //
      0.5, 0.5, 0.6, 0.6;
  // Woman 1: cand 0 (man 0) at (0.4, 0.1), cand 1 (her partner) at (0.2, 0.8).
  y << 0.1, 0.1, 0.2, 0.2,  //
      0.4, 0.1, 0.2, 0.8;
  const BipartitePosetInstance inst(2, x, y);
  CHECK_FALSE(is_weak_block_bipartite(inst, kIdentity2, 0, 1));
  CHECK_FALSE(is_strong_block_bipartite(inst, kIdentity2, 0, 1));
  CHECK(is_super_block_bipartite(inst, kIdentity2, 0, 1));

  // Man 0 now strictly prefers woman 1; woman 1 still finds the two men incomparable.
  x.row(1) << 0.05, 0.1;
  const BipartitePosetInstance prefers(2, x, y);
  CHECK_FALSE(is_weak_block_bipartite(prefers, kIdentity2, 0, 1));
  CHECK(is_strong_block_bipartite(prefers, kIdentity2, 0, 1));
  CHECK(is_super_block_bipartite(prefers, kIdentity2, 0, 1));

  // Man 0 strictly prefers his own partner.
  x.row(1) << 0.3, 0.95;
  const BipartitePosetInstance keeps(2, x, y);
  CHECK_FALSE(is_super_block_bipartite(keeps, kIdentity2, 0, 1));
  CHECK_FALSE(is_strong_block_bipartite(keeps, kIdentity2, 0, 1));
}

TEST_CASE("both worse is no strong block") {
  const BipartiteStrictInstance inst(2, {{0, 1}, {1, 0}}, {{0, 1}, {1, 0}});
  CHECK_FALSE(is_strong_block_bipartite(inst, kIdentity2, 0, 1));
  CHECK_FALSE(is_super_block_bipartite(inst, kIdentity2, 0, 1));
}

TEST_CASE("bipartite checkers agree with the brute-force oracle") {
  for (std::uint64_t t = 0; t < 150; ++t) {
    const auto strict = gen_bipartite_strict(4, {31, t});
    const auto poset = gen_bipartite_poset(4, 2, 2, {31, t});
    const auto flat = gen_bipartite_poset(3, 1, 1, {31, t});
    const auto sorted = sorted_lists(flat);
    for_each_permutation(4, [&](const Permutation& p) {
      const BipartiteMatching m{p};
      CHECK(is_stable(strict, m, Notion::Weak).stable == oracle::strict_stable(strict, p));
      for (int nt = 0; nt < 3; ++nt) {
        CHECK(is_stable(poset, m, static_cast<Notion>(nt)).stable == oracle::poset_stable(poset, p, nt));
      }
      // Weak => strong => super as blocking relations on every pair.
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          if (p[i] == j) continue;
          if (is_weak_block_bipartite(poset, m, i, j)) CHECK(is_strong_block_bipartite(poset, m, i, j));
          if (is_strong_block_bipartite(poset, m, i, j)) CHECK(is_super_block_bipartite(poset, m, i, j));
        }
      }
    });
    for_each_permutation(3, [&](const Permutation& p) {
      const BipartiteMatching m{p};
      const bool s = is_stable(sorted, m, Notion::Weak).stable;
      for (Notion nt : {Notion::Weak, Notion::Strong, Notion::Super}) CHECK(is_stable(flat, m, nt).stable == s);
    });
    const auto counts = count_all_notions(poset);
    CHECK(counts.weak == oracle::poset_count(poset, 0));
    CHECK(counts.strong == oracle::poset_count(poset, 1));
    CHECK(counts.super == oracle::poset_count(poset, 2));
    CHECK(counts.examined == 24);
    CHECK(count_stable(strict, Notion::Weak).count == oracle::strict_count(strict));
  }
}

TEST_CASE("lexicographically first witness") {
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto inst = gen_bipartite_strict(5, {17, t});
    const BipartiteMatching m{{4, 3, 2, 1, 0}};
    const auto res = is_stable(inst, m, Notion::Weak);
    if (res.stable) continue;
    const auto w = pair_of(res);
    CHECK(is_weak_block_bipartite(inst, m, w.first, w.second));
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i > w.first || (i == w.first && j >= w.second)) break;
        if (m.partner[i] != j) CHECK_FALSE(is_weak_block_bipartite(inst, m, i, j));
      }
    }
  }
}

TEST_CASE("cyclic threshold semantics") {
  // n = 2, r = 3, M = identity: cycles (0,0,0) and (1,1,1).
  // Side 0 agent 0 prefers 1, side 1 agent 1 prefers 0, side 2 agent 0 prefers 0.
  const CyclicStrictInstance inst(3, 2, {{{1, 0}, {0, 1}}, {{0, 1}, {0, 1}}, {{0, 1}, {0, 1}}});
  const auto m = CyclicMatching::identity(3, 2);
  const std::vector<int> tuple{0, 1, 0};  // agents of sides 0, 1, 2
  // 0->1: prefers; 1->0: side 1 agent 1 ranks 0 first, M-successor is 1: prefers;
  // 0->0 on side 2: equals its M-successor, no preference.
  CHECK_FALSE(is_block_cyclic(inst, m, tuple, 3));
  CHECK(is_block_cyclic(inst, m, tuple, 2));
  CHECK_THROWS_AS(is_block_cyclic(inst, m, std::vector<int>{0, 0, 0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(is_block_cyclic(inst, m, std::vector<int>{0, 0}, 2), std::invalid_argument);

  // n = 3: every agent of the tuple (0, 1, 2) prefers its tuple successor.
  const CyclicStrictInstance three(3, 3,
                                   {{{1, 0, 2}, {0, 1, 2}, {0, 1, 2}},
                                    {{0, 1, 2}, {2, 0, 1}, {0, 1, 2}},
                                    {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}});
  const auto m3 = CyclicMatching::identity(3, 3);
  CHECK(is_block_cyclic(three, m3, std::vector<int>{0, 1, 2}, 3));
  CHECK_FALSE(is_stable(three, m3, CyclicNotion::weak(3)).stable);
}

TEST_CASE("single-agent cyclic market is stable") {
  const CyclicStrictInstance inst(3, 1, {{{0}}, {{0}}, {{0}}});
  CHECK(is_stable(inst, CyclicMatching::identity(3, 1), CyclicNotion::weak(3)).stable);
  CHECK(count_stable(inst, CyclicNotion::weak(3)).count == 1);
}

TEST_CASE("cyclic checker agrees with the brute-force oracle") {
  for (std::uint64_t t = 0; t < 40; ++t) {
    const auto inst = gen_cyclic_strict(3, 3, {5, t});
    const auto weak = count_stable(inst, CyclicNotion::weak(3));
    CHECK(weak.examined == 36);
    CHECK(weak.count == oracle::cyclic_count(inst, 3));
    CHECK(count_stable(inst, CyclicNotion::strong(3)).count == oracle::cyclic_count(inst, 2));
    const auto four = gen_cyclic_strict(4, 2, {5, t});
    CHECK(count_stable(four, CyclicNotion::weak(4)).count == oracle::cyclic_count(four, 4));
    CHECK(count_stable(four, CyclicNotion::strong(4, 2)).count == oracle::cyclic_count(four, 2));
  }
}

TEST_CASE("keep-partner variant blocks no more than the plain threshold") {
  for (std::uint64_t t = 0; t < 40; ++t) {
    const auto inst = gen_cyclic_strict(3, 3, {12, t});
    const auto plain = count_stable(inst, CyclicNotion::strong(3, 2, false)).count;
    const auto keep = count_stable(inst, CyclicNotion::strong(3, 2, true)).count;
    const auto weak = count_stable(inst, CyclicNotion::weak(3)).count;
    CHECK(plain <= keep);
    CHECK(keep <= weak);
  }
}

TEST_CASE("enumeration caps") {
  CHECK(count_stable(gen_bipartite_strict(1, {}), Notion::Weak).count == 1);
  CHECK_THROWS_AS(count_stable(gen_bipartite_strict(8, {}), Notion::Weak), CapExceeded);
  CHECK_THROWS_AS(count_stable(gen_cyclic_strict(3, 7, {}), CyclicNotion::weak(3)), CapExceeded);
  CountOptions<BipartiteMatching> relaxed;
  relaxed.cap.max_bipartite_n = 8;
  relaxed.collect = true;
  const auto res = count_stable(gen_bipartite_strict(8, {3, 3}), Notion::Weak, relaxed);
  CHECK(res.examined == 40320);
  CHECK(res.matchings.size() == res.count);
  CHECK(res.count >= 1);
  try {
    check_cap(9, EnumerationCap{});
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(std::string(e.what()).find("use experiment --mc") != std::string::npos);
  }
}

TEST_CASE("every n = 2 strict instance has a weakly stable matching") {
  int instances = 0;
  oracle::for_each_strict_instance(2, [&](const BipartiteStrictInstance& inst) {
    ++instances;
    CHECK(count_stable(inst, Notion::Weak).count >= 1);
  });
  CHECK(instances == 16);
}
