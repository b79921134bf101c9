#include "stablelab/stability.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace stablelab {

namespace {

using PC = PrefComparison;

void require_shape(int n, const BipartiteMatching& m) {
  if (!is_permutation_of_range(m.partner, n)) {
    throw std::invalid_argument("matching is not a bijection of size " + std::to_string(n));
  }
}

void require_shape(const CyclicStrictInstance& inst, const CyclicMatching& m) {
  if (m.sides() != inst.sides()) throw std::invalid_argument("matching has the wrong number of sides");
  for (const auto& p : m.maps) {
    if (!is_permutation_of_range(p, inst.size())) {
      throw std::invalid_argument("cyclic matching map is not a bijection of size " + std::to_string(inst.size()));
    }
  }
}

struct PairRelations {
  PC first;   // i's view of j against M(i)
  PC second;  // j's view of i against M^-1(j)
};

template <class Inst>
PairRelations relations(const Inst& inst, int i, int j, int partner_of_i, int partner_of_j) {
  return {compare(inst, Side::First, i, j, partner_of_i), compare(inst, Side::Second, j, i, partner_of_j)};
}

bool weak_block(const PairRelations& r) { return r.first == PC::StrictlyBetter && r.second == PC::StrictlyBetter; }

bool strong_block(const PairRelations& r) {
  return (r.first == PC::StrictlyBetter && r.second != PC::StrictlyWorse) ||
         (r.second == PC::StrictlyBetter && r.first != PC::StrictlyWorse);
}

bool super_block(const PairRelations& r) { return r.first != PC::StrictlyWorse && r.second != PC::StrictlyWorse; }

bool block_for(const PairRelations& r, Notion notion) {
  switch (notion) {
    case Notion::Weak: return weak_block(r);
    case Notion::Strong: return strong_block(r);
    case Notion::Super: return super_block(r);
  }
  return false;
}

template <class Inst>
PairRelations queried_relations(const Inst& inst, const BipartiteMatching& m, int i, int j) {
  const int n = inst.size();
  require_shape(n, m);
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::out_of_range("pair index out of range");
  if (m.partner[i] == j) throw std::invalid_argument("queried pair is matched");
  const auto inv = m.inverse();
  return relations(inst, i, j, m.partner[i], inv[j]);
}

template <class Inst>
StabilityResult bipartite_stable(const Inst& inst, const BipartiteMatching& m, Notion notion) {
  const int n = inst.size();
  require_shape(n, m);
  const auto inv = m.inverse();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == m.partner[i]) continue;
      if (block_for(relations(inst, i, j, m.partner[i], inv[j]), notion)) {
        return {false, BlockWitness{PairWitness{i, j}}};
      }
    }
  }
  return {true, std::nullopt};
}

template <class Inst>
CountResult<BipartiteMatching> bipartite_count(const Inst& inst, Notion notion,
                                               const CountOptions<BipartiteMatching>& opts) {
  check_cap(inst.size(), opts.cap);
  CountResult<BipartiteMatching> out;
  for_each_permutation(inst.size(), [&](const Permutation& p) {
    ++out.examined;
    BipartiteMatching m{p};
    if (!bipartite_stable(inst, m, notion).stable) return;
    ++out.count;
    if (opts.sink) opts.sink(m);
    if (opts.collect) out.matchings.push_back(std::move(m));
  });
  return out;
}

template <class Inst>
NotionCounts bipartite_count_all(const Inst& inst, const EnumerationCap& cap) {
  const int n = inst.size();
  check_cap(n, cap);
  NotionCounts out;
  Permutation inv(n);
  for_each_permutation(n, [&](const Permutation& p) {
    ++out.examined;
    for (int i = 0; i < n; ++i) inv[p[i]] = i;
    bool weak = false, strong = false, super = false;
    for (int i = 0; i < n && !weak; ++i) {
      for (int j = 0; j < n && !weak; ++j) {
        if (j == p[i]) continue;
        const auto r = relations(inst, i, j, p[i], inv[j]);
        weak = weak || weak_block(r);
        strong = strong || strong_block(r);
        super = super || super_block(r);
      }
    }
    // Every weak block is also a strong and a super block.
    out.super += !super;
    out.strong += !strong;
    out.weak += !weak;
  });
  return out;
}

// Blocking search on a fixed cyclic matching. prefer[s][a] is the set of
// agents of A_{s+1} that agent a of A_s ranks above its matching successor.
class CyclicSearch {
 public:
  CyclicSearch(const CyclicStrictInstance& inst, const CyclicMatching& m, const CyclicNotion& notion)
      : r_(inst.sides()), n_(inst.size()), notion_(notion), succ_(m.successors()) {
    if (n_ > 64) throw std::invalid_argument("cyclic search supports n <= 64");
    prefer_.assign(static_cast<std::size_t>(r_) * n_, 0);
    for (int s = 0; s < r_; ++s) {
      for (int a = 0; a < n_; ++a) {
        const auto& row = inst.row(s, a);
        const int cut = inst.rank(s, a, succ_[s][a]);
        std::uint64_t mask = 0;
        for (int pos = 0; pos < cut; ++pos) mask |= std::uint64_t{1} << row[pos];
        prefer_[static_cast<std::size_t>(s) * n_ + a] = mask;
      }
    }
    tuple_.assign(r_, 0);
  }

  std::optional<TupleWitness> first_block() {
    for (int a = 0; a < n_; ++a) {
      tuple_[0] = a;
      if (extend(0, 0)) return witness();
    }
    return std::nullopt;
  }

 private:
  std::uint64_t prefer(int s, int a) const { return prefer_[static_cast<std::size_t>(s) * n_ + a]; }

  bool prefers(int s, int a, int b) const { return (prefer(s, a) >> b) & 1U; }

  // tuple_[0..s] fixed; choose tuple_[s+1] (or close the cycle at s = r-1).
  bool extend(int s, int count) {
    const int remaining = r_ - s;
    const int need = notion_.threshold - count;
    if (need > remaining) return false;
    const int a = tuple_[s];
    if (s == r_ - 1) {
      const int b = tuple_[0];
      const bool p = prefers(s, a, b);
      if (!p && notion_.keep_partner && b != succ_[s][a]) return false;
      return count + p >= notion_.threshold;
    }
    const std::uint64_t full = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    std::uint64_t allowed = need == remaining ? prefer(s, a) : full;
    if (notion_.keep_partner && need < remaining) allowed = prefer(s, a) | (std::uint64_t{1} << succ_[s][a]);
    while (allowed) {
      const int b = std::countr_zero(allowed);
      allowed &= allowed - 1;
      tuple_[s + 1] = b;
      if (extend(s + 1, count + prefers(s, a, b))) return true;
    }
    return false;
  }

  TupleWitness witness() const {
    TupleWitness w;
    w.agents = tuple_;
    for (int s = 0; s < r_; ++s) {
      if (prefers(s, tuple_[s], tuple_[(s + 1) % r_])) w.prefer_set.push_back(s);
    }
    return w;
  }

  int r_;
  int n_;
  CyclicNotion notion_;
  std::vector<Permutation> succ_;
  std::vector<std::uint64_t> prefer_;
  std::vector<int> tuple_;
};

void require_cyclic_notion(const CyclicStrictInstance& inst, const CyclicNotion& notion) {
  if (notion.threshold < 1 || notion.threshold > inst.sides()) {
    throw std::invalid_argument("cyclic threshold must satisfy 1 <= m <= r");
  }
}

}  // namespace

std::string to_string(Notion n) {
  switch (n) {
    case Notion::Weak: return "weak";
    case Notion::Strong: return "strong";
    case Notion::Super: return "super";
  }
  return "?";
}

Notion parse_notion(std::string_view text) {
  if (text == "weak") return Notion::Weak;
  if (text == "strong") return Notion::Strong;
  if (text == "super") return Notion::Super;
  throw std::invalid_argument("unknown notion '" + std::string(text) + "' (expected weak|strong|super)");
}

double log_cyclic_matchings(int r, int n) { return (r - 1) * std::lgamma(n + 1.0); }

void check_cap(int n, const EnumerationCap& cap) {
  if (n > cap.max_bipartite_n) {
    throw CapExceeded("n = " + std::to_string(n) + " exceeds the enumeration cap " +
                      std::to_string(cap.max_bipartite_n) + "; use experiment --mc");
  }
}

void check_cap(int r, int n, const EnumerationCap& cap) {
  if (log_cyclic_matchings(r, n) > cap.max_log_cyclic) {
    throw CapExceeded("(n!)^(r-1) for r = " + std::to_string(r) + ", n = " + std::to_string(n) +
                      " exceeds the enumeration cap; use experiment --mc");
  }
}

bool is_weak_block_bipartite(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j) {
  return weak_block(queried_relations(inst, m, i, j));
}
bool is_weak_block_bipartite(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j) {
  return weak_block(queried_relations(inst, m, i, j));
}
bool is_strong_block_bipartite(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j) {
  return strong_block(queried_relations(inst, m, i, j));
}
bool is_strong_block_bipartite(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j) {
  return strong_block(queried_relations(inst, m, i, j));
}
bool is_super_block_bipartite(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j) {
  return super_block(queried_relations(inst, m, i, j));
}
bool is_super_block_bipartite(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j) {
  return super_block(queried_relations(inst, m, i, j));
}

bool is_block(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j, Notion notion) {
  return block_for(queried_relations(inst, m, i, j), notion);
}
bool is_block(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j, Notion notion) {
  return block_for(queried_relations(inst, m, i, j), notion);
}

bool is_block_cyclic(const CyclicStrictInstance& inst, const CyclicMatching& m, std::span<const int> tuple,
                     int threshold, bool keep_partner) {
  require_shape(inst, m);
  const int r = inst.sides();
  const int n = inst.size();
  if (static_cast<int>(tuple.size()) != r) throw std::invalid_argument("tuple must have one agent per side");
  for (int a : tuple) {
    if (a < 0 || a >= n) throw std::invalid_argument("tuple agent out of range");
  }
  require_cyclic_notion(inst, CyclicNotion{threshold, keep_partner});
  const auto succ = m.successors();
  bool own_cycle = true;
  int count = 0;
  bool kept = true;
  for (int s = 0; s < r; ++s) {
    const int a = tuple[s];
    const int b = tuple[(s + 1) % r];
    own_cycle = own_cycle && b == succ[s][a];
    const bool p = compare(inst, s, a, b, succ[s][a]) == PC::StrictlyBetter;
    count += p;
    if (!p && b != succ[s][a]) kept = false;
  }
  if (own_cycle) throw std::invalid_argument("tuple is one of the matching's own cycles");
  return count >= threshold && (!keep_partner || kept);
}

StabilityResult is_stable(const BipartiteStrictInstance& inst, const BipartiteMatching& m, Notion notion) {
  return bipartite_stable(inst, m, notion);
}

StabilityResult is_stable(const BipartitePosetInstance& inst, const BipartiteMatching& m, Notion notion) {
  return bipartite_stable(inst, m, notion);
}

StabilityResult is_stable(const CyclicStrictInstance& inst, const CyclicMatching& m, const CyclicNotion& notion) {
  require_shape(inst, m);
  require_cyclic_notion(inst, notion);
  CyclicSearch search(inst, m, notion);
  if (auto w = search.first_block()) return {false, BlockWitness{std::move(*w)}};
  return {true, std::nullopt};
}

CountResult<BipartiteMatching> count_stable(const BipartiteStrictInstance& inst, Notion notion,
                                            const CountOptions<BipartiteMatching>& opts) {
  return bipartite_count(inst, notion, opts);
}

CountResult<BipartiteMatching> count_stable(const BipartitePosetInstance& inst, Notion notion,
                                            const CountOptions<BipartiteMatching>& opts) {
  return bipartite_count(inst, notion, opts);
}

CountResult<CyclicMatching> count_stable(const CyclicStrictInstance& inst, const CyclicNotion& notion,
                                         const CountOptions<CyclicMatching>& opts) {
  const int r = inst.sides();
  const int n = inst.size();
  check_cap(r, n, opts.cap);
  require_cyclic_notion(inst, notion);
  CountResult<CyclicMatching> out;
  CyclicMatching m = CyclicMatching::identity(r, n);
  for (;;) {
    ++out.examined;
    CyclicSearch search(inst, m, notion);
    if (!search.first_block()) {
      ++out.count;
      if (opts.sink) opts.sink(m);
      if (opts.collect) out.matchings.push_back(m);
    }
    // Lexicographic successor of (maps[0], ..., maps[r-2]); the last map
    // varies fastest and next_permutation wraps to sorted on overflow.
    int s = r - 2;
    while (s >= 0 && !std::next_permutation(m.maps[s].begin(), m.maps[s].end())) --s;
    if (s < 0) break;
  }
  return out;
}

NotionCounts count_all_notions(const BipartiteStrictInstance& inst, const EnumerationCap& cap) {
  return bipartite_count_all(inst, cap);
}

NotionCounts count_all_notions(const BipartitePosetInstance& inst, const EnumerationCap& cap) {
  return bipartite_count_all(inst, cap);
}

void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    fn(p);
  } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace stablelab
