// Blocking predicates and exhaustive stable-matching enumeration.
#pragma once

#include "stablelab/core.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stablelab {

/// Stability notions for two-sided markets, strongest (Super) to weakest.
///  Weak:   no pair where both strictly prefer each other.
///  Strong: no pair where one strictly prefers and the other does not
///          strictly prefer its current partner.
///  Super:  no pair where neither strictly prefers its current partner.
enum class Notion { Weak, Strong, Super };

std::string to_string(Notion n);
Notion parse_notion(std::string_view text);

inline int majority_threshold(int r) { return r / 2 + 1; }
inline int ceil_half_threshold(int r) { return (r + 1) / 2; }

/// A cyclic tuple blocks when at least `threshold` of its agents strictly
/// prefer their tuple successor to their matching successor. With
/// `keep_partner` set, every non-preferring agent must also have its
/// matching successor as tuple successor.
struct CyclicNotion {
  int threshold = 0;
  bool keep_partner = false;

  static CyclicNotion weak(int r) { return {r, false}; }
  static CyclicNotion strong(int r) { return {majority_threshold(r), false}; }
  static CyclicNotion strong(int /*r*/, int m, bool keep_partner = false) { return {m, keep_partner}; }
};

struct PairWitness {
  int first = 0;
  int second = 0;
  friend bool operator==(const PairWitness&, const PairWitness&) = default;
};

struct TupleWitness {
  std::vector<int> agents;      // agents[s] in A_s
  std::vector<int> prefer_set;  // positions s where agents[s] prefers agents[s+1]
  friend bool operator==(const TupleWitness&, const TupleWitness&) = default;
};

using BlockWitness = std::variant<PairWitness, TupleWitness>;

struct StabilityResult {
  bool stable = true;
  std::optional<BlockWitness> witness;
};

/// Signals that exhaustive enumeration is too large; fall back to Monte Carlo.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationCap {
  int max_bipartite_n = 7;
  /// Bound on log((n!)^(r-1)); the default admits r = 3 with n <= 6.
  double max_log_cyclic = 13.2;

  friend bool operator==(const EnumerationCap&, const EnumerationCap&) = default;
};

double log_cyclic_matchings(int r, int n);
void check_cap(int n, const EnumerationCap& cap);
void check_cap(int r, int n, const EnumerationCap& cap);

// --- two-sided predicates -------------------------------------------------
// Each throws std::invalid_argument when (i, j) is a matched pair.

bool is_weak_block_bipartite(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j);
bool is_weak_block_bipartite(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j);
bool is_strong_block_bipartite(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j);
bool is_strong_block_bipartite(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j);
bool is_super_block_bipartite(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j);
bool is_super_block_bipartite(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j);

bool is_block(const BipartiteStrictInstance& inst, const BipartiteMatching& m, int i, int j, Notion notion);
bool is_block(const BipartitePosetInstance& inst, const BipartiteMatching& m, int i, int j, Notion notion);

/// Blocking test for one cyclic tuple (tuple[s] in A_s). Throws
/// std::invalid_argument for malformed tuples, including M's own cycles.
bool is_block_cyclic(const CyclicStrictInstance& inst, const CyclicMatching& m, std::span<const int> tuple,
                     int threshold, bool keep_partner = false);

/// Stability with the lexicographically first witness when unstable.
StabilityResult is_stable(const BipartiteStrictInstance& inst, const BipartiteMatching& m, Notion notion);
StabilityResult is_stable(const BipartitePosetInstance& inst, const BipartiteMatching& m, Notion notion);
StabilityResult is_stable(const CyclicStrictInstance& inst, const CyclicMatching& m, const CyclicNotion& notion);

// --- enumeration ------------------------------------------------------------

template <class MatchingT>
struct CountResult {
  std::uint64_t count = 0;
  std::uint64_t examined = 0;
  std::vector<MatchingT> matchings;  // filled only when requested
};

template <class MatchingT>
struct CountOptions {
  EnumerationCap cap;
  bool collect = false;
  std::function<void(const MatchingT&)> sink;
};

CountResult<BipartiteMatching> count_stable(const BipartiteStrictInstance& inst, Notion notion,
                                            const CountOptions<BipartiteMatching>& opts = {});
CountResult<BipartiteMatching> count_stable(const BipartitePosetInstance& inst, Notion notion,
                                            const CountOptions<BipartiteMatching>& opts = {});
CountResult<CyclicMatching> count_stable(const CyclicStrictInstance& inst, const CyclicNotion& notion,
                                         const CountOptions<CyclicMatching>& opts = {});

/// Weak, strong and super counts from one pass over all n! matchings.
struct NotionCounts {
  std::uint64_t weak = 0;
  std::uint64_t strong = 0;
  std::uint64_t super = 0;
  std::uint64_t examined = 0;

  std::uint64_t operator[](Notion n) const {
    return n == Notion::Weak ? weak : n == Notion::Strong ? strong : super;
  }
};

NotionCounts count_all_notions(const BipartiteStrictInstance& inst, const EnumerationCap& cap = {});
NotionCounts count_all_notions(const BipartitePosetInstance& inst, const EnumerationCap& cap = {});

/// Calls fn for every permutation of {0..n-1} in lexicographic order.
void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn);

}  // namespace stablelab
