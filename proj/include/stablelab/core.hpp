// Domain types shared by every stablelab module.
//
// Conventions used throughout the library:
//  * agents and candidates are 0-based internally; every external format
//    (JSON, CLI) is 1-based;
//  * smaller coordinate values and earlier list positions mean MORE preferred.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablelab {

using Permutation = std::vector<int>;

/// Row-major block of points: row `agent * n + candidate`, one column per
/// order dimension.
template <class Scalar>
using PointMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PointMatrix = PointMatrixT<double>;

enum class Side { First = 0, Second = 1 };

inline Side other(Side s) { return s == Side::First ? Side::Second : Side::First; }

enum class PrefComparison { StrictlyBetter, StrictlyWorse, Incomparable, Same };

std::string to_string(PrefComparison c);

/// Raised when an instance violates its invariants in a way an operation
/// cannot work around (e.g. two candidate points share a coordinate).
class InvalidInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform strict lists on both sides of an n x n market.
class BipartiteStrictInstance {
 public:
  BipartiteStrictInstance() = default;
  BipartiteStrictInstance(int n, std::vector<Permutation> first_prefs,
                          std::vector<Permutation> second_prefs);

  int size() const noexcept { return n_; }
  const std::vector<Permutation>& prefs(Side s) const { return prefs_[index(s)]; }
  const Permutation& row(Side s, int agent) const;

  /// 0-based position of `cand` in the agent's list, or -1 if absent.
  int rank(Side s, int agent, int cand) const;

  friend bool operator==(const BipartiteStrictInstance& a, const BipartiteStrictInstance& b) {
    return a.n_ == b.n_ && a.prefs_[0] == b.prefs_[0] && a.prefs_[1] == b.prefs_[1];
  }

 private:
  static int index(Side s) { return static_cast<int>(s); }

  int n_ = 0;
  std::vector<Permutation> prefs_[2];
  std::vector<int> rank_[2];
};

/// r agent sets A_0..A_{r-1}; each agent of A_s ranks all of A_{s+1 mod r}.
class CyclicStrictInstance {
 public:
  CyclicStrictInstance() = default;
  CyclicStrictInstance(int r, int n, std::vector<std::vector<Permutation>> prefs);

  int sides() const noexcept { return r_; }
  int size() const noexcept { return n_; }
  const std::vector<std::vector<Permutation>>& prefs() const { return prefs_; }
  const Permutation& row(int side, int agent) const;
  int rank(int side, int agent, int cand) const;

  friend bool operator==(const CyclicStrictInstance& a, const CyclicStrictInstance& b) {
    return a.r_ == b.r_ && a.n_ == b.n_ && a.prefs_ == b.prefs_;
  }

 private:
  int r_ = 0;
  int n_ = 0;
  std::vector<std::vector<Permutation>> prefs_;
  std::vector<int> rank_;  // [side][agent][cand]
};

/// Two-sided market whose preferences are k-dimensional random orders:
/// agent a prefers c to d iff a's point for c is componentwise below its
/// point for d.
class BipartitePosetInstance {
 public:
  BipartitePosetInstance() = default;
  BipartitePosetInstance(int n, PointMatrix first_points, PointMatrix second_points);

  int size() const noexcept { return n_; }
  int dimension(Side s) const { return static_cast<int>(points(s).cols()); }
  const PointMatrix& points(Side s) const { return s == Side::First ? first_ : second_; }

  /// The agent's point for one candidate, as a row expression.
  auto point(Side s, int agent, int cand) const { return points(s).row(static_cast<Eigen::Index>(agent) * n_ + cand); }

  friend bool operator==(const BipartitePosetInstance& a, const BipartitePosetInstance& b) {
    return a.n_ == b.n_ && a.first_.rows() == b.first_.rows() && a.first_.cols() == b.first_.cols() &&
           a.second_.rows() == b.second_.rows() && a.second_.cols() == b.second_.cols() &&
           a.first_ == b.first_ && a.second_ == b.second_;
  }

 private:
  int n_ = 0;
  PointMatrix first_;
  PointMatrix second_;
};

/// Bipartite matching: first-side agent i is matched to partner[i].
struct BipartiteMatching {
  Permutation partner;

  int size() const { return static_cast<int>(partner.size()); }
  Permutation inverse() const;

  friend bool operator==(const BipartiteMatching&, const BipartiteMatching&) = default;
};

/// Cyclic matching on r sides: cycle i is (i, maps[0][i], ..., maps[r-2][i]),
/// i.e. maps[s-1] sends the side-0 agent of a cycle to its side-s member.
struct CyclicMatching {
  std::vector<Permutation> maps;

  int sides() const { return static_cast<int>(maps.size()) + 1; }
  int size() const { return maps.empty() ? 0 : static_cast<int>(maps.front().size()); }

  /// successors()[s][a] is the member of A_{s+1} following agent a of A_s.
  std::vector<Permutation> successors() const;

  static CyclicMatching identity(int r, int n);

  friend bool operator==(const CyclicMatching&, const CyclicMatching&) = default;
};

bool is_permutation_of_range(const Permutation& p, int n);

/// Preference comparison of two candidates in one agent's order.
/// Throws std::out_of_range on bad indices and InvalidInstance when the
/// instance data cannot decide the comparison (missing candidate, tied
/// coordinate).
PrefComparison compare(const BipartiteStrictInstance& inst, Side side, int agent, int a, int b);
PrefComparison compare(const CyclicStrictInstance& inst, int side, int agent, int a, int b);
PrefComparison compare(const BipartitePosetInstance& inst, Side side, int agent, int a, int b);

inline bool strictly_prefers(const BipartiteStrictInstance& inst, Side side, int agent, int a, int b) {
  return compare(inst, side, agent, a, b) == PrefComparison::StrictlyBetter;
}
inline bool strictly_prefers(const BipartitePosetInstance& inst, Side side, int agent, int a, int b) {
  return compare(inst, side, agent, a, b) == PrefComparison::StrictlyBetter;
}

/// Violations of type invariants; empty iff the instance is valid.
std::vector<std::string> validate(const BipartiteStrictInstance& inst);
std::vector<std::string> validate(const CyclicStrictInstance& inst);
std::vector<std::string> validate(const BipartitePosetInstance& inst);

}  // namespace stablelab
