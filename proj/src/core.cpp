#include "stablelab/core.hpp"

#include <algorithm>
#include <string>

namespace stablelab {

namespace {

void check_index(int value, int n, const char* what) {
  if (value < 0 || value >= n) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(value) + " out of range [0, " +
                            std::to_string(n) + ")");
  }
}

std::vector<int> rank_table(const std::vector<Permutation>& rows, int n) {
  std::vector<int> rank(static_cast<std::size_t>(rows.size()) * std::max(n, 0), -1);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto& row = rows[a];
    for (std::size_t pos = 0; pos < row.size(); ++pos) {
      const int c = row[pos];
      if (c >= 0 && c < n && rank[a * n + c] < 0) rank[a * n + c] = static_cast<int>(pos);
    }
  }
  return rank;
}

PrefComparison from_ranks(int ra, int rb) {
  if (ra < 0 || rb < 0) throw InvalidInstance("candidate missing from preference row");
  if (ra < rb) return PrefComparison::StrictlyBetter;
  if (ra > rb) return PrefComparison::StrictlyWorse;
  return PrefComparison::Same;
}

void row_violations(const std::vector<Permutation>& rows, int n, const std::string& label,
                    std::vector<std::string>& out) {
  if (static_cast<int>(rows.size()) != n) {
    out.push_back(label + ": expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()));
  }
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (!is_permutation_of_range(rows[a], n)) {
      out.push_back(label + " row " + std::to_string(a + 1) + ": row not a permutation");
    }
  }
}

void point_violations(const PointMatrix& pts, int n, const std::string& label, std::vector<std::string>& out) {
  if (pts.rows() != static_cast<Eigen::Index>(n) * n) {
    out.push_back(label + ": expected " + std::to_string(n * n) + " points, found " + std::to_string(pts.rows()));
    return;
  }
  if (pts.cols() < 1) {
    out.push_back(label + ": dimension must be >= 1");
    return;
  }
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      for (Eigen::Index u = 0; u < pts.cols(); ++u) {
        const double v = pts(static_cast<Eigen::Index>(a) * n + c, u);
        if (!(v >= 0.0 && v <= 1.0)) {
          out.push_back(label + " agent " + std::to_string(a + 1) + " candidate " + std::to_string(c + 1) +
                        ": coordinate " + std::to_string(u + 1) + " outside [0,1]");
        }
      }
    }
    for (Eigen::Index u = 0; u < pts.cols(); ++u) {
      for (int c = 0; c < n; ++c) {
        for (int d = c + 1; d < n; ++d) {
          if (pts(static_cast<Eigen::Index>(a) * n + c, u) == pts(static_cast<Eigen::Index>(a) * n + d, u)) {
            out.push_back(label + " agent " + std::to_string(a + 1) + ": tied coordinate " + std::to_string(u + 1) +
                          " between candidates " + std::to_string(c + 1) + " and " + std::to_string(d + 1));
          }
        }
      }
    }
  }
}

}  // namespace

std::string to_string(PrefComparison c) {
  switch (c) {
    case PrefComparison::StrictlyBetter: return "StrictlyBetter";
    case PrefComparison::StrictlyWorse: return "StrictlyWorse";
    case PrefComparison::Incomparable: return "Incomparable";
    case PrefComparison::Same: return "Same";
  }
  return "?";
}

bool is_permutation_of_range(const Permutation& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

BipartiteStrictInstance::BipartiteStrictInstance(int n, std::vector<Permutation> first_prefs,
                                                 std::vector<Permutation> second_prefs)
    : n_(n), prefs_{std::move(first_prefs), std::move(second_prefs)} {
  rank_[0] = rank_table(prefs_[0], n_);
  rank_[1] = rank_table(prefs_[1], n_);
}

const Permutation& BipartiteStrictInstance::row(Side s, int agent) const {
  check_index(agent, static_cast<int>(prefs(s).size()), "agent");
  return prefs(s)[agent];
}

int BipartiteStrictInstance::rank(Side s, int agent, int cand) const {
  check_index(agent, static_cast<int>(prefs(s).size()), "agent");
  check_index(cand, n_, "candidate");
  return rank_[index(s)][static_cast<std::size_t>(agent) * n_ + cand];
}

CyclicStrictInstance::CyclicStrictInstance(int r, int n, std::vector<std::vector<Permutation>> prefs)
    : r_(r), n_(n), prefs_(std::move(prefs)) {
  rank_.assign(static_cast<std::size_t>(std::max(r_, 0)) * std::max(n_, 0) * std::max(n_, 0), -1);
  for (int s = 0; s < r_ && s < static_cast<int>(prefs_.size()); ++s) {
    auto block = rank_table(prefs_[s], n_);
    for (std::size_t i = 0; i < block.size() && i < static_cast<std::size_t>(n_) * n_; ++i) {
      rank_[static_cast<std::size_t>(s) * n_ * n_ + i] = block[i];
    }
  }
}

const Permutation& CyclicStrictInstance::row(int side, int agent) const {
  check_index(side, static_cast<int>(prefs_.size()), "side");
  check_index(agent, static_cast<int>(prefs_[side].size()), "agent");
  return prefs_[side][agent];
}

int CyclicStrictInstance::rank(int side, int agent, int cand) const {
  check_index(side, r_, "side");
  check_index(agent, n_, "agent");
  check_index(cand, n_, "candidate");
  return rank_[(static_cast<std::size_t>(side) * n_ + agent) * n_ + cand];
}

BipartitePosetInstance::BipartitePosetInstance(int n, PointMatrix first_points, PointMatrix second_points)
    : n_(n), first_(std::move(first_points)), second_(std::move(second_points)) {}

Permutation BipartiteMatching::inverse() const {
  Permutation inv(partner.size(), -1);
  for (std::size_t i = 0; i < partner.size(); ++i) {
    const int j = partner[i];
    if (j >= 0 && j < static_cast<int>(partner.size())) inv[j] = static_cast<int>(i);
  }
  return inv;
}

std::vector<Permutation> CyclicMatching::successors() const {
  const int r = sides();
  const int n = size();
  // member[s][c]: side-s agent of cycle c.
  std::vector<Permutation> member(r, Permutation(n));
  for (int c = 0; c < n; ++c) member[0][c] = c;
  for (int s = 1; s < r; ++s) member[s] = maps[s - 1];
  std::vector<Permutation> succ(r, Permutation(n));
  for (int s = 0; s < r; ++s) {
    const int next = (s + 1) % r;
    for (int c = 0; c < n; ++c) succ[s][member[s][c]] = member[next][c];
  }
  return succ;
}

CyclicMatching CyclicMatching::identity(int r, int n) {
  Permutation id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  return CyclicMatching{std::vector<Permutation>(r - 1, id)};
}

PrefComparison compare(const BipartiteStrictInstance& inst, Side side, int agent, int a, int b) {
  const int n = inst.size();
  check_index(agent, n, "agent");
  check_index(a, n, "candidate");
  check_index(b, n, "candidate");
  if (a == b) return PrefComparison::Same;
  return from_ranks(inst.rank(side, agent, a), inst.rank(side, agent, b));
}

PrefComparison compare(const CyclicStrictInstance& inst, int side, int agent, int a, int b) {
  const int n = inst.size();
  check_index(side, inst.sides(), "side");
  check_index(agent, n, "agent");
  check_index(a, n, "candidate");
  check_index(b, n, "candidate");
  if (a == b) return PrefComparison::Same;
  return from_ranks(inst.rank(side, agent, a), inst.rank(side, agent, b));
}

PrefComparison compare(const BipartitePosetInstance& inst, Side side, int agent, int a, int b) {
  const int n = inst.size();
  check_index(agent, n, "agent");
  check_index(a, n, "candidate");
  check_index(b, n, "candidate");
  if (a == b) return PrefComparison::Same;
  const auto pa = inst.point(side, agent, a);
  const auto pb = inst.point(side, agent, b);
  bool below = true;
  bool above = true;
  for (Eigen::Index u = 0; u < pa.size(); ++u) {
    if (pa(u) == pb(u)) throw InvalidInstance("tied coordinate in agent's candidate points");
    below = below && pa(u) < pb(u);
    above = above && pa(u) > pb(u);
  }
  if (below) return PrefComparison::StrictlyBetter;
  if (above) return PrefComparison::StrictlyWorse;
  return PrefComparison::Incomparable;
}

std::vector<std::string> validate(const BipartiteStrictInstance& inst) {
  std::vector<std::string> out;
  if (inst.size() < 1) out.push_back("n must be >= 1");
  row_violations(inst.prefs(Side::First), inst.size(), "first side", out);
  row_violations(inst.prefs(Side::Second), inst.size(), "second side", out);
  return out;
}

std::vector<std::string> validate(const CyclicStrictInstance& inst) {
  std::vector<std::string> out;
  if (inst.sides() < 2) out.push_back("r must be >= 2");
  if (inst.size() < 1) out.push_back("n must be >= 1");
  if (static_cast<int>(inst.prefs().size()) != inst.sides()) {
    out.push_back("expected " + std::to_string(inst.sides()) + " preference blocks, found " +
                  std::to_string(inst.prefs().size()));
  }
  for (std::size_t s = 0; s < inst.prefs().size(); ++s) {
    row_violations(inst.prefs()[s], inst.size(), "side " + std::to_string(s + 1), out);
  }
  return out;
}

std::vector<std::string> validate(const BipartitePosetInstance& inst) {
  std::vector<std::string> out;
  if (inst.size() < 1) out.push_back("n must be >= 1");
  point_violations(inst.points(Side::First), inst.size(), "first side", out);
  point_violations(inst.points(Side::Second), inst.size(), "second side", out);
  return out;
}

}  // namespace stablelab
