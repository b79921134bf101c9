#include "stablelab/genprefs.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stablelab {

namespace {

void require_n(int n) {
  if (n < 1) throw std::invalid_argument("n must be ≥ 1");
}

std::vector<Permutation> random_rows(int n, Stream& rng) {
  std::vector<Permutation> rows;
  rows.reserve(n);
  for (int a = 0; a < n; ++a) rows.push_back(random_permutation(n, rng));
  return rows;
}

// Fills columns [first_col, cols) of every point; a point whose new
// coordinates collide with a sibling's is redrawn.
void fill_points(PointMatrix& pts, int n, Eigen::Index first_col, Stream& rng) {
  for (int a = 0; a < n; ++a) {
    const Eigen::Index base = static_cast<Eigen::Index>(a) * n;
    for (int c = 0; c < n; ++c) {
      const Eigen::Index row = base + c;
      for (;;) {
        for (Eigen::Index u = first_col; u < pts.cols(); ++u) pts(row, u) = rng.uniform();
        bool tied = false;
        for (Eigen::Index u = first_col; u < pts.cols() && !tied; ++u) {
          // Only siblings already drawn can collide.
          for (int d = 0; d < c && !tied; ++d) tied = pts(base + d, u) == pts(row, u);
        }
        if (!tied) break;
      }
    }
  }
}

}  // namespace

Permutation random_permutation(int n, Stream& rng) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

BipartiteStrictInstance gen_bipartite_strict(int n, const SeedSpec& seed) {
  require_n(n);
  Stream rng(seed, "bipartite_strict");
  auto first = random_rows(n, rng);
  auto second = random_rows(n, rng);
  return BipartiteStrictInstance(n, std::move(first), std::move(second));
}

CyclicStrictInstance gen_cyclic_strict(int r, int n, const SeedSpec& seed) {
  if (r < 2) throw std::invalid_argument("r must be ≥ 2");
  require_n(n);
  Stream rng(seed, "cyclic_strict");
  std::vector<std::vector<Permutation>> prefs;
  prefs.reserve(r);
  for (int s = 0; s < r; ++s) prefs.push_back(random_rows(n, rng));
  return CyclicStrictInstance(r, n, std::move(prefs));
}

BipartitePosetInstance gen_bipartite_poset(int n, int k1, int k2, const SeedSpec& seed) {
  require_n(n);
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("k1 and k2 must be ≥ 1");
  Stream rng(seed, "bipartite_poset");
  PointMatrix x(static_cast<Eigen::Index>(n) * n, k1);
  PointMatrix y(static_cast<Eigen::Index>(n) * n, k2);
  fill_points(x, n, 0, rng);
  fill_points(y, n, 0, rng);
  return BipartitePosetInstance(n, std::move(x), std::move(y));
}

Permutation extend_to_linear(const BipartitePosetInstance& inst, Side side, int agent, const SeedSpec& seed) {
  const int n = inst.size();
  if (agent < 0 || agent >= n) throw std::out_of_range("agent index out of range");
  Stream rng(seed, "extend/" + std::to_string(static_cast<int>(side)) + "/" + std::to_string(agent));
  std::vector<double> key(n);
  for (auto& k : key) k = rng.uniform();

  // pending[c]: number of unplaced candidates strictly better than c.
  std::vector<int> pending(n, 0);
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      if (d != c && compare(inst, side, agent, d, c) == PrefComparison::StrictlyBetter) ++pending[c];
    }
  }
  Permutation order;
  order.reserve(n);
  std::vector<char> placed(n, 0);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int c = 0; c < n; ++c) {
      if (!placed[c] && pending[c] == 0 && (best < 0 || key[c] < key[best])) best = c;
    }
    placed[best] = 1;
    order.push_back(best);
    for (int c = 0; c < n; ++c) {
      if (!placed[c] && compare(inst, side, agent, best, c) == PrefComparison::StrictlyBetter) --pending[c];
    }
  }
  return order;
}

BipartitePosetInstance couple_add_dimension(const BipartitePosetInstance& inst, Side side, const SeedSpec& seed) {
  const int n = inst.size();
  const PointMatrix& old = inst.points(side);
  PointMatrix grown(old.rows(), old.cols() + 1);
  grown.leftCols(old.cols()) = old;
  Stream rng(seed, "couple/" + std::to_string(static_cast<int>(side)));
  fill_points(grown, n, old.cols(), rng);
  if (side == Side::First) return BipartitePosetInstance(n, std::move(grown), inst.points(Side::Second));
  return BipartitePosetInstance(n, inst.points(Side::First), std::move(grown));
}

BipartiteStrictInstance sorted_lists(const BipartitePosetInstance& inst) {
  const int n = inst.size();
  std::vector<Permutation> rows[2];
  for (Side s : {Side::First, Side::Second}) {
    if (inst.dimension(s) != 1) throw std::invalid_argument("sorted_lists needs a dimension-1 instance");
    for (int a = 0; a < n; ++a) {
      Permutation row(n);
      std::iota(row.begin(), row.end(), 0);
      std::sort(row.begin(), row.end(),
                [&](int c, int d) { return inst.point(s, a, c)(0) < inst.point(s, a, d)(0); });
      rows[static_cast<int>(s)].push_back(std::move(row));
    }
  }
  return BipartiteStrictInstance(n, std::move(rows[0]), std::move(rows[1]));
}

}  // namespace stablelab
