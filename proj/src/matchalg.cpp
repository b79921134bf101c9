#include "stablelab/matchalg.hpp"

#include "stablelab/genprefs.hpp"
#include "stablelab/parallel.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace stablelab {

ProposalTrace gale_shapley(const BipartiteStrictInstance& inst, ProposalOrder order) {
  if (!validate(inst).empty()) throw InvalidInstance("gale_shapley needs a valid strict instance");
  const int n = inst.size();
  std::vector<int> next_choice(n, 0);  // position in the man's list
  std::vector<int> holds(n, -1);       // woman -> man on hold
  std::vector<int> wife(n, -1);
  std::uint64_t proposals = 0;

  std::set<int> free_men;
  for (int i = 0; i < n; ++i) free_men.insert(i);
  std::vector<int> chain;  // pending displaced man for LastRejectedFirst

  while (!free_men.empty() || !chain.empty()) {
    int man;
    if (!chain.empty()) {
      man = chain.back();
      chain.pop_back();
    } else {
      man = *free_men.begin();
      free_men.erase(free_men.begin());
    }
    const int woman = inst.row(Side::First, man)[next_choice[man]++];
    ++proposals;
    const int current = holds[woman];
    int rejected = man;
    if (current < 0 || inst.rank(Side::Second, woman, man) < inst.rank(Side::Second, woman, current)) {
      holds[woman] = man;
      wife[man] = woman;
      rejected = current;
    }
    if (rejected >= 0) {
      wife[rejected] = -1;
      if (order == ProposalOrder::LastRejectedFirst) {
        chain.push_back(rejected);
      } else {
        free_men.insert(rejected);
      }
    }
  }

  ProposalTrace trace;
  trace.matching.partner = wife;
  trace.total_proposals = proposals;
  trace.per_man_rank.resize(n);
  for (int i = 0; i < n; ++i) trace.per_man_rank[i] = inst.rank(Side::First, i, wife[i]) + 1;
  return trace;
}

BipartiteStrictInstance swap_sides(const BipartiteStrictInstance& inst) {
  return BipartiteStrictInstance(inst.size(), inst.prefs(Side::Second), inst.prefs(Side::First));
}

BipartiteMatching woman_optimal(const BipartiteStrictInstance& inst) {
  const auto trace = gale_shapley(swap_sides(inst));
  return BipartiteMatching{trace.matching.inverse()};
}

BipartiteStrictInstance linear_extension_instance(const BipartitePosetInstance& inst, const SeedSpec& seed) {
  const int n = inst.size();
  std::vector<Permutation> rows[2];
  for (Side s : {Side::First, Side::Second}) {
    for (int a = 0; a < n; ++a) rows[static_cast<int>(s)].push_back(extend_to_linear(inst, s, a, seed));
  }
  return BipartiteStrictInstance(n, std::move(rows[0]), std::move(rows[1]));
}

BipartiteMatching weak_stable_via_extension(const BipartitePosetInstance& inst, const SeedSpec& seed) {
  return gale_shapley(linear_extension_instance(inst, seed)).matching;
}

ProposalStatistics proposal_statistics(int n, std::uint64_t trials, const SeedSpec& seed, int threads) {
  if (trials < 2) throw std::invalid_argument("proposal_statistics needs at least 2 trials");
  std::vector<double> totals(trials);
  parallel_for(trials, threads, [&](std::uint64_t t) {
    const auto inst = gen_bipartite_strict(n, seed.with_trial(seed.trial_index + t));
    totals[t] = static_cast<double>(gale_shapley(inst).total_proposals);
  });
  double sum = 0;
  for (double v : totals) sum += v;
  const double mean = sum / static_cast<double>(trials);
  double ss = 0;
  for (double v : totals) ss += (v - mean) * (v - mean);
  ProposalStatistics out;
  out.trials = trials;
  out.mean = mean;
  out.stddev = std::sqrt(ss / static_cast<double>(trials - 1));
  const double half = 1.959963984540054 * out.stddev / std::sqrt(static_cast<double>(trials));
  out.ci_low = mean - half;
  out.ci_high = mean + half;
  return out;
}

}  // namespace stablelab
