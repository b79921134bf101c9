// Constructive matching algorithms.
#pragma once

#include "stablelab/core.hpp"
#include "stablelab/rng.hpp"

#include <cstdint>
#include <vector>

namespace stablelab {

struct ProposalTrace {
  BipartiteMatching matching;
  std::uint64_t total_proposals = 0;
  std::vector<int> per_man_rank;  // 1 = first choice
};

/// Which free proposer moves next in the sequential algorithm. The final
/// matching and the proposal count do not depend on the choice.
enum class ProposalOrder {
  LowestFreeFirst,  // next proposer is the lowest-index free man
  LastRejectedFirst // a displaced man proposes immediately (McVitie-Wilson chain)
};

/// Man-proposing deferred acceptance, one proposal at a time.
ProposalTrace gale_shapley(const BipartiteStrictInstance& inst,
                           ProposalOrder order = ProposalOrder::LowestFreeFirst);

/// The instance with the two sides exchanged.
BipartiteStrictInstance swap_sides(const BipartiteStrictInstance& inst);

/// Woman-optimal stable matching, expressed as a man -> woman map.
BipartiteMatching woman_optimal(const BipartiteStrictInstance& inst);

/// Every agent's partial order replaced by a (seeded) linear extension.
BipartiteStrictInstance linear_extension_instance(const BipartitePosetInstance& inst, const SeedSpec& seed);

/// Weakly stable matching of a poset instance: extend, then run
/// gale_shapley on the extended lists.
BipartiteMatching weak_stable_via_extension(const BipartitePosetInstance& inst, const SeedSpec& seed);

struct ProposalStatistics {
  double mean = 0;
  double stddev = 0;
  double ci_low = 0;   // 95% normal-approximation interval for the mean
  double ci_high = 0;
  std::uint64_t trials = 0;
};

/// Total proposals over `trials` uniform instances of size n; trial t uses
/// seed.with_trial(seed.trial_index + t).
ProposalStatistics proposal_statistics(int n, std::uint64_t trials, const SeedSpec& seed, int threads = 1);

}  // namespace stablelab
