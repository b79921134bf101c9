// Seeded samplers for the three random instance models.
#pragma once

#include "stablelab/core.hpp"
#include "stablelab/rng.hpp"

namespace stablelab {

/// Uniform permutation of {0..n-1} by Fisher-Yates.
Permutation random_permutation(int n, Stream& rng);

BipartiteStrictInstance gen_bipartite_strict(int n, const SeedSpec& seed);
CyclicStrictInstance gen_cyclic_strict(int r, int n, const SeedSpec& seed);
BipartitePosetInstance gen_bipartite_poset(int n, int k1, int k2, const SeedSpec& seed);

/// A linear order of the agent's candidates consistent with its partial
/// order. Candidates are emitted by repeatedly taking, among those whose
/// strict predecessors are all placed, the one with the smallest fresh
/// uniform key. Every linear extension is reachable, but the distribution
/// over extensions is not uniform.
Permutation extend_to_linear(const BipartitePosetInstance& inst, Side side, int agent, const SeedSpec& seed);

/// Appends one fresh uniform coordinate to every point of `side`. The new
/// order of each agent is the old one intersected with an independent
/// uniform linear order.
BipartitePosetInstance couple_add_dimension(const BipartitePosetInstance& inst, Side side, const SeedSpec& seed);

/// Sorts each agent's candidates by the single coordinate of a
/// dimension-1 instance (throws std::invalid_argument otherwise).
BipartiteStrictInstance sorted_lists(const BipartitePosetInstance& inst);

}  // namespace stablelab
