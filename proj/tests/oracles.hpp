#pragma once

// Test-only reference implementations, independent of the solver
// machinery they check: brute-force policy-tree enumeration, belief-
// space dynamic programming, grid search for the nature game, and
// exhaustive history distributions for the Kuhn conversion.

#include <map>
#include <memory>
#include <vector>

#include "rpomdp/bounds.hpp"
#include "rpomdp/model.hpp"
#include "rpomdp/policy.hpp"
#include "rpomdp/rng.hpp"

namespace rpomdp::oracles {

/// Random dense distribution over dim entries.
SparseRow random_row(SplitMix64& rng, int dim);

Pomdp random_pomdp(std::uint64_t seed, int S, int A, int Z, double discount, Horizon horizon);
MePomdp random_me_pomdp(std::uint64_t seed, int S, int A, int Z, int n, double discount,
                        Horizon horizon);

/// Deterministic depth-H history policy: an action plus one subtree per
/// observation.
struct PolicyTree {
    int action = 0;
    std::vector<int> children;  // indices into the pool of depth-1 trees; empty at depth 1
};

/// All deterministic depth-H policy trees, returned per depth: trees[d]
/// lists the trees of depth d+1, children indexing trees[d-1].
std::vector<std::vector<PolicyTree>> enumerate_policy_trees(int A, int Z, int depth);

/// Discounted value per state of executing a policy tree.
std::vector<double> policy_tree_values(const Pomdp& m,
                                       const std::vector<std::vector<PolicyTree>>& trees,
                                       int depth, int index);

/// Optimal H-step discounted value at a belief by belief-space dynamic
/// programming (exhaustive over actions and observations).
double optimal_value_dp(const Pomdp& m, const Belief& b, int depth);

/// Robust finite-horizon value of a ME-POMDP: enumerate policy trees,
/// build the environment payoff matrix, and solve the matrix game.
struct RobustGame {
    double value = 0.0;
    /// payoff[tree][env]
    std::vector<std::vector<double>> payoff;
    std::vector<double> tree_weights;
};
RobustGame robust_value_brute_force(const MePomdp& m, int depth);

/// min over a grid on Delta(Q) of max_alpha alpha . b; grid step 1/steps.
double nature_grid_search(const std::vector<AlphaVector>& vectors, const std::vector<int>& q,
                          int steps);

/// Probability of every (action, observation) history of length <=
/// depth under a mixed policy, keyed by the flattened history.
std::map<std::vector<int>, double> mixture_history_probs(const Pomdp& m, const MixedPolicy& mp,
                                                         int depth);
std::map<std::vector<int>, double> behavioral_history_probs(const Pomdp& m,
                                                            const BehavioralRunner& runner,
                                                            int depth);

}  // namespace rpomdp::oracles
