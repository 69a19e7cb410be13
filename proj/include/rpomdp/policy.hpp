#pragma once

#include <cstdint>
#include <vector>

#include "rpomdp/bounds.hpp"
#include "rpomdp/game_lp.hpp"
#include "rpomdp/model.hpp"
#include "rpomdp/policy_graph.hpp"

namespace rpomdp {

/// Controller for the policy represented by a lower-bound vector:
/// Act/Next wiring with pruned successors resolved to a surviving
/// dominating vector. Blind vectors yield one-node self-loop
/// controllers.
PolicyGraph extract_policy(const LowerBound& lb, int vector_index);

/// Controller for a finite-horizon stack vector; successors of level t
/// point into level t-1, the last level self-loops.
PolicyGraph extract_policy(const GammaStack& stack, int level, int vector_index);

/// Mixture of extracted controllers weighted by the agent LP solution;
/// zero-weight components are dropped.
MixedPolicy agent_policy(const LowerBound& lb, const AgentSolution& sol);
MixedPolicy agent_policy(const GammaStack& stack, const AgentSolution& sol);

/// Stepwise (behavioral) execution of a mixed policy: randomize over
/// the components that could have generated the current history. On an
/// infeasible history the runner plays the fixed fallback action 0.
class BehavioralRunner {
public:
    BehavioralRunner(MixedPolicy policy, int num_actions);

    void reset();
    /// Action distribution at the current history; sums to 1.
    std::vector<double> action_distribution() const;
    /// Advance the history by one (action, observation) step.
    void advance(int action, int obs);

    int num_actions() const { return num_actions_; }
    const MixedPolicy& policy() const { return policy_; }

private:
    MixedPolicy policy_;
    int num_actions_;
    std::vector<int> node_;
    std::vector<bool> alive_;
};

BehavioralRunner mixed_to_behavioral(MixedPolicy policy, int num_actions);

/// Exact controller value per state at the root node: the discounted
/// fixpoint for infinite horizons, the unrolled recursion for finite
/// ones.
std::vector<double> evaluate_fsc_exact(const Pomdp& m, const PolicyGraph& g);

/// Weight-averaged exact component values.
std::vector<double> evaluate_mixed_exact(const Pomdp& m, const MixedPolicy& mp);

struct SimulationEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    int episodes = 0;
};

/// Monte-Carlo discounted return; episode e draws from an RNG stream
/// derived from (seed, e), so results do not depend on execution order.
SimulationEstimate simulate(const Pomdp& m, const PolicyGraph& g, int episodes, int horizon_cap,
                            std::uint64_t seed);
SimulationEstimate simulate(const Pomdp& m, const MixedPolicy& mp, int episodes, int horizon_cap,
                            std::uint64_t seed);
SimulationEstimate simulate(const Pomdp& m, const BehavioralRunner& runner, int episodes,
                            int horizon_cap, std::uint64_t seed);

}  // namespace rpomdp
