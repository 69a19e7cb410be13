#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpomdp/types.hpp"

namespace rpomdp {

/// Tabular POMDP. The observation function is keyed by the *successor*
/// state and the action taken, i.e. observation_fn[s'][a] is the
/// distribution of the observation emitted on arrival in s' after
/// playing a.
struct Pomdp {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> observations;

    std::vector<std::vector<SparseRow>> transition;      // [s][a] -> dist over s'
    std::vector<std::vector<SparseRow>> observation_fn;  // [s'][a] -> dist over z
    std::vector<double> reward;                          // dense, s * |A| + a
    Belief initial_belief;
    double discount = 0.95;
    Horizon horizon = Horizon::infinite();
    // When present, available_actions[s] is the nonempty set of actions
    // playable in s; absent means every action everywhere.
    std::optional<std::vector<std::vector<int>>> available_actions;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_actions() const { return static_cast<int>(actions.size()); }
    int num_observations() const { return static_cast<int>(observations.size()); }

    double reward_at(int s, int a) const { return reward[s * num_actions() + a]; }
    double& reward_at(int s, int a) { return reward[s * num_actions() + a]; }

    double min_reward() const;
    double max_reward() const;
};

/// One environment of a multi-environment POMDP; index spaces live on
/// the enclosing MePomdp.
struct MeEnvironment {
    std::vector<std::vector<SparseRow>> transition;
    std::vector<std::vector<SparseRow>> observation_fn;
    std::vector<double> reward;
    Belief initial_belief;
};

struct MePomdp {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    std::vector<MeEnvironment> envs;
    double discount = 0.95;
    Horizon horizon = Horizon::infinite();
    std::optional<std::vector<std::vector<int>>> available_actions;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_actions() const { return static_cast<int>(actions.size()); }
    int num_observations() const { return static_cast<int>(observations.size()); }
    int num_envs() const { return static_cast<int>(envs.size()); }

    /// All observation tables coincide (exact equality of stored reals).
    bool is_po_memdp() const;
    /// All transition tables and initial beliefs coincide.
    bool is_mo_pomdp() const;
};

/// POMDP whose initial belief is chosen adversarially from the simplex
/// over belief_support. base.initial_belief is set to the uniform
/// distribution over the support as a simulation default; solvers use
/// the support set only.
struct AbPomdp {
    Pomdp base;
    std::vector<int> belief_support;  // sorted state indices (Q)
};

/// One-sided partially observable stochastic game: agent partially
/// observing, nature fully observing.
struct Posg {
    std::vector<std::string> states;
    std::vector<std::string> agent_actions;
    std::vector<std::string> nature_actions;
    std::vector<std::string> observations;

    std::vector<std::vector<std::vector<SparseRow>>> transition;      // [s][a1][a2]
    std::vector<std::vector<std::vector<SparseRow>>> observation_fn;  // [s'][a1][a2]
    std::vector<double> reward;  // dense, (s * |A1| + a1) * |A2| + a2
    Belief initial_belief;
    double discount = 0.95;
    Horizon horizon = Horizon::infinite();
    std::optional<std::vector<std::vector<int>>> agent_available_actions;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_agent_actions() const { return static_cast<int>(agent_actions.size()); }
    int num_nature_actions() const { return static_cast<int>(nature_actions.size()); }
    int num_observations() const { return static_cast<int>(observations.size()); }

    double reward_at(int s, int a1, int a2) const {
        return reward[(s * num_agent_actions() + a1) * num_nature_actions() + a2];
    }
    double& reward_at(int s, int a1, int a2) {
        return reward[(s * num_agent_actions() + a1) * num_nature_actions() + a2];
    }
};

/// Invariant checks. Violations are data, not failures; the empty list
/// means the model is well formed.
std::vector<std::string> validate(const Pomdp& m);
std::vector<std::string> validate(const MePomdp& m);
std::vector<std::string> validate(const AbPomdp& m);
std::vector<std::string> validate(const Posg& m);
std::vector<std::string> validate(const Belief& b);

/// P(z | b, a) = sum_{s,s'} b(s) T(s,a)(s') O(s',a)(z).
double pr_obs(const Pomdp& m, const Belief& b, int action, int obs);

/// Bayes update. Throws ZeroProbabilityObservation when the normalizer
/// is <= 1e-12.
Belief belief_update(const Pomdp& m, const Belief& b, int action, int obs);

/// The i-th environment as a standalone POMDP (0-based index).
Pomdp env_slice(const MePomdp& m, int env);

}  // namespace rpomdp
