#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rpomdp/game_lp.hpp"

namespace rpomdp::oracles {

SparseRow random_row(SplitMix64& rng, int dim) {
    std::vector<double> w(dim);
    double total = 0.0;
    for (double& x : w) {
        x = rng.unit() + 1e-3;
        total += x;
    }
    SparseRow row;
    double acc = 0.0;
    for (int i = 0; i + 1 < dim; ++i) {
        double p = w[i] / total;
        row.emplace_back(i, p);
        acc += p;
    }
    row.emplace_back(dim - 1, 1.0 - acc);
    return row;
}

Pomdp random_pomdp(std::uint64_t seed, int S, int A, int Z, double discount, Horizon horizon) {
    SplitMix64 rng{seed};
    Pomdp m;
    for (int s = 0; s < S; ++s) m.states.push_back("s" + std::to_string(s));
    for (int a = 0; a < A; ++a) m.actions.push_back("a" + std::to_string(a));
    for (int z = 0; z < Z; ++z) m.observations.push_back("z" + std::to_string(z));
    m.transition.assign(S, std::vector<SparseRow>(A));
    m.observation_fn.assign(S, std::vector<SparseRow>(A));
    m.reward.assign(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            m.transition[s][a] = random_row(rng, S);
            m.observation_fn[s][a] = random_row(rng, Z);
            m.reward[s * A + a] = std::round((rng.unit() * 10.0 - 3.0) * 100.0) / 100.0;
        }
    }
    std::vector<double> init(S);
    {
        SparseRow row = random_row(rng, S);
        for (const auto& [i, p] : row) init[i] = p;
    }
    m.initial_belief = Belief::from_probs(std::move(init));
    m.discount = discount;
    m.horizon = horizon;
    return m;
}

MePomdp random_me_pomdp(std::uint64_t seed, int S, int A, int Z, int n, double discount,
                        Horizon horizon) {
    MePomdp me;
    Pomdp first = random_pomdp(seed, S, A, Z, discount, horizon);
    me.states = first.states;
    me.actions = first.actions;
    me.observations = first.observations;
    me.discount = discount;
    me.horizon = horizon;
    for (int i = 0; i < n; ++i) {
        Pomdp env = random_pomdp(seed * 1000003ull + i, S, A, Z, discount, horizon);
        me.envs.push_back({std::move(env.transition), std::move(env.observation_fn),
                           std::move(env.reward), std::move(env.initial_belief)});
    }
    return me;
}

std::vector<std::vector<PolicyTree>> enumerate_policy_trees(int A, int Z, int depth) {
    std::vector<std::vector<PolicyTree>> trees(depth);
    for (int a = 0; a < A; ++a) trees[0].push_back({a, {}});
    for (int d = 1; d < depth; ++d) {
        const int prev = static_cast<int>(trees[d - 1].size());
        std::vector<int> choice(Z, 0);
        while (true) {
            for (int a = 0; a < A; ++a) trees[d].push_back({a, choice});
            int k = Z - 1;
            while (k >= 0 && ++choice[k] == prev) {
                choice[k] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }
    return trees;
}

std::vector<double> policy_tree_values(const Pomdp& m,
                                       const std::vector<std::vector<PolicyTree>>& trees,
                                       int depth, int index) {
    const int S = m.num_states();
    const PolicyTree& tree = trees[depth][index];
    std::vector<double> v(S, 0.0);
    std::vector<std::vector<double>> child_values;
    if (depth > 0)
        for (int z = 0; z < m.num_observations(); ++z)
            child_values.push_back(policy_tree_values(m, trees, depth - 1, tree.children[z]));
    for (int s = 0; s < S; ++s) {
        double acc = m.reward_at(s, tree.action);
        if (depth > 0) {
            for (const auto& [sp, tp] : m.transition[s][tree.action])
                for (const auto& [z, op] : m.observation_fn[sp][tree.action])
                    acc += m.discount * tp * op * child_values[z][sp];
        }
        v[s] = acc;
    }
    return v;
}

double optimal_value_dp(const Pomdp& m, const Belief& b, int depth) {
    double best = -1e300;
    for (int a = 0; a < m.num_actions(); ++a) {
        double value = 0.0;
        for (int s : b.support) value += b.probs[s] * m.reward_at(s, a);
        if (depth > 1) {
            for (int z = 0; z < m.num_observations(); ++z) {
                double pz = pr_obs(m, b, a, z);
                if (pz <= 1e-13) continue;
                value += m.discount * pz * optimal_value_dp(m, belief_update(m, b, a, z), depth - 1);
            }
        }
        best = std::max(best, value);
    }
    return best;
}

RobustGame robust_value_brute_force(const MePomdp& m, int depth) {
    const auto trees = enumerate_policy_trees(m.num_actions(), m.num_observations(), depth);
    const int num_trees = static_cast<int>(trees[depth - 1].size());
    RobustGame game;
    game.payoff.assign(num_trees, std::vector<double>(m.num_envs(), 0.0));
    for (int i = 0; i < m.num_envs(); ++i) {
        const Pomdp env = env_slice(m, i);
        for (int t = 0; t < num_trees; ++t) {
            const auto values = policy_tree_values(env, trees, depth - 1, t);
            double v = 0.0;
            for (int s : env.initial_belief.support) v += env.initial_belief.probs[s] * values[s];
            game.payoff[t][i] = v;
        }
    }

    // Solve the matrix game: rows maximize, columns minimize. Shift the
    // payoffs positive and use the standard reciprocal program.
    double lo = 1e300;
    for (const auto& row : game.payoff)
        for (double v : row) lo = std::min(lo, v);
    const double shift = 1.0 - lo;
    LinearProgram lp;
    lp.maximize = true;
    lp.objective.assign(m.num_envs(), 1.0);
    for (const auto& row : game.payoff) {
        LinearProgram::Constraint c;
        c.coeffs = row;
        for (double& x : c.coeffs) x += shift;
        c.relation = '<';
        c.rhs = 1.0;
        lp.constraints.push_back(std::move(c));
    }
    const LpSolution sol = lp_solve(lp);
    double denom = 0.0;
    for (double x : sol.primal) denom += x;
    game.value = 1.0 / denom - shift;
    game.tree_weights.assign(num_trees, 0.0);
    double dual_total = 0.0;
    for (int t = 0; t < num_trees; ++t) dual_total += sol.dual[t];
    if (dual_total > 0.0)
        for (int t = 0; t < num_trees; ++t) game.tree_weights[t] = sol.dual[t] / dual_total;
    return game;
}

double nature_grid_search(const std::vector<AlphaVector>& vectors, const std::vector<int>& q,
                          int steps) {
    const int k = static_cast<int>(q.size());
    double best = 1e300;
    std::vector<int> counts(k, 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == k - 1) {
            counts[pos] = remaining;
            double value = -1e300;
            for (const auto& alpha : vectors) {
                double dot = 0.0;
                for (int i = 0; i < k; ++i)
                    dot += (static_cast<double>(counts[i]) / steps) * alpha.values[q[i]];
                value = std::max(value, dot);
            }
            best = std::min(best, value);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[pos] = c;
            rec(pos + 1, remaining - c);
        }
    };
    rec(0, steps);
    return best;
}

namespace {

void graph_history_probs(const Pomdp& m, const PolicyGraph& g, int node, const Belief& b,
                         double prob, std::vector<int>& history, int depth, double weight,
                         std::map<std::vector<int>, double>& out) {
    if (depth == 0) return;
    int a = g.nodes[node].action;
    for (int z = 0; z < m.num_observations(); ++z) {
        double pz = pr_obs(m, b, a, z);
        if (pz <= 1e-15) continue;
        history.push_back(a);
        history.push_back(z);
        double p = prob * pz;
        out[history] += weight * p;
        graph_history_probs(m, g, g.nodes[node].next[z], belief_update(m, b, a, z), p, history,
                            depth - 1, weight, out);
        history.pop_back();
        history.pop_back();
    }
}

void runner_history_probs(const Pomdp& m, const BehavioralRunner& runner, const Belief& b,
                          double prob, std::vector<int>& history, int depth,
                          std::map<std::vector<int>, double>& out) {
    if (depth == 0) return;
    const std::vector<double> dist = runner.action_distribution();
    for (int a = 0; a < static_cast<int>(dist.size()); ++a) {
        if (dist[a] <= 1e-15) continue;
        for (int z = 0; z < m.num_observations(); ++z) {
            double pz = pr_obs(m, b, a, z);
            if (pz <= 1e-15) continue;
            history.push_back(a);
            history.push_back(z);
            double p = prob * dist[a] * pz;
            out[history] += p;
            BehavioralRunner next = runner;
            next.advance(a, z);
            runner_history_probs(m, next, belief_update(m, b, a, z), p, history, depth - 1, out);
            history.pop_back();
            history.pop_back();
        }
    }
}

}  // namespace

std::map<std::vector<int>, double> mixture_history_probs(const Pomdp& m, const MixedPolicy& mp,
                                                         int depth) {
    std::map<std::vector<int>, double> out;
    std::vector<int> history;
    for (std::size_t i = 0; i < mp.components.size(); ++i) {
        graph_history_probs(m, mp.components[i], mp.components[i].root, m.initial_belief, 1.0,
                            history, depth, mp.weights[i], out);
    }
    return out;
}

std::map<std::vector<int>, double> behavioral_history_probs(const Pomdp& m,
                                                            const BehavioralRunner& runner,
                                                            int depth) {
    std::map<std::vector<int>, double> out;
    std::vector<int> history;
    BehavioralRunner fresh = runner;
    fresh.reset();
    runner_history_probs(m, fresh, m.initial_belief, 1.0, history, depth, out);
    return out;
}

}  // namespace rpomdp::oracles
