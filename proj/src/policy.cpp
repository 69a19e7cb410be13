#include "rpomdp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "rpomdp/rng.hpp"

namespace rpomdp {

namespace {

constexpr double kWeightFloor = 1e-12;

int sample_sparse(const SparseRow& row, double u) {
    double acc = 0.0;
    for (const auto& [i, p] : row) {
        acc += p;
        if (u < acc) return i;
    }
    return row.back().first;
}

int sample_belief(const Belief& b, double u) {
    double acc = 0.0;
    for (int s : b.support) {
        acc += b.probs[s];
        if (u < acc) return s;
    }
    return b.support.back();
}

int sample_dense(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

PolicyGraph extract_policy(const LowerBound& lb, int vector_index) {
    const auto& vectors = lb.vectors();
    if (vector_index < 0 || vector_index >= static_cast<int>(vectors.size()))
        throw Error("MissingProvenance", "vector index out of range");

    PolicyGraph g;
    std::map<int, int> node_of;
    std::vector<int> worklist{vector_index};
    node_of[vector_index] = 0;
    g.nodes.emplace_back();
    while (!worklist.empty()) {
        int idx = worklist.back();
        worklist.pop_back();
        const AlphaVector& v = vectors[idx];
        if (v.successors.empty())
            throw Error("MissingProvenance",
                        "vector " + std::to_string(idx) + " has no successor map");
        PolicyGraph::Node node;
        node.action = v.action;
        node.next.resize(v.successors.size());
        for (std::size_t z = 0; z < v.successors.size(); ++z) {
            int succ = lb.resolve_dominator(v.successors[z]);
            auto [it, inserted] = node_of.emplace(succ, static_cast<int>(g.nodes.size()));
            if (inserted) {
                g.nodes.emplace_back();
                worklist.push_back(succ);
            }
            node.next[z] = it->second;
        }
        g.nodes[node_of[idx]] = std::move(node);
    }
    g.root = 0;
    return g;
}

PolicyGraph extract_policy(const GammaStack& stack, int level, int vector_index) {
    if (level < 0 || level >= static_cast<int>(stack.levels.size()))
        throw Error("MissingProvenance", "stack level out of range");

    PolicyGraph g;
    std::map<std::pair<int, int>, int> node_of;
    std::vector<std::pair<int, int>> worklist{{level, vector_index}};
    node_of[{level, vector_index}] = 0;
    g.nodes.emplace_back();
    while (!worklist.empty()) {
        auto [lv, idx] = worklist.back();
        worklist.pop_back();
        const AlphaVector& v = stack.levels[lv][idx];
        PolicyGraph::Node node;
        node.action = v.action;
        if (lv == 0) {
            // horizon exhausted below this point; self-loop
            node.next.assign(stack.num_observations, node_of[{lv, idx}]);
        } else {
            node.next.resize(v.successors.size());
            for (std::size_t z = 0; z < v.successors.size(); ++z) {
                std::pair<int, int> key{lv - 1, v.successors[z]};
                auto [it, inserted] = node_of.emplace(key, static_cast<int>(g.nodes.size()));
                if (inserted) {
                    g.nodes.emplace_back();
                    worklist.push_back(key);
                }
                node.next[z] = it->second;
            }
        }
        g.nodes[node_of[{lv, idx}]] = std::move(node);
    }
    g.root = 0;
    return g;
}

namespace {

MixedPolicy collect_mixture(const AgentSolution& sol,
                            const std::function<PolicyGraph(int)>& extract) {
    MixedPolicy mp;
    double total = 0.0;
    for (std::size_t i = 0; i < sol.weights.size(); ++i) {
        if (sol.weights[i] <= kWeightFloor) continue;
        mp.components.push_back(extract(static_cast<int>(i)));
        mp.weights.push_back(sol.weights[i]);
        total += sol.weights[i];
    }
    for (double& w : mp.weights) w /= total;
    return mp;
}

}  // namespace

MixedPolicy agent_policy(const LowerBound& lb, const AgentSolution& sol) {
    return collect_mixture(sol, [&](int i) { return extract_policy(lb, i); });
}

MixedPolicy agent_policy(const GammaStack& stack, const AgentSolution& sol) {
    int top = static_cast<int>(stack.levels.size()) - 1;
    return collect_mixture(sol, [&](int i) { return extract_policy(stack, top, i); });
}

BehavioralRunner::BehavioralRunner(MixedPolicy policy, int num_actions)
    : policy_(std::move(policy)), num_actions_(num_actions) {
    reset();
}

void BehavioralRunner::reset() {
    node_.assign(policy_.components.size(), 0);
    for (std::size_t i = 0; i < policy_.components.size(); ++i)
        node_[i] = policy_.components[i].root;
    alive_.assign(policy_.components.size(), true);
}

std::vector<double> BehavioralRunner::action_distribution() const {
    std::vector<double> dist(num_actions_, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < policy_.components.size(); ++i) {
        if (!alive_[i]) continue;
        dist[policy_.components[i].nodes[node_[i]].action] += policy_.weights[i];
        total += policy_.weights[i];
    }
    if (total <= 0.0) {
        std::fill(dist.begin(), dist.end(), 0.0);
        dist[0] = 1.0;  // fallback action
        return dist;
    }
    for (double& p : dist) p /= total;
    return dist;
}

void BehavioralRunner::advance(int action, int obs) {
    for (std::size_t i = 0; i < policy_.components.size(); ++i) {
        if (!alive_[i]) continue;
        const auto& node = policy_.components[i].nodes[node_[i]];
        if (node.action != action) {
            alive_[i] = false;
            continue;
        }
        node_[i] = node.next[obs];
    }
}

BehavioralRunner mixed_to_behavioral(MixedPolicy policy, int num_actions) {
    return BehavioralRunner(std::move(policy), num_actions);
}

std::vector<double> evaluate_fsc_exact(const Pomdp& m, const PolicyGraph& g) {
    const int S = m.num_states();
    const int N = static_cast<int>(g.nodes.size());
    if (N == 0) throw Error("MissingProvenance", "empty controller");

    auto step = [&](const std::vector<double>& value, std::vector<double>& out) {
        for (int node = 0; node < N; ++node) {
            const auto& nd = g.nodes[node];
            for (int s = 0; s < S; ++s) {
                double acc = m.reward_at(s, nd.action);
                for (const auto& [sp, tp] : m.transition[s][nd.action]) {
                    for (const auto& [z, op] : m.observation_fn[sp][nd.action]) {
                        acc += m.discount * tp * op * value[nd.next[z] * S + sp];
                    }
                }
                out[node * S + s] = acc;
            }
        }
    };

    std::vector<double> value(static_cast<std::size_t>(N) * S, 0.0);
    std::vector<double> fresh(value.size());
    if (m.horizon.is_finite()) {
        for (int t = 0; t < m.horizon.steps(); ++t) {
            step(value, fresh);
            value.swap(fresh);
        }
    } else {
        if (m.discount >= 1.0)
            throw Error("InvalidDiscount", "infinite-horizon evaluation requires discount < 1");
        double scale = std::max({1.0, std::abs(m.min_reward()), std::abs(m.max_reward())}) /
                       (1.0 - m.discount);
        double target = 1e-11 * scale * (1.0 - m.discount) / std::max(m.discount, 1e-12);
        double residual = target + 1.0;
        long iters = 0;
        while (residual > target) {
            step(value, fresh);
            residual = 0.0;
            for (std::size_t i = 0; i < value.size(); ++i)
                residual = std::max(residual, std::abs(fresh[i] - value[i]));
            value.swap(fresh);
            if (!std::isfinite(residual) || ++iters > 1000000)
                throw Error("SingularSystem", "controller evaluation failed to converge");
        }
    }

    std::vector<double> out(S);
    for (int s = 0; s < S; ++s) out[s] = value[g.root * S + s];
    return out;
}

std::vector<double> evaluate_mixed_exact(const Pomdp& m, const MixedPolicy& mp) {
    std::vector<double> out(m.num_states(), 0.0);
    for (std::size_t i = 0; i < mp.components.size(); ++i) {
        const auto v = evaluate_fsc_exact(m, mp.components[i]);
        for (int s = 0; s < m.num_states(); ++s) out[s] += mp.weights[i] * v[s];
    }
    return out;
}

namespace {

/// Episode driver abstraction so the three policy kinds share one
/// simulation loop.
struct EpisodeStats {
    double sum = 0.0;
    double sum_sq = 0.0;
};

template <typename PickAction, typename OnStep>
double run_episode(const Pomdp& m, int horizon_cap, SplitMix64& rng, PickAction pick,
                   OnStep on_step) {
    int s = sample_belief(m.initial_belief, rng.unit());
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < horizon_cap; ++t) {
        int a = pick(rng);
        ret += discount * m.reward_at(s, a);
        discount *= m.discount;
        int sp = sample_sparse(m.transition[s][a], rng.unit());
        int z = sample_sparse(m.observation_fn[sp][a], rng.unit());
        on_step(a, z);
        s = sp;
    }
    return ret;
}

SimulationEstimate finish(EpisodeStats stats, int episodes) {
    SimulationEstimate est;
    est.episodes = episodes;
    est.mean = stats.sum / episodes;
    if (episodes > 1) {
        double var = (stats.sum_sq - stats.sum * stats.sum / episodes) / (episodes - 1);
        est.standard_error = std::sqrt(std::max(var, 0.0) / episodes);
    }
    return est;
}

SplitMix64 episode_rng(std::uint64_t seed, int episode) {
    SplitMix64 rng{seed ^ (0xD1B54A32D192ED03ull * (static_cast<std::uint64_t>(episode) + 1))};
    rng.next();
    return rng;
}

void check_episode_args(int episodes, int horizon_cap) {
    if (episodes < 1) throw Error("InvalidArgument", "episodes must be >= 1");
    if (horizon_cap < 1) throw Error("InvalidArgument", "horizon_cap must be >= 1");
}

}  // namespace

SimulationEstimate simulate(const Pomdp& m, const PolicyGraph& g, int episodes, int horizon_cap,
                            std::uint64_t seed) {
    check_episode_args(episodes, horizon_cap);
    EpisodeStats stats;
    for (int e = 0; e < episodes; ++e) {
        SplitMix64 rng = episode_rng(seed, e);
        int node = g.root;
        double ret = run_episode(
            m, horizon_cap, rng, [&](SplitMix64&) { return g.nodes[node].action; },
            [&](int, int z) { node = g.nodes[node].next[z]; });
        stats.sum += ret;
        stats.sum_sq += ret * ret;
    }
    return finish(stats, episodes);
}

SimulationEstimate simulate(const Pomdp& m, const MixedPolicy& mp, int episodes, int horizon_cap,
                            std::uint64_t seed) {
    check_episode_args(episodes, horizon_cap);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (double w : mp.weights) cumulative.push_back(acc += w);
    EpisodeStats stats;
    for (int e = 0; e < episodes; ++e) {
        SplitMix64 rng = episode_rng(seed, e);
        double u = rng.unit();
        std::size_t comp = 0;
        while (comp + 1 < cumulative.size() && u >= cumulative[comp]) ++comp;
        const PolicyGraph& g = mp.components[comp];
        int node = g.root;
        double ret = run_episode(
            m, horizon_cap, rng, [&](SplitMix64&) { return g.nodes[node].action; },
            [&](int, int z) { node = g.nodes[node].next[z]; });
        stats.sum += ret;
        stats.sum_sq += ret * ret;
    }
    return finish(stats, episodes);
}

SimulationEstimate simulate(const Pomdp& m, const BehavioralRunner& runner, int episodes,
                            int horizon_cap, std::uint64_t seed) {
    check_episode_args(episodes, horizon_cap);
    EpisodeStats stats;
    for (int e = 0; e < episodes; ++e) {
        SplitMix64 rng = episode_rng(seed, e);
        BehavioralRunner r = runner;
        r.reset();
        double ret = run_episode(
            m, horizon_cap, rng,
            [&](SplitMix64& state) { return sample_dense(r.action_distribution(), state.unit()); },
            [&](int a, int z) { r.advance(a, z); });
        stats.sum += ret;
        stats.sum_sq += ret * ret;
    }
    return finish(stats, episodes);
}

}  // namespace rpomdp
