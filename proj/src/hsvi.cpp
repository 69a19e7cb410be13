#include "rpomdp/hsvi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace rpomdp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double default_epsilon(const Pomdp& m) {
    double smallest = std::numeric_limits<double>::infinity();
    for (double r : m.reward)
        if (r != 0.0) smallest = std::min(smallest, std::abs(r));
    if (!std::isfinite(smallest)) return 1e-3;  // all-zero rewards
    return 0.1 * smallest;
}

int default_max_depth(const Pomdp& m, double epsilon) {
    double range = m.max_reward() - m.min_reward();
    if (range <= 0.0) return 5;
    double arg = epsilon * (1.0 - m.discount) / range;
    if (arg >= 1.0) return 5;
    return static_cast<int>(std::ceil(std::log(arg) / std::log(m.discount))) + 5;
}

struct ExploreContext {
    const Pomdp& m;
    UpperBound& ub;
    LowerBound& lb;
    double epsilon;
    int max_depth;
    bool weighted;
    Clock::time_point start;
    double deadline_s;
    ExploreStats stats;
};

/// Upper-bound one-step lookahead for (b, a); fills obs_probs and
/// successor beliefs for reuse.
double q_upper(ExploreContext& ctx, const Belief& b, int a, std::vector<double>& obs_probs,
               std::vector<Belief>& successors) {
    const Pomdp& m = ctx.m;
    const int Z = m.num_observations();
    obs_probs.assign(Z, 0.0);
    successors.assign(Z, Belief{});
    double value = 0.0;
    for (int s : b.support) value += b.probs[s] * m.reward_at(s, a);
    for (int z = 0; z < Z; ++z) {
        double pz = pr_obs(m, b, a, z);
        obs_probs[z] = pz;
        if (pz <= 1e-12) continue;
        successors[z] = belief_update(m, b, a, z);
        value += m.discount * pz * ctx.ub.value_at(successors[z]);
    }
    return value;
}

void explore_rec(ExploreContext& ctx, const Belief& b, int depth) {
    if (seconds_since(ctx.start) > ctx.deadline_s) {
        ctx.stats.timed_out = true;
        return;
    }
    const double width = ctx.ub.value_at(b) - ctx.lb.value_at(b);
    const double slack = ctx.epsilon * std::pow(ctx.m.discount, -depth);
    if (width <= slack) return;
    if (depth >= ctx.max_depth) {
        ++ctx.stats.depth_limit_hits;
        return;
    }

    const int Z = ctx.m.num_observations();
    std::vector<double> obs_probs, best_obs_probs;
    std::vector<Belief> successors, best_successors;
    double best_q = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < ctx.m.num_actions(); ++a) {
        double q = q_upper(ctx, b, a, obs_probs, successors);
        if (q > best_q) {
            best_q = q;
            best_obs_probs.swap(obs_probs);
            best_successors.swap(successors);
        }
    }

    const double child_slack = ctx.epsilon * std::pow(ctx.m.discount, -(depth + 1));
    int best_obs = -1;
    double best_score = 0.0;
    for (int z = 0; z < Z; ++z) {
        if (best_obs_probs[z] <= 1e-12) continue;
        double excess = gap_value(ctx.ub, ctx.lb, best_successors[z]) - child_slack;
        double score = ctx.weighted ? best_obs_probs[z] * excess : excess;
        if (excess > 0.0 && (best_obs < 0 || score > best_score)) {
            best_obs = z;
            best_score = score;
        }
    }
    if (best_obs >= 0) explore_rec(ctx, best_successors[best_obs], depth + 1);

    // unwind: tighten both bounds at b
    ctx.lb.insert(backup(ctx.m, ctx.lb, b));
    double fresh_q = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < ctx.m.num_actions(); ++a)
        fresh_q = std::max(fresh_q, q_upper(ctx, b, a, obs_probs, successors));
    ctx.ub.insert(b, fresh_q);
}

}  // namespace

double gap_value(const UpperBound& ub, const LowerBound& lb, const Belief& b) {
    return ub.value_at(b) - lb.value_at(b);
}

ExploreStats explore(const Pomdp& m, UpperBound& ub, LowerBound& lb, const Belief& b,
                     const SolveConfig& cfg, double deadline_s, double elapsed_offset_s) {
    double epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(m);
    int max_depth = cfg.max_depth >= 0 ? cfg.max_depth : default_max_depth(m, epsilon);
    ExploreContext ctx{m,      ub,
                       lb,     epsilon,
                       max_depth, cfg.weighted_excess,
                       Clock::now(), deadline_s - elapsed_offset_s,
                       {}};
    explore_rec(ctx, b, 0);
    return ctx.stats;
}

SolveResult ab_hsvi(const AbPomdp& m, const SolveConfig& cfg) {
    const Pomdp& base = m.base;
    if (base.discount <= 0.0 || base.discount >= 1.0)
        throw Error("InvalidDiscount", "AB-HSVI requires discount in (0,1)");

    const auto start = Clock::now();
    const double epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(base);
    const int max_depth = cfg.max_depth >= 0 ? cfg.max_depth : default_max_depth(base, epsilon);

    SolveResult result;
    result.epsilon_used = epsilon;
    result.upper = UpperBound(fib_bound(base));
    for (auto& v : blind_bound(base)) result.lower.insert(std::move(v));

    ExploreContext ctx{base,  result.upper, result.lower,       epsilon, max_depth,
                       cfg.weighted_excess, start, cfg.time_limit_s, {}};

    int iter = 0;
    while (true) {
        std::vector<AlphaVector> active;
        for (int i : result.lower.active_indices()) active.push_back(result.lower.vector(i));
        NatureSolution nature = nature_lp(active, m.belief_support, base.num_states());
        result.worst_belief = nature.belief;
        result.lb_value = result.lower.value_at(nature.belief);
        result.ub_value = result.upper.value_at(nature.belief);
        double gap = result.ub_value - result.lb_value;
        result.trace.push_back({iter, seconds_since(start), result.lb_value, result.ub_value, gap});
        if (gap < epsilon) {
            result.converged = true;
            break;
        }
        if (seconds_since(start) > cfg.time_limit_s || ctx.stats.timed_out) {
            result.converged = false;
            break;
        }
        explore_rec(ctx, nature.belief, 0);
        ++iter;
    }
    result.iterations = iter;
    result.depth_limit_hits = ctx.stats.depth_limit_hits;
    result.wall_time_s = seconds_since(start);
    return result;
}

ExactSolution solve_exact(const AbPomdp& m, int horizon, const ExactGammaOptions& opts) {
    ExactSolution sol;
    sol.stack = exact_gamma(m.base, horizon, opts);
    sol.nature = nature_lp(sol.stack.top(), m.belief_support, m.base.num_states());
    sol.agent = agent_lp(sol.stack.top(), m.belief_support);
    sol.value = sol.nature.value;
    return sol;
}

MeExactSolution solve_me_exact(const MePomdp& m, const ExactGammaOptions& opts) {
    if (!m.horizon.is_finite())
        throw Error("InvalidHorizon", "the exact pipeline requires a finite horizon");
    MeExactSolution sol;
    auto [ab, record] = me_to_ab(m);
    sol.record = std::move(record);
    ExactSolution inner = solve_exact(ab, ab.base.horizon.steps(), opts);
    sol.value = inner.value;
    sol.nature = std::move(inner.nature);
    sol.agent = std::move(inner.agent);
    sol.stack = std::move(inner.stack);
    sol.ab = std::move(ab);
    sol.policy_transformed = agent_policy(sol.stack, sol.agent);
    sol.policy = lift_policy(sol.record, sol.policy_transformed);
    return sol;
}

MixedPolicy extract_solution_policy(const AbPomdp& m, const SolveResult& result,
                                    AgentSolution* agent_out) {
    const std::vector<int> active = result.lower.active_indices();
    std::vector<AlphaVector> vectors;
    vectors.reserve(active.size());
    for (int i : active) vectors.push_back(result.lower.vector(i));
    AgentSolution sol = agent_lp(vectors, m.belief_support);

    MixedPolicy mp;
    double total = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (sol.weights[k] <= 1e-12) continue;
        mp.components.push_back(extract_policy(result.lower, active[k]));
        mp.weights.push_back(sol.weights[k]);
        total += sol.weights[k];
    }
    for (double& w : mp.weights) w /= total;
    if (agent_out) *agent_out = std::move(sol);
    return mp;
}

MeHsviSolution solve_me_hsvi(const MePomdp& m, const SolveConfig& cfg) {
    MeHsviSolution sol;
    auto [ab, record] = me_to_ab(m);
    sol.record = std::move(record);
    sol.result = ab_hsvi(ab, cfg);
    sol.ab = std::move(ab);
    sol.policy_transformed = extract_solution_policy(sol.ab, sol.result);
    sol.policy = lift_policy(sol.record, sol.policy_transformed);
    return sol;
}

}  // namespace rpomdp
