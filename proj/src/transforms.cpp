#include "rpomdp/transforms.hpp"

#include <algorithm>
#include <map>

namespace rpomdp {

namespace {

void require_positive_discount(double gamma) {
    if (gamma <= 0.0)
        throw Error("InvalidDiscount", "the 1/gamma reward correction requires gamma > 0");
}

SparseRow delta_row(int index) { return SparseRow{{index, 1.0}}; }

/// available_actions map for a sentinel model: {diamond} at bottom
/// states, everything elsewhere.
std::vector<std::vector<int>> sentinel_availability(int num_states, int num_actions,
                                                    const std::vector<int>& bottoms,
                                                    int diamond) {
    std::vector<int> all(num_actions);
    for (int a = 0; a < num_actions; ++a) all[a] = a;
    std::vector<std::vector<int>> avail(num_states, all);
    for (int b : bottoms) avail[b] = {diamond};
    return avail;
}

}  // namespace

std::string to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::AbToPosg: return "ab-to-posg";
        case TransformKind::MeToAb: return "me-to-ab";
        case TransformKind::AbToPomemdp: return "ab-to-pomemdp";
        case TransformKind::PomemdpToMo: return "pomemdp-to-mo";
    }
    return "?";
}

std::pair<Posg, TransformRecord> ab_to_posg(const AbPomdp& m) {
    require_positive_discount(m.base.discount);
    const Pomdp& base = m.base;
    const int S = base.num_states(), A = base.num_actions(), Z = base.num_observations();
    const int Q = static_cast<int>(m.belief_support.size());

    // State layout: (s, stage 1) at s, (s, stage 2) at S + s, bottom at 2S.
    auto stage_index = [S](int s, int stage) { return (stage - 1) * S + s; };
    const int bottom = 2 * S;
    const int num_states = 2 * S + 1;

    Posg g;
    g.states.reserve(num_states);
    for (int stage = 1; stage <= 2; ++stage)
        for (int s = 0; s < S; ++s)
            g.states.push_back(base.states[s] + "#" + std::to_string(stage));
    g.states.push_back("bot");
    g.agent_actions = base.actions;
    for (int q : m.belief_support) g.nature_actions.push_back(base.states[q]);
    g.observations = base.observations;
    g.observations.push_back("top");
    const int top = Z;

    g.transition.assign(num_states, std::vector<std::vector<SparseRow>>(
                                        A, std::vector<SparseRow>(Q)));
    g.observation_fn = g.transition;
    g.reward.assign(static_cast<std::size_t>(num_states) * A * Q, 0.0);

    for (int a = 0; a < A; ++a) {
        for (int qi = 0; qi < Q; ++qi) {
            g.transition[bottom][a][qi] = delta_row(stage_index(m.belief_support[qi], 1));
            g.observation_fn[bottom][a][qi] = delta_row(top);
            for (int s = 0; s < S; ++s) {
                for (int stage = 1; stage <= 2; ++stage) {
                    SparseRow row;
                    for (const auto& [sp, p] : base.transition[s][a])
                        row.emplace_back(stage_index(sp, 2), p);
                    g.transition[stage_index(s, stage)][a][qi] = std::move(row);
                    g.reward_at(stage_index(s, stage), a, qi) =
                        base.reward_at(s, a) / base.discount;
                }
                g.observation_fn[stage_index(s, 1)][a][qi] = delta_row(top);
                g.observation_fn[stage_index(s, 2)][a][qi] = base.observation_fn[s][a];
            }
        }
    }

    g.initial_belief = Belief::delta(num_states, bottom);
    g.discount = base.discount;
    g.horizon = base.horizon.plus_one();
    g.agent_available_actions = sentinel_availability(num_states, A, {bottom}, 0);

    TransformRecord rec;
    rec.kind = TransformKind::AbToPosg;
    rec.state_map.resize(num_states);
    for (int stage = 1; stage <= 2; ++stage)
        for (int s = 0; s < S; ++s) rec.state_map[stage_index(s, stage)] = {s, -1, stage, {}};
    rec.state_map[bottom] = {-1, -1, 0, {}};
    rec.sentinel = SentinelInfo{{bottom}, top, 0, 1.0 / base.discount, 1};
    return {std::move(g), std::move(rec)};
}

std::pair<AbPomdp, TransformRecord> me_to_ab(const MePomdp& m) {
    require_positive_discount(m.discount);
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();
    const int n = m.num_envs();

    // Layout: (s, env i, stage j) at ((j-1)*n + i)*S + s, bottom_i at 2nS + i.
    auto stage_index = [S, n](int s, int env, int stage) {
        return ((stage - 1) * n + env) * S + s;
    };
    auto bottom_index = [S, n](int env) { return 2 * n * S + env; };
    const int num_states = 2 * n * S + n;

    Pomdp p;
    p.states.reserve(num_states);
    for (int stage = 1; stage <= 2; ++stage)
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < S; ++s)
                p.states.push_back(m.states[s] + "@" + std::to_string(i + 1) + "#" +
                                   std::to_string(stage));
    for (int i = 0; i < n; ++i) p.states.push_back("bot@" + std::to_string(i + 1));
    p.actions = m.actions;
    p.observations = m.observations;
    p.observations.push_back("top");
    const int top = Z;

    p.transition.assign(num_states, std::vector<SparseRow>(A));
    p.observation_fn.assign(num_states, std::vector<SparseRow>(A));
    p.reward.assign(static_cast<std::size_t>(num_states) * A, 0.0);

    for (int i = 0; i < n; ++i) {
        const MeEnvironment& env = m.envs[i];
        for (int a = 0; a < A; ++a) {
            SparseRow entry;
            for (int s : env.initial_belief.support)
                entry.emplace_back(stage_index(s, i, 1), env.initial_belief.probs[s]);
            p.transition[bottom_index(i)][a] = std::move(entry);
            p.observation_fn[bottom_index(i)][a] = delta_row(top);
        }
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                SparseRow row;
                for (const auto& [sp, pr] : env.transition[s][a])
                    row.emplace_back(stage_index(sp, i, 2), pr);
                for (int stage = 1; stage <= 2; ++stage) {
                    p.transition[stage_index(s, i, stage)][a] = row;
                    p.reward[stage_index(s, i, stage) * A + a] =
                        env.reward[s * A + a] / m.discount;
                }
                p.observation_fn[stage_index(s, i, 1)][a] = delta_row(top);
                p.observation_fn[stage_index(s, i, 2)][a] = env.observation_fn[s][a];
            }
        }
    }

    p.discount = m.discount;
    p.horizon = m.horizon.plus_one();

    std::vector<int> bottoms(n);
    for (int i = 0; i < n; ++i) bottoms[i] = bottom_index(i);
    p.available_actions = sentinel_availability(num_states, A, bottoms, 0);
    p.initial_belief = Belief::uniform(num_states, bottoms);

    AbPomdp ab{std::move(p), bottoms};

    TransformRecord rec;
    rec.kind = TransformKind::MeToAb;
    rec.state_map.resize(num_states);
    for (int stage = 1; stage <= 2; ++stage)
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < S; ++s) rec.state_map[stage_index(s, i, stage)] = {s, i, stage, {}};
    for (int i = 0; i < n; ++i) rec.state_map[bottom_index(i)] = {-1, i, 0, {}};
    rec.sentinel = SentinelInfo{bottoms, top, 0, 1.0 / m.discount, 1};
    return {std::move(ab), std::move(rec)};
}

std::pair<MePomdp, TransformRecord> ab_to_pomemdp(const AbPomdp& m) {
    require_positive_discount(m.base.discount);
    const Pomdp& base = m.base;
    const int S = base.num_states(), A = base.num_actions(), Z = base.num_observations();

    auto stage_index = [S](int s, int stage) { return (stage - 1) * S + s; };
    const int bottom = 2 * S;
    const int num_states = 2 * S + 1;

    MePomdp me;
    me.states.reserve(num_states);
    for (int stage = 1; stage <= 2; ++stage)
        for (int s = 0; s < S; ++s)
            me.states.push_back(base.states[s] + "#" + std::to_string(stage));
    me.states.push_back("bot");
    me.actions = base.actions;
    me.observations = base.observations;
    me.observations.push_back("top");
    const int top = Z;

    std::vector<std::vector<SparseRow>> shared_obs(num_states, std::vector<SparseRow>(A));
    std::vector<std::vector<SparseRow>> shared_trans(num_states, std::vector<SparseRow>(A));
    std::vector<double> shared_reward(static_cast<std::size_t>(num_states) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            SparseRow row;
            for (const auto& [sp, p] : base.transition[s][a])
                row.emplace_back(stage_index(sp, 2), p);
            for (int stage = 1; stage <= 2; ++stage) {
                shared_trans[stage_index(s, stage)][a] = row;
                shared_reward[stage_index(s, stage) * A + a] =
                    base.reward_at(s, a) / base.discount;
            }
            shared_obs[stage_index(s, 1)][a] = delta_row(top);
            shared_obs[stage_index(s, 2)][a] = base.observation_fn[s][a];
        }
    }
    for (int a = 0; a < A; ++a) shared_obs[bottom][a] = delta_row(top);

    for (int q : m.belief_support) {
        MeEnvironment env;
        env.transition = shared_trans;
        for (int a = 0; a < A; ++a)
            env.transition[bottom][a] = delta_row(stage_index(q, 1));
        env.observation_fn = shared_obs;
        env.reward = shared_reward;
        env.initial_belief = Belief::delta(num_states, bottom);
        me.envs.push_back(std::move(env));
    }

    me.discount = base.discount;
    me.horizon = base.horizon.plus_one();
    me.available_actions = sentinel_availability(num_states, A, {bottom}, 0);

    TransformRecord rec;
    rec.kind = TransformKind::AbToPomemdp;
    rec.state_map.resize(num_states);
    for (int stage = 1; stage <= 2; ++stage)
        for (int s = 0; s < S; ++s) rec.state_map[stage_index(s, stage)] = {s, -1, stage, {}};
    rec.state_map[bottom] = {-1, -1, 0, {}};
    rec.sentinel = SentinelInfo{{bottom}, top, 0, 1.0 / base.discount, 1};
    return {std::move(me), std::move(rec)};
}

std::pair<MePomdp, TransformRecord> pomemdp_to_mo(const MePomdp& m, const MoOptions& opts) {
    if (!m.is_po_memdp())
        throw Error("NotPoMemdp", "environments have differing observation tables");
    const int A = m.num_actions();
    const int n = m.num_envs();

    // Enumerate product states reachable from supp(b_1) x ... x supp(b_n).
    std::map<std::vector<int>, int> index_of;
    std::vector<std::vector<int>> product_states;
    auto intern = [&](const std::vector<int>& tuple) {
        auto [it, inserted] = index_of.emplace(tuple, static_cast<int>(product_states.size()));
        if (inserted) {
            product_states.push_back(tuple);
            if (product_states.size() > opts.max_states)
                throw Error("StateSpaceOverflow",
                            "product construction exceeds " + std::to_string(opts.max_states) +
                                " states");
        }
        return it->second;
    };

    std::vector<std::vector<int>> roots;
    {
        std::vector<int> tuple(n, 0);
        std::vector<std::size_t> pos(n, 0);
        while (true) {
            for (int i = 0; i < n; ++i) tuple[i] = m.envs[i].initial_belief.support[pos[i]];
            roots.push_back(tuple);
            int k = n - 1;
            while (k >= 0 && ++pos[k] == m.envs[k].initial_belief.support.size()) {
                pos[k] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }
    for (const auto& root : roots) intern(root);

    // transition rows discovered while walking the reachable set, [state][action]
    std::vector<std::vector<SparseRow>> trans_rows;
    for (int idx = 0; idx < static_cast<int>(product_states.size()); ++idx) {
        const std::vector<int> tuple = product_states[idx];
        std::vector<SparseRow> per_action(A);
        for (int a = 0; a < A; ++a) {
            // product of the n per-environment rows
            std::vector<std::pair<std::vector<int>, double>> partial{{{}, 1.0}};
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<std::vector<int>, double>> next;
                for (const auto& [prefix, p] : partial) {
                    for (const auto& [sp, tp] : m.envs[i].transition[tuple[i]][a]) {
                        auto ext = prefix;
                        ext.push_back(sp);
                        next.emplace_back(std::move(ext), p * tp);
                    }
                }
                partial = std::move(next);
            }
            SparseRow row;
            for (auto& [succ, p] : partial) row.emplace_back(intern(succ), p);
            std::sort(row.begin(), row.end());
            per_action[a] = std::move(row);
        }
        trans_rows.push_back(std::move(per_action));
    }

    const int P = static_cast<int>(product_states.size());
    MePomdp mo;
    for (const auto& tuple : product_states) {
        std::string label;
        for (int i = 0; i < n; ++i) {
            if (i) label += "*";
            label += m.states[tuple[i]];
        }
        mo.states.push_back(label);
    }
    mo.actions = m.actions;
    mo.observations = m.observations;
    mo.discount = m.discount;
    mo.horizon = m.horizon;

    // initial product belief b_1 x ... x b_n
    std::vector<double> init(P, 0.0);
    for (const auto& root : roots) {
        double p = 1.0;
        for (int i = 0; i < n; ++i) p *= m.envs[i].initial_belief.probs[root[i]];
        init[index_of.at(root)] = p;
    }
    Belief initial = Belief::from_probs(std::move(init));

    for (int i = 0; i < n; ++i) {
        MeEnvironment env;
        env.transition = trans_rows;
        env.observation_fn.assign(P, std::vector<SparseRow>(A));
        env.reward.assign(static_cast<std::size_t>(P) * A, 0.0);
        for (int p = 0; p < P; ++p) {
            int si = product_states[p][i];
            for (int a = 0; a < A; ++a) {
                env.observation_fn[p][a] = m.envs[0].observation_fn[si][a];
                env.reward[p * A + a] = m.envs[i].reward[si * A + a];
            }
        }
        env.initial_belief = initial;
        mo.envs.push_back(std::move(env));
    }

    if (m.available_actions) {
        std::vector<std::vector<int>> avail(P);
        for (int p = 0; p < P; ++p) {
            std::vector<int> common = (*m.available_actions)[product_states[p][0]];
            for (int i = 1; i < n; ++i) {
                const auto& other = (*m.available_actions)[product_states[p][i]];
                std::vector<int> kept;
                for (int a : common)
                    if (std::find(other.begin(), other.end(), a) != other.end())
                        kept.push_back(a);
                common = std::move(kept);
            }
            if (common.empty())
                throw Error("NotPoMemdp",
                            "reachable product state has empty action intersection");
            avail[p] = std::move(common);
        }
        mo.available_actions = std::move(avail);
    }

    TransformRecord rec;
    rec.kind = TransformKind::PomemdpToMo;
    rec.state_map.resize(P);
    for (int p = 0; p < P; ++p) rec.state_map[p] = {-1, -1, 0, product_states[p]};
    return {std::move(mo), std::move(rec)};
}

PolicyGraph lift_policy(const TransformRecord& record, const PolicyGraph& policy) {
    if (!record.sentinel)
        throw Error("NoSentinel", "transform has no sentinel prefix; policies transfer unchanged");
    const int top = record.sentinel->top_observation;
    const int new_root = policy.nodes[policy.root].next[top];

    // Re-root past the forced (diamond, top) step and drop the top
    // column; the dummy observation cannot occur after stage one.
    PolicyGraph lifted;
    std::map<int, int> node_of;
    std::vector<int> worklist{new_root};
    node_of[new_root] = 0;
    lifted.nodes.emplace_back();
    while (!worklist.empty()) {
        int idx = worklist.back();
        worklist.pop_back();
        const PolicyGraph::Node& src = policy.nodes[idx];
        PolicyGraph::Node node;
        node.action = src.action;
        for (int z = 0; z < static_cast<int>(src.next.size()); ++z) {
            if (z == top) continue;
            auto [it, inserted] = node_of.emplace(src.next[z], static_cast<int>(lifted.nodes.size()));
            if (inserted) {
                lifted.nodes.emplace_back();
                worklist.push_back(src.next[z]);
            }
            node.next.push_back(it->second);
        }
        lifted.nodes[node_of[idx]] = std::move(node);
    }
    lifted.root = 0;
    return lifted;
}

MixedPolicy lift_policy(const TransformRecord& record, const MixedPolicy& policy) {
    MixedPolicy lifted;
    lifted.weights = policy.weights;
    for (const auto& g : policy.components) lifted.components.push_back(lift_policy(record, g));
    return lifted;
}

}  // namespace rpomdp
