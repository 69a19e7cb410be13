#include "rpomdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rpomdp {

namespace {

bool row_ok(const SparseRow& row, int dim) {
    double sum = 0.0;
    int prev = -1;
    for (const auto& [i, p] : row) {
        if (i <= prev || i >= dim) return false;
        if (p < 0.0 || !std::isfinite(p)) return false;
        prev = i;
        sum += p;
    }
    return std::abs(sum - 1.0) <= kDistributionTol;
}

void check_tables(const std::vector<std::vector<SparseRow>>& transition,
                  const std::vector<std::vector<SparseRow>>& observation_fn,
                  const std::vector<double>& reward, int S, int A, int Z,
                  const std::string& prefix, std::vector<std::string>& out) {
    if (static_cast<int>(transition.size()) != S) {
        out.push_back(prefix + "transition table has wrong state count");
        return;
    }
    if (static_cast<int>(observation_fn.size()) != S) {
        out.push_back(prefix + "observation table has wrong state count");
        return;
    }
    if (static_cast<int>(reward.size()) != S * A) {
        out.push_back(prefix + "reward table has wrong size");
        return;
    }
    for (int s = 0; s < S; ++s) {
        if (static_cast<int>(transition[s].size()) != A ||
            static_cast<int>(observation_fn[s].size()) != A) {
            out.push_back(prefix + "action dimension mismatch at state " + std::to_string(s));
            return;
        }
        for (int a = 0; a < A; ++a) {
            if (!row_ok(transition[s][a], S)) {
                std::ostringstream os;
                os << prefix << "transition row (s" << s << ",a" << a << ") is not a distribution";
                out.push_back(os.str());
            }
            if (!row_ok(observation_fn[s][a], Z)) {
                std::ostringstream os;
                os << prefix << "observation row (s'" << s << ",a" << a << ") is not a distribution";
                out.push_back(os.str());
            }
        }
    }
    for (double r : reward) {
        if (!std::isfinite(r)) {
            out.push_back(prefix + "reward table contains a non-finite entry");
            break;
        }
    }
}

void check_discount_horizon(double discount, const Horizon& horizon,
                            std::vector<std::string>& out) {
    if (discount < 0.0 || discount > 1.0 || !std::isfinite(discount))
        out.push_back("discount/horizon: discount outside [0,1]");
    else if (horizon.is_infinite() && discount >= 1.0)
        out.push_back("discount/horizon: discount must be < 1 with an infinite horizon");
    if (horizon.is_finite() && horizon.steps() < 1)
        out.push_back("discount/horizon: finite horizon must be >= 1");
}

void check_available(const std::optional<std::vector<std::vector<int>>>& avail, int S, int A,
                     std::vector<std::string>& out) {
    if (!avail) return;
    if (static_cast<int>(avail->size()) != S) {
        out.push_back("available_actions has wrong state count");
        return;
    }
    for (int s = 0; s < S; ++s) {
        const auto& set = (*avail)[s];
        if (set.empty()) out.push_back("available_actions empty at state " + std::to_string(s));
        for (int a : set)
            if (a < 0 || a >= A)
                out.push_back("available_actions out of range at state " + std::to_string(s));
    }
}

}  // namespace

double Pomdp::min_reward() const {
    double m = std::numeric_limits<double>::infinity();
    for (double r : reward) m = std::min(m, r);
    return m;
}

double Pomdp::max_reward() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double r : reward) m = std::max(m, r);
    return m;
}

bool MePomdp::is_po_memdp() const {
    for (int i = 1; i < num_envs(); ++i)
        if (envs[i].observation_fn != envs[0].observation_fn) return false;
    return true;
}

bool MePomdp::is_mo_pomdp() const {
    for (int i = 1; i < num_envs(); ++i) {
        if (envs[i].transition != envs[0].transition) return false;
        if (envs[i].initial_belief.probs != envs[0].initial_belief.probs) return false;
    }
    return true;
}

std::vector<std::string> validate(const Belief& b) {
    std::vector<std::string> out;
    double sum = 0.0;
    std::vector<int> expected_support;
    for (int s = 0; s < b.size(); ++s) {
        double p = b.probs[s];
        if (p < 0.0 || !std::isfinite(p)) out.push_back("belief entry negative or non-finite");
        if (p != 0.0) expected_support.push_back(s);
        sum += p;
    }
    if (std::abs(sum - 1.0) > kDistributionTol) out.push_back("belief does not sum to 1");
    if (expected_support != b.support) out.push_back("belief support inconsistent with probs");
    return out;
}

std::vector<std::string> validate(const Pomdp& m) {
    std::vector<std::string> out;
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();
    if (S == 0 || A == 0 || Z == 0) {
        out.push_back("empty state, action, or observation space");
        return out;
    }
    check_tables(m.transition, m.observation_fn, m.reward, S, A, Z, "", out);
    check_discount_horizon(m.discount, m.horizon, out);
    check_available(m.available_actions, S, A, out);
    if (m.initial_belief.size() != S) {
        out.push_back("initial belief has wrong dimension");
    } else {
        for (auto& v : validate(m.initial_belief)) out.push_back("initial belief: " + v);
    }
    return out;
}

std::vector<std::string> validate(const MePomdp& m) {
    std::vector<std::string> out;
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();
    if (S == 0 || A == 0 || Z == 0 || m.num_envs() == 0) {
        out.push_back("empty state, action, observation, or environment space");
        return out;
    }
    check_discount_horizon(m.discount, m.horizon, out);
    check_available(m.available_actions, S, A, out);
    for (int i = 0; i < m.num_envs(); ++i) {
        const auto& env = m.envs[i];
        std::string prefix = "env " + std::to_string(i) + ": ";
        check_tables(env.transition, env.observation_fn, env.reward, S, A, Z, prefix, out);
        if (env.initial_belief.size() != S) {
            out.push_back(prefix + "initial belief has wrong dimension");
        } else {
            for (auto& v : validate(env.initial_belief)) out.push_back(prefix + v);
        }
    }
    return out;
}

std::vector<std::string> validate(const AbPomdp& m) {
    std::vector<std::string> out = validate(m.base);
    if (m.belief_support.empty()) out.push_back("belief_support is empty");
    int prev = -1;
    for (int q : m.belief_support) {
        if (q <= prev) out.push_back("belief_support not sorted or has duplicates");
        if (q < 0 || q >= m.base.num_states()) out.push_back("belief_support state out of range");
        prev = q;
    }
    return out;
}

std::vector<std::string> validate(const Posg& m) {
    std::vector<std::string> out;
    const int S = m.num_states(), A1 = m.num_agent_actions(), A2 = m.num_nature_actions(),
              Z = m.num_observations();
    if (S == 0 || A1 == 0 || A2 == 0 || Z == 0) {
        out.push_back("empty state, action, or observation space");
        return out;
    }
    check_discount_horizon(m.discount, m.horizon, out);
    check_available(m.agent_available_actions, S, A1, out);
    if (static_cast<int>(m.transition.size()) != S ||
        static_cast<int>(m.observation_fn.size()) != S ||
        static_cast<int>(m.reward.size()) != S * A1 * A2) {
        out.push_back("table dimensions do not match state/action spaces");
        return out;
    }
    for (int s = 0; s < S; ++s) {
        for (int a1 = 0; a1 < A1; ++a1) {
            for (int a2 = 0; a2 < A2; ++a2) {
                if (!row_ok(m.transition[s][a1][a2], S)) {
                    std::ostringstream os;
                    os << "transition row (s" << s << ",a" << a1 << ",q" << a2
                       << ") is not a distribution";
                    out.push_back(os.str());
                }
                if (!row_ok(m.observation_fn[s][a1][a2], Z)) {
                    std::ostringstream os;
                    os << "observation row (s'" << s << ",a" << a1 << ",q" << a2
                       << ") is not a distribution";
                    out.push_back(os.str());
                }
            }
        }
    }
    if (m.initial_belief.size() != S) {
        out.push_back("initial belief has wrong dimension");
    } else {
        for (auto& v : validate(m.initial_belief)) out.push_back("initial belief: " + v);
    }
    return out;
}

double pr_obs(const Pomdp& m, const Belief& b, int action, int obs) {
    double total = 0.0;
    for (int s : b.support) {
        for (const auto& [sp, tp] : m.transition[s][action]) {
            for (const auto& [z, op] : m.observation_fn[sp][action]) {
                if (z == obs) {
                    total += b.probs[s] * tp * op;
                    break;
                }
            }
        }
    }
    return total;
}

Belief belief_update(const Pomdp& m, const Belief& b, int action, int obs) {
    std::vector<double> next(m.num_states(), 0.0);
    double normalizer = 0.0;
    for (int s : b.support) {
        for (const auto& [sp, tp] : m.transition[s][action]) {
            for (const auto& [z, op] : m.observation_fn[sp][action]) {
                if (z == obs) {
                    double w = b.probs[s] * tp * op;
                    next[sp] += w;
                    normalizer += w;
                    break;
                }
            }
        }
    }
    if (normalizer <= 1e-12)
        throw Error("ZeroProbabilityObservation",
                    "observation " + std::to_string(obs) + " has probability ~0 under (b,a)");
    for (double& p : next) p /= normalizer;
    return Belief::from_probs(std::move(next));
}

Pomdp env_slice(const MePomdp& m, int env) {
    if (env < 0 || env >= m.num_envs())
        throw Error("IndexOutOfRange", "environment index " + std::to_string(env));
    Pomdp p;
    p.states = m.states;
    p.actions = m.actions;
    p.observations = m.observations;
    p.transition = m.envs[env].transition;
    p.observation_fn = m.envs[env].observation_fn;
    p.reward = m.envs[env].reward;
    p.initial_belief = m.envs[env].initial_belief;
    p.discount = m.discount;
    p.horizon = m.horizon;
    p.available_actions = m.available_actions;
    return p;
}

}  // namespace rpomdp
