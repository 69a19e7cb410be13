#include "rpomdp/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rpomdp {

namespace {

double parse_prob(const Json& j) {
    if (j.is_string()) return std::stod(j.get<std::string>());
    return j.get<double>();
}

Json horizon_to_json(const Horizon& h) {
    if (h.is_infinite()) return Json("inf");
    return Json(h.steps());
}

Horizon parse_horizon(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Horizon::infinite();
        throw Error("ParseError", "horizon must be an integer or \"inf\"");
    }
    return Horizon::finite(j.get<int>());
}

Json sparse_to_json(const SparseRow& row) {
    Json out = Json::array();
    for (const auto& [i, p] : row) out.push_back(Json::array({i, p}));
    return out;
}

SparseRow parse_sparse(const Json& j) {
    SparseRow row;
    for (const auto& entry : j) row.emplace_back(entry.at(0).get<int>(), parse_prob(entry.at(1)));
    return row;
}

Json belief_to_json(const Belief& b) {
    Json out = Json::array();
    for (int s : b.support) out.push_back(Json::array({s, b.probs[s]}));
    return out;
}

Belief parse_belief(const Json& j, int num_states) {
    std::vector<double> probs(num_states, 0.0);
    for (const auto& entry : j) {
        int s = entry.at(0).get<int>();
        if (s < 0 || s >= num_states) throw Error("ParseError", "belief index out of range");
        probs[s] = parse_prob(entry.at(1));
    }
    return Belief::from_probs(std::move(probs));
}

Json tables_to_json(const std::vector<std::vector<SparseRow>>& transition,
                    const std::vector<std::vector<SparseRow>>& observation_fn,
                    const std::vector<double>& reward, const Belief& initial, int A) {
    Json env = Json::object();
    Json t = Json::array(), o = Json::array(), r = Json::array();
    for (const auto& per_state : transition) {
        Json row = Json::array();
        for (const auto& dist : per_state) row.push_back(sparse_to_json(dist));
        t.push_back(std::move(row));
    }
    for (const auto& per_state : observation_fn) {
        Json row = Json::array();
        for (const auto& dist : per_state) row.push_back(sparse_to_json(dist));
        o.push_back(std::move(row));
    }
    for (std::size_t s = 0; s * A < reward.size(); ++s) {
        Json row = Json::array();
        for (int a = 0; a < A; ++a) row.push_back(reward[s * A + a]);
        r.push_back(std::move(row));
    }
    env["transition"] = std::move(t);
    env["observation"] = std::move(o);
    env["reward"] = std::move(r);
    env["initial_belief"] = belief_to_json(initial);
    return env;
}

void parse_tables(const Json& env, int S, int A, std::vector<std::vector<SparseRow>>& transition,
                  std::vector<std::vector<SparseRow>>& observation_fn,
                  std::vector<double>& reward, Belief& initial) {
    const Json& t = env.at("transition");
    const Json& o = env.at("observation");
    const Json& r = env.at("reward");
    if (static_cast<int>(t.size()) != S || static_cast<int>(o.size()) != S ||
        static_cast<int>(r.size()) != S)
        throw Error("ParseError", "table state dimension mismatch");
    transition.assign(S, std::vector<SparseRow>(A));
    observation_fn.assign(S, std::vector<SparseRow>(A));
    reward.assign(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        if (static_cast<int>(t[s].size()) != A || static_cast<int>(o[s].size()) != A ||
            static_cast<int>(r[s].size()) != A)
            throw Error("ParseError", "table action dimension mismatch");
        for (int a = 0; a < A; ++a) {
            transition[s][a] = parse_sparse(t[s][a]);
            observation_fn[s][a] = parse_sparse(o[s][a]);
            reward[s * A + a] = parse_prob(r[s][a]);
        }
    }
    initial = parse_belief(env.at("initial_belief"), S);
}

Json available_to_json(const std::vector<std::vector<int>>& avail,
                       const std::vector<std::string>& states,
                       const std::vector<std::string>& actions) {
    Json out = Json::object();
    for (std::size_t s = 0; s < avail.size(); ++s) {
        Json list = Json::array();
        for (int a : avail[s]) list.push_back(actions[a]);
        out[states[s]] = std::move(list);
    }
    return out;
}

std::vector<std::vector<int>> parse_available(const Json& j,
                                              const std::vector<std::string>& states,
                                              const std::vector<std::string>& actions) {
    std::vector<std::vector<int>> avail(states.size());
    std::vector<int> all(actions.size());
    for (std::size_t a = 0; a < actions.size(); ++a) all[a] = static_cast<int>(a);
    for (std::size_t s = 0; s < states.size(); ++s) avail[s] = all;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto state_it = std::find(states.begin(), states.end(), it.key());
        if (state_it == states.end())
            throw Error("ParseError", "available_actions names unknown state " + it.key());
        std::vector<int> set;
        for (const auto& name : it.value()) {
            auto action_it = std::find(actions.begin(), actions.end(), name.get<std::string>());
            if (action_it == actions.end())
                throw Error("ParseError", "available_actions names unknown action");
            set.push_back(static_cast<int>(action_it - actions.begin()));
        }
        avail[state_it - states.begin()] = std::move(set);
    }
    return avail;
}

std::vector<std::string> parse_labels(const Json& j) {
    std::vector<std::string> out;
    for (const auto& item : j) out.push_back(item.get<std::string>());
    return out;
}

Json labels_to_json(const std::vector<std::string>& labels) {
    Json out = Json::array();
    for (const auto& label : labels) out.push_back(label);
    return out;
}

}  // namespace

Json model_to_json(const Pomdp& m) {
    Json j = Json::object();
    j["type"] = "pomdp";
    j["states"] = labels_to_json(m.states);
    j["actions"] = labels_to_json(m.actions);
    j["observations"] = labels_to_json(m.observations);
    j["discount"] = m.discount;
    j["horizon"] = horizon_to_json(m.horizon);
    Json envs = Json::array();
    envs.push_back(tables_to_json(m.transition, m.observation_fn, m.reward, m.initial_belief,
                                  m.num_actions()));
    j["environments"] = std::move(envs);
    if (m.available_actions)
        j["available_actions"] = available_to_json(*m.available_actions, m.states, m.actions);
    j["metadata"] = Json::object();
    return j;
}

Json model_to_json(const MePomdp& m) {
    Json j = Json::object();
    j["type"] = "me-pomdp";
    j["states"] = labels_to_json(m.states);
    j["actions"] = labels_to_json(m.actions);
    j["observations"] = labels_to_json(m.observations);
    j["discount"] = m.discount;
    j["horizon"] = horizon_to_json(m.horizon);
    Json envs = Json::array();
    for (const auto& env : m.envs)
        envs.push_back(tables_to_json(env.transition, env.observation_fn, env.reward,
                                      env.initial_belief, m.num_actions()));
    j["environments"] = std::move(envs);
    if (m.available_actions)
        j["available_actions"] = available_to_json(*m.available_actions, m.states, m.actions);
    j["metadata"] = Json::object();
    return j;
}

Json model_to_json(const AbPomdp& m) {
    Json j = model_to_json(m.base);
    j["type"] = "ab-pomdp";
    Json support = Json::array();
    for (int q : m.belief_support) support.push_back(m.base.states[q]);
    j["belief_support"] = std::move(support);
    return j;
}

Json model_to_json(const Posg& m) {
    Json j = Json::object();
    j["type"] = "posg";
    j["states"] = labels_to_json(m.states);
    j["actions"] = labels_to_json(m.agent_actions);
    j["nature_actions"] = labels_to_json(m.nature_actions);
    j["observations"] = labels_to_json(m.observations);
    j["discount"] = m.discount;
    j["horizon"] = horizon_to_json(m.horizon);
    Json t = Json::array(), o = Json::array(), r = Json::array();
    for (int s = 0; s < m.num_states(); ++s) {
        Json ts = Json::array(), os = Json::array(), rs = Json::array();
        for (int a1 = 0; a1 < m.num_agent_actions(); ++a1) {
            Json ta = Json::array(), oa = Json::array(), ra = Json::array();
            for (int a2 = 0; a2 < m.num_nature_actions(); ++a2) {
                ta.push_back(sparse_to_json(m.transition[s][a1][a2]));
                oa.push_back(sparse_to_json(m.observation_fn[s][a1][a2]));
                ra.push_back(m.reward_at(s, a1, a2));
            }
            ts.push_back(std::move(ta));
            os.push_back(std::move(oa));
            rs.push_back(std::move(ra));
        }
        t.push_back(std::move(ts));
        o.push_back(std::move(os));
        r.push_back(std::move(rs));
    }
    j["transition"] = std::move(t);
    j["observation"] = std::move(o);
    j["reward"] = std::move(r);
    j["initial_belief"] = belief_to_json(m.initial_belief);
    if (m.agent_available_actions)
        j["available_actions"] =
            available_to_json(*m.agent_available_actions, m.states, m.agent_actions);
    j["metadata"] = Json::object();
    return j;
}

Json model_to_json(const AnyModel& m) {
    return std::visit([](const auto& model) { return model_to_json(model); }, m);
}

AnyModel parse_model(const Json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "posg") {
            Posg m;
            m.states = parse_labels(j.at("states"));
            m.agent_actions = parse_labels(j.at("actions"));
            m.nature_actions = parse_labels(j.at("nature_actions"));
            m.observations = parse_labels(j.at("observations"));
            m.discount = parse_prob(j.at("discount"));
            m.horizon = parse_horizon(j.at("horizon"));
            const int S = m.num_states(), A1 = m.num_agent_actions(),
                      A2 = m.num_nature_actions();
            const Json& t = j.at("transition");
            const Json& o = j.at("observation");
            const Json& r = j.at("reward");
            m.transition.assign(
                S, std::vector<std::vector<SparseRow>>(A1, std::vector<SparseRow>(A2)));
            m.observation_fn = m.transition;
            m.reward.assign(static_cast<std::size_t>(S) * A1 * A2, 0.0);
            for (int s = 0; s < S; ++s) {
                for (int a1 = 0; a1 < A1; ++a1) {
                    for (int a2 = 0; a2 < A2; ++a2) {
                        m.transition[s][a1][a2] = parse_sparse(t.at(s).at(a1).at(a2));
                        m.observation_fn[s][a1][a2] = parse_sparse(o.at(s).at(a1).at(a2));
                        m.reward_at(s, a1, a2) = parse_prob(r.at(s).at(a1).at(a2));
                    }
                }
            }
            m.initial_belief = parse_belief(j.at("initial_belief"), S);
            if (j.contains("available_actions"))
                m.agent_available_actions =
                    parse_available(j.at("available_actions"), m.states, m.agent_actions);
            return m;
        }

        std::vector<std::string> states = parse_labels(j.at("states"));
        std::vector<std::string> actions = parse_labels(j.at("actions"));
        std::vector<std::string> observations = parse_labels(j.at("observations"));
        const int S = static_cast<int>(states.size());
        const int A = static_cast<int>(actions.size());
        const Json& envs = j.at("environments");
        if (envs.empty()) throw Error("ParseError", "environments array is empty");

        if (type == "me-pomdp") {
            MePomdp m;
            m.states = std::move(states);
            m.actions = std::move(actions);
            m.observations = std::move(observations);
            m.discount = parse_prob(j.at("discount"));
            m.horizon = parse_horizon(j.at("horizon"));
            for (const auto& env_json : envs) {
                MeEnvironment env;
                parse_tables(env_json, S, A, env.transition, env.observation_fn, env.reward,
                             env.initial_belief);
                m.envs.push_back(std::move(env));
            }
            if (j.contains("available_actions"))
                m.available_actions =
                    parse_available(j.at("available_actions"), m.states, m.actions);
            return m;
        }

        if (type == "pomdp" || type == "ab-pomdp") {
            Pomdp m;
            m.states = std::move(states);
            m.actions = std::move(actions);
            m.observations = std::move(observations);
            m.discount = parse_prob(j.at("discount"));
            m.horizon = parse_horizon(j.at("horizon"));
            if (envs.size() != 1)
                throw Error("ParseError", "pomdp documents carry exactly one environment");
            parse_tables(envs[0], S, A, m.transition, m.observation_fn, m.reward,
                         m.initial_belief);
            if (j.contains("available_actions"))
                m.available_actions =
                    parse_available(j.at("available_actions"), m.states, m.actions);
            if (type == "pomdp") return m;

            AbPomdp ab;
            ab.base = std::move(m);
            for (const auto& name : j.at("belief_support")) {
                auto it = std::find(ab.base.states.begin(), ab.base.states.end(),
                                    name.get<std::string>());
                if (it == ab.base.states.end())
                    throw Error("ParseError", "belief_support names unknown state");
                ab.belief_support.push_back(static_cast<int>(it - ab.base.states.begin()));
            }
            std::sort(ab.belief_support.begin(), ab.belief_support.end());
            return ab;
        }
        throw Error("ParseError", "unknown model type " + type);
    } catch (const Json::exception& e) {
        throw Error("ParseError", e.what());
    }
}

std::vector<std::string> validate_any(const AnyModel& m) {
    return std::visit([](const auto& model) { return validate(model); }, m);
}

std::string model_type_name(const AnyModel& m) {
    if (std::holds_alternative<Pomdp>(m)) return "pomdp";
    if (std::holds_alternative<MePomdp>(m)) return "me-pomdp";
    if (std::holds_alternative<AbPomdp>(m)) return "ab-pomdp";
    return "posg";
}

Json policy_to_json(const PolicyGraph& g, const std::vector<std::string>& actions,
                    const std::vector<std::string>& observations) {
    Json j = Json::object();
    Json nodes = Json::array();
    for (const auto& node : g.nodes) {
        Json n = Json::object();
        n["action"] = actions[node.action];
        Json next = Json::object();
        for (std::size_t z = 0; z < node.next.size(); ++z)
            next[observations[z]] = node.next[z];
        n["next"] = std::move(next);
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    j["root"] = g.root;
    return j;
}

Json policy_to_json(const MixedPolicy& mp, const std::vector<std::string>& actions,
                    const std::vector<std::string>& observations) {
    Json j = Json::object();
    Json comps = Json::array();
    for (const auto& g : mp.components) comps.push_back(policy_to_json(g, actions, observations));
    j["components"] = std::move(comps);
    j["weights"] = mp.weights;
    return j;
}

namespace {

PolicyGraph parse_policy_graph(const Json& j, const std::vector<std::string>& actions,
                               const std::vector<std::string>& observations) {
    PolicyGraph g;
    for (const auto& node_json : j.at("nodes")) {
        PolicyGraph::Node node;
        auto it = std::find(actions.begin(), actions.end(),
                            node_json.at("action").get<std::string>());
        if (it == actions.end()) throw Error("ParseError", "policy names unknown action");
        node.action = static_cast<int>(it - actions.begin());
        node.next.assign(observations.size(), 0);
        const Json& next = node_json.at("next");
        for (std::size_t z = 0; z < observations.size(); ++z) {
            if (!next.contains(observations[z]))
                throw Error("ParseError", "policy node misses observation " + observations[z]);
            node.next[z] = next.at(observations[z]).get<int>();
        }
        g.nodes.push_back(std::move(node));
    }
    g.root = j.at("root").get<int>();
    for (const auto& node : g.nodes)
        for (int succ : node.next)
            if (succ < 0 || succ >= static_cast<int>(g.nodes.size()))
                throw Error("ParseError", "policy successor out of range");
    if (g.root < 0 || g.root >= static_cast<int>(g.nodes.size()))
        throw Error("ParseError", "policy root out of range");
    return g;
}

}  // namespace

MixedPolicy parse_policy(const Json& j, const std::vector<std::string>& actions,
                         const std::vector<std::string>& observations) {
    try {
        MixedPolicy mp;
        if (j.contains("components")) {
            for (const auto& comp : j.at("components"))
                mp.components.push_back(parse_policy_graph(comp, actions, observations));
            mp.weights = j.at("weights").get<std::vector<double>>();
            if (mp.weights.size() != mp.components.size())
                throw Error("ParseError", "weights and components disagree in length");
        } else {
            mp.components.push_back(parse_policy_graph(j, actions, observations));
            mp.weights.push_back(1.0);
        }
        return mp;
    } catch (const Json::exception& e) {
        throw Error("ParseError", e.what());
    }
}

Json record_to_json(const TransformRecord& record) {
    Json j = Json::object();
    j["kind"] = to_string(record.kind);
    Json map = Json::array();
    for (const auto& origin : record.state_map) {
        Json o = Json::object();
        o["state"] = origin.state;
        o["env"] = origin.env;
        o["stage"] = origin.stage;
        if (!origin.product.empty()) o["product"] = origin.product;
        map.push_back(std::move(o));
    }
    j["state_map"] = std::move(map);
    if (record.sentinel) {
        Json s = Json::object();
        s["bottom_states"] = record.sentinel->bottom_states;
        s["top_observation"] = record.sentinel->top_observation;
        s["diamond_action"] = record.sentinel->diamond_action;
        s["reward_scale"] = record.sentinel->reward_scale;
        s["horizon_shift"] = record.sentinel->horizon_shift;
        j["sentinel"] = std::move(s);
    }
    return j;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iter,elapsed_s,lb,ub,gap\n";
    char buf[160];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g\n", row.iter, row.elapsed_s,
                      row.lb, row.ub, row.gap);
        out += buf;
    }
    return out;
}

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error("ParseError", std::string(e.what()));
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write " + path);
    out << text;
}

}  // namespace rpomdp
