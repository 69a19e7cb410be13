#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "rpomdp/benchmarks.hpp"
#include "rpomdp/hsvi.hpp"
#include "rpomdp/log.hpp"
#include "rpomdp/model_io.hpp"

namespace fs = std::filesystem;
using namespace rpomdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTimeLimit = 3;

struct GenArgs {
    bool bird = false;
    bool rocksample = false;
    bool fixture = false;
    int states = 3, actions = 2, experts = 3;
    std::string variant = "me";
    int grid = 2, good = 1, total = 2;
    std::string placement = "nearby";
    std::string formulation = "me";
    std::uint64_t seed = 0;
    double sensor_d0 = -1.0;
    double exit_reward = 10.0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    AnyModel model;
    Json meta = Json::object();
    if (a.bird == a.rocksample)
        throw Error("InvalidArgument", "pass exactly one of --bird / --rocksample");
    if (a.bird) {
        meta["family"] = "bird";
        if (a.fixture) {
            model = bird_fixture();
            meta["fixture"] = true;
        } else {
            BirdParams p;
            p.num_states = a.states;
            p.num_actions = a.actions;
            p.num_experts = a.experts;
            p.seed = a.seed;
            if (a.variant == "me")
                p.variant = BirdVariant::MePomdp;
            else if (a.variant == "po-memdp")
                p.variant = BirdVariant::PoMemdp;
            else if (a.variant == "mo-pomdp")
                p.variant = BirdVariant::MoPomdp;
            else
                throw Error("InvalidArgument", "--variant must be me, po-memdp, or mo-pomdp");
            model = gen_bird(p);
            meta["states"] = p.num_states;
            meta["actions"] = p.num_actions;
            meta["experts"] = p.num_experts;
            meta["seed"] = p.seed;
            meta["variant"] = a.variant;
        }
    } else {
        RockSampleParams p;
        p.grid = a.grid;
        p.good_rocks = a.good;
        p.total_rocks = a.total;
        p.seed = a.seed;
        p.sensor_d0 = a.sensor_d0;
        p.exit_reward = a.exit_reward;
        if (a.placement == "nearby")
            p.placement = RockPlacement::Nearby;
        else if (a.placement == "far")
            p.placement = RockPlacement::FarAway;
        else if (a.placement == "random")
            p.placement = RockPlacement::Random;
        else
            throw Error("InvalidArgument", "--placement must be nearby, far, or random");
        meta["family"] = "rocksample";
        meta["grid"] = p.grid;
        meta["good_rocks"] = p.good_rocks;
        meta["total_rocks"] = p.total_rocks;
        meta["placement"] = a.placement;
        meta["seed"] = p.seed;
        meta["formulation"] = a.formulation;
        if (a.formulation == "me") {
            p.formulation = RockFormulation::MePomdp;
            model = gen_rocksample_me(p);
        } else if (a.formulation == "ab") {
            p.formulation = RockFormulation::AbPomdp;
            model = gen_rocksample_ab(p);
        } else {
            throw Error("InvalidArgument", "--formulation must be me or ab");
        }
    }

    Json j = model_to_json(model);
    j["metadata"] = std::move(meta);
    write_text_file(a.out, dump_canonical(j));

    int envs = 1;
    if (const auto* me = std::get_if<MePomdp>(&model)) envs = me->num_envs();
    int S = j.at("states").size(), A = j.at("actions").size(), Z = j.at("observations").size();
    std::cout << S << " states, " << envs << " envs, " << A << " actions, " << Z << " obs\n";
    return kExitOk;
}

struct SolveArgs {
    std::string model;
    double epsilon = 0.0;
    double time_limit = 3600.0;
    bool exact = false;
    int horizon = 0;
    std::string out_dir = ".";
    std::string trace;
    std::uint64_t seed = 0;
    int max_depth = -1;
    bool unweighted_obs = false;
    bool deterministic_timing = false;
};

MePomdp as_me(const AnyModel& any) {
    if (const auto* me = std::get_if<MePomdp>(&any)) return *me;
    const auto& p = std::get<Pomdp>(any);
    MePomdp me;
    me.states = p.states;
    me.actions = p.actions;
    me.observations = p.observations;
    me.discount = p.discount;
    me.horizon = p.horizon;
    me.available_actions = p.available_actions;
    me.envs.push_back({p.transition, p.observation_fn, p.reward, p.initial_belief});
    return me;
}

/// Per-environment exact values of a mixture at each environment's
/// initial belief.
std::vector<double> per_env_values(const MePomdp& me, const MixedPolicy& policy) {
    std::vector<double> out;
    for (int i = 0; i < me.num_envs(); ++i) {
        const Pomdp env = env_slice(me, i);
        const std::vector<double> v = evaluate_mixed_exact(env, policy);
        double val = 0.0;
        for (int s : env.initial_belief.support) val += env.initial_belief.probs[s] * v[s];
        out.push_back(val);
    }
    return out;
}

int run_solve(const SolveArgs& a) {
    const AnyModel any = parse_model(load_json_file(a.model));
    {
        const auto violations = validate_any(any);
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << "invalid model: " << v << "\n";
            return kExitInput;
        }
    }
    if (std::holds_alternative<Posg>(any))
        throw Error("InvalidArgument", "solving one-sided POSGs is out of scope; transform first");

    fs::create_directories(a.out_dir);
    const std::string result_path = (fs::path(a.out_dir) / "result.json").string();
    const std::string policy_path = (fs::path(a.out_dir) / "policy.json").string();
    const std::string trace_path =
        a.trace.empty() ? (fs::path(a.out_dir) / "trace.csv").string() : a.trace;

    Json result = Json::object();
    Json config = Json::object();
    int exit_code = kExitOk;
    MixedPolicy policy;
    std::vector<std::string> policy_actions, policy_observations;
    std::vector<TraceRow> trace;

    const bool is_ab = std::holds_alternative<AbPomdp>(any);
    if (a.exact) {
        config["mode"] = "exact";
        if (is_ab) {
            AbPomdp ab = std::get<AbPomdp>(any);
            int horizon = a.horizon > 0
                              ? a.horizon
                              : (ab.base.horizon.is_finite() ? ab.base.horizon.steps() : 0);
            if (horizon <= 0)
                throw Error("InvalidArgument",
                            "--exact needs --horizon on infinite-horizon models");
            config["horizon"] = horizon;
            ExactSolution sol = solve_exact(ab, horizon);
            AgentSolution agent = sol.agent;
            policy = agent_policy(sol.stack, agent);
            policy_actions = ab.base.actions;
            policy_observations = ab.base.observations;
            result["solver"] = "exact";
            result["lb"] = sol.value;
            result["ub"] = sol.value;
            result["gap"] = 0.0;
            Json wb = Json::array();
            for (int s : sol.nature.belief.support)
                wb.push_back(Json::array({ab.base.states[s], sol.nature.belief.probs[s]}));
            result["worst_belief"] = std::move(wb);
            result["converged"] = true;
            std::vector<double> corner_values;
            const std::vector<double> v = evaluate_mixed_exact(ab.base, policy);
            for (int q : ab.belief_support) corner_values.push_back(v[q]);
            result["per_env_values"] = corner_values;
        } else {
            MePomdp me = as_me(any);
            if (a.horizon > 0) me.horizon = Horizon::finite(a.horizon);
            if (!me.horizon.is_finite())
                throw Error("InvalidArgument",
                            "--exact needs --horizon on infinite-horizon models");
            config["horizon"] = me.horizon.steps();
            MeExactSolution sol = solve_me_exact(me);
            policy = sol.policy;
            policy_actions = me.actions;
            policy_observations = me.observations;
            result["solver"] = "exact";
            result["lb"] = sol.value;
            result["ub"] = sol.value;
            result["gap"] = 0.0;
            Json wb = Json::array();
            for (int s : sol.nature.belief.support)
                wb.push_back(
                    Json::array({sol.ab.base.states[s], sol.nature.belief.probs[s]}));
            result["worst_belief"] = std::move(wb);
            result["converged"] = true;
            result["per_env_values"] = per_env_values(me, policy);
        }
    } else {
        SolveConfig cfg;
        cfg.epsilon = a.epsilon;
        cfg.time_limit_s = a.time_limit;
        cfg.max_depth = a.max_depth;
        cfg.rng_seed = a.seed;
        cfg.weighted_excess = !a.unweighted_obs;
        config["mode"] = "ab-hsvi";
        config["time_limit_s"] = cfg.time_limit_s;
        config["rng_seed"] = cfg.rng_seed;
        config["weighted_excess"] = cfg.weighted_excess;

        SolveResult sr;
        const AbPomdp* ab_states_for = nullptr;
        AbPomdp ab_local;
        if (is_ab) {
            ab_local = std::get<AbPomdp>(any);
            sr = ab_hsvi(ab_local, cfg);
            policy = extract_solution_policy(ab_local, sr);
            policy_actions = ab_local.base.actions;
            policy_observations = ab_local.base.observations;
            ab_states_for = &ab_local;
            std::vector<double> corner_values;
            const std::vector<double> v = evaluate_mixed_exact(ab_local.base, policy);
            for (int q : ab_local.belief_support) corner_values.push_back(v[q]);
            result["per_env_values"] = corner_values;
        } else {
            MePomdp me = as_me(any);
            MeHsviSolution sol = solve_me_hsvi(me, cfg);
            sr = std::move(sol.result);
            policy = sol.policy;
            policy_actions = me.actions;
            policy_observations = me.observations;
            ab_local = std::move(sol.ab);
            ab_states_for = &ab_local;
            result["per_env_values"] = per_env_values(me, policy);
        }
        config["epsilon"] = sr.epsilon_used;
        result["solver"] = "ab-hsvi";
        result["lb"] = sr.lb_value;
        result["ub"] = sr.ub_value;
        result["gap"] = sr.ub_value - sr.lb_value;
        Json wb = Json::array();
        for (int s : sr.worst_belief.support)
            wb.push_back(
                Json::array({ab_states_for->base.states[s], sr.worst_belief.probs[s]}));
        result["worst_belief"] = std::move(wb);
        result["converged"] = sr.converged;
        result["iterations"] = sr.iterations;
        result["depth_limit_hits"] = sr.depth_limit_hits;
        result["wall_time_s"] = a.deterministic_timing ? static_cast<double>(sr.iterations)
                                                       : sr.wall_time_s;
        trace = sr.trace;
        if (a.deterministic_timing)
            for (auto& row : trace) row.elapsed_s = row.iter;
        if (!sr.converged) exit_code = kExitTimeLimit;
    }

    result["config"] = std::move(config);
    result["policy_file"] = policy_path;
    write_text_file(policy_path,
                    dump_canonical(policy_to_json(policy, policy_actions, policy_observations)));
    write_text_file(trace_path, trace_to_csv(trace));
    write_text_file(result_path, dump_canonical(result));
    std::cout << "lb " << result["lb"].get<double>() << ", ub " << result["ub"].get<double>()
              << ", converged " << (result["converged"].get<bool>() ? "yes" : "no") << "\n";
    return exit_code;
}

struct TransformArgs {
    std::string model;
    std::string to;
    std::string out;
    std::string record;
};

int run_transform(const TransformArgs& a) {
    const AnyModel any = parse_model(load_json_file(a.model));
    {
        const auto violations = validate_any(any);
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << "invalid model: " << v << "\n";
            return kExitInput;
        }
    }
    AnyModel out_model;
    TransformRecord record;
    if (a.to == "posg") {
        if (!std::holds_alternative<AbPomdp>(any))
            throw Error("InvalidArgument", "--to posg expects an ab-pomdp input");
        auto [g, rec] = ab_to_posg(std::get<AbPomdp>(any));
        out_model = std::move(g);
        record = std::move(rec);
    } else if (a.to == "ab") {
        if (!std::holds_alternative<MePomdp>(any) && !std::holds_alternative<Pomdp>(any))
            throw Error("InvalidArgument", "--to ab expects a me-pomdp input");
        auto [ab, rec] = me_to_ab(as_me(any));
        out_model = std::move(ab);
        record = std::move(rec);
    } else if (a.to == "pomemdp") {
        if (!std::holds_alternative<AbPomdp>(any))
            throw Error("InvalidArgument", "--to pomemdp expects an ab-pomdp input");
        auto [me, rec] = ab_to_pomemdp(std::get<AbPomdp>(any));
        out_model = std::move(me);
        record = std::move(rec);
    } else if (a.to == "mo") {
        if (!std::holds_alternative<MePomdp>(any))
            throw Error("InvalidArgument", "--to mo expects a me-pomdp input");
        auto [mo, rec] = pomemdp_to_mo(std::get<MePomdp>(any));
        out_model = std::move(mo);
        record = std::move(rec);
    } else {
        throw Error("InvalidArgument", "--to must be posg, ab, pomemdp, or mo");
    }
    write_text_file(a.out, dump_canonical(model_to_json(out_model)));
    const std::string record_path = a.record.empty() ? a.out + ".record.json" : a.record;
    write_text_file(record_path, dump_canonical(record_to_json(record)));
    std::cout << "wrote " << a.out << " and " << record_path << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string model;
    std::string policy;
    std::vector<std::string> cross;
    int episodes = 0;
    int horizon_cap = 50;
    std::uint64_t seed = 0;
    std::string out;
};

int run_eval(const EvalArgs& a) {
    const AnyModel any = parse_model(load_json_file(a.model));
    if (std::holds_alternative<Posg>(any) || std::holds_alternative<AbPomdp>(any))
        throw Error("InvalidArgument", "eval expects a pomdp or me-pomdp model");
    const MePomdp me = as_me(any);
    const MixedPolicy policy = parse_policy(load_json_file(a.policy), me.actions, me.observations);

    Json report = Json::object();
    std::vector<double> exact = per_env_values(me, policy);
    report["per_env_exact"] = exact;
    report["worst_case_exact"] = *std::min_element(exact.begin(), exact.end());

    if (a.episodes > 0) {
        Json mc = Json::array();
        for (int i = 0; i < me.num_envs(); ++i) {
            const Pomdp env = env_slice(me, i);
            int cap = env.horizon.is_finite() ? env.horizon.steps() : a.horizon_cap;
            SimulationEstimate est = simulate(env, policy, a.episodes, cap, a.seed);
            Json row = Json::object();
            row["mean"] = est.mean;
            row["standard_error"] = est.standard_error;
            mc.push_back(std::move(row));
        }
        report["per_env_monte_carlo"] = std::move(mc);
        report["episodes"] = a.episodes;
    }

    if (!a.cross.empty()) {
        // cross[i][j]: policy assuming environment i evaluated in
        // environment j
        if (static_cast<int>(a.cross.size()) != me.num_envs())
            throw Error("InvalidArgument", "--cross needs one policy per environment");
        Json matrix = Json::array();
        for (const auto& path : a.cross) {
            const MixedPolicy assumed =
                parse_policy(load_json_file(path), me.actions, me.observations);
            matrix.push_back(per_env_values(me, assumed));
        }
        report["cross_matrix"] = std::move(matrix);
    }

    const std::string text = dump_canonical(report);
    if (a.out.empty())
        std::cout << text;
    else
        write_text_file(a.out, text);
    return kExitOk;
}

int run_info(const std::string& path) {
    const AnyModel any = parse_model(load_json_file(path));
    std::string line = model_type_name(any);
    if (const auto* me = std::get_if<MePomdp>(&any)) {
        line += ", " + std::to_string(me->num_states()) + " states";
        line += ", " + std::to_string(me->num_envs()) + " envs";
        line += ", " + std::to_string(me->num_actions()) + " actions";
        line += ", " + std::to_string(me->num_observations()) + " obs";
        line += std::string(", PO-MEMDP: ") + (me->is_po_memdp() ? "yes" : "no");
        line += std::string(", MO-POMDP: ") + (me->is_mo_pomdp() ? "yes" : "no");
    } else if (const auto* ab = std::get_if<AbPomdp>(&any)) {
        line += ", " + std::to_string(ab->base.num_states()) + " states";
        line += ", " + std::to_string(ab->base.num_actions()) + " actions";
        line += ", " + std::to_string(ab->base.num_observations()) + " obs";
        line += ", belief support " + std::to_string(ab->belief_support.size());
    } else if (const auto* p = std::get_if<Pomdp>(&any)) {
        line += ", " + std::to_string(p->num_states()) + " states";
        line += ", " + std::to_string(p->num_actions()) + " actions";
        line += ", " + std::to_string(p->num_observations()) + " obs";
    } else {
        const auto& g = std::get<Posg>(any);
        line += ", " + std::to_string(g.num_states()) + " states";
        line += ", " + std::to_string(g.num_agent_actions()) + " agent actions";
        line += ", " + std::to_string(g.num_nature_actions()) + " nature actions";
        line += ", " + std::to_string(g.num_observations()) + " obs";
    }
    std::cout << line << "\n";
    const auto violations = validate_any(any);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cout << "violation: " << v << "\n";
        return kExitInput;
    }
    std::cout << "valid\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-min robust planning for multi-environment POMDPs"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "Generate a benchmark model file");
    cmd_gen->add_flag("--bird", gen.bird, "Bird preservation family");
    cmd_gen->add_flag("--rocksample", gen.rocksample, "RockSample family");
    cmd_gen->add_flag("--fixture", gen.fixture, "The fixed three-expert bird model");
    cmd_gen->add_option("-S,--states", gen.states, "Bird: number of states");
    cmd_gen->add_option("-A,--actions", gen.actions, "Bird: number of actions");
    cmd_gen->add_option("-n,--experts", gen.experts, "Bird: number of experts");
    cmd_gen->add_option("--variant", gen.variant, "Bird: me | po-memdp | mo-pomdp");
    cmd_gen->add_option("-m,--grid", gen.grid, "RockSample: grid size");
    cmd_gen->add_option("-g,--good", gen.good, "RockSample: good rocks");
    cmd_gen->add_option("-t,--total", gen.total, "RockSample: total rocks");
    cmd_gen->add_option("--placement", gen.placement, "RockSample: nearby | far | random");
    cmd_gen->add_option("--formulation", gen.formulation, "RockSample: me | ab");
    cmd_gen->add_option("--seed", gen.seed, "Generator seed");
    cmd_gen->add_option("--sensor-d0", gen.sensor_d0, "RockSample sensor half-efficiency distance");
    cmd_gen->add_option("--exit-reward", gen.exit_reward, "RockSample exit bonus");
    cmd_gen->add_option("--out", gen.out, "Output model file")->required();

    SolveArgs solve;
    auto* cmd_solve = app.add_subcommand("solve", "Solve a model");
    cmd_solve->add_option("--model", solve.model, "Model file")->required();
    cmd_solve->add_option("--epsilon", solve.epsilon, "Gap threshold (default 0.1 min nonzero |R|)");
    cmd_solve->add_option("--time-limit", solve.time_limit, "Time limit in seconds");
    cmd_solve->add_flag("--exact", solve.exact, "Exact finite-horizon pipeline");
    cmd_solve->add_option("--horizon", solve.horizon, "Horizon for --exact");
    cmd_solve->add_option("--out-dir", solve.out_dir, "Output directory");
    cmd_solve->add_option("--trace", solve.trace, "Trace CSV path");
    cmd_solve->add_option("--seed", solve.seed, "Simulation seed echoed into the config");
    cmd_solve->add_option("--max-depth", solve.max_depth, "Exploration depth safeguard");
    cmd_solve->add_flag("--unweighted-obs", solve.unweighted_obs,
                        "Select observations by plain largest gap");
    cmd_solve->add_flag("--deterministic-timing", solve.deterministic_timing,
                        "Report logical instead of wall-clock times");

    TransformArgs transform;
    auto* cmd_transform = app.add_subcommand("transform", "Apply a model transformation");
    cmd_transform->add_option("--model", transform.model, "Model file")->required();
    cmd_transform->add_option("--to", transform.to, "posg | ab | pomemdp | mo")->required();
    cmd_transform->add_option("--out", transform.out, "Output model file")->required();
    cmd_transform->add_option("--record", transform.record, "Transform record path");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a policy on a model");
    cmd_eval->add_option("--model", eval.model, "Model file")->required();
    cmd_eval->add_option("--policy", eval.policy, "Policy file")->required();
    cmd_eval->add_option("--cross", eval.cross, "Per-environment policies for the cross matrix");
    cmd_eval->add_option("--episodes", eval.episodes, "Monte-Carlo episodes (0 = exact only)");
    cmd_eval->add_option("--horizon-cap", eval.horizon_cap, "Simulation truncation depth");
    cmd_eval->add_option("--seed", eval.seed, "Simulation seed");
    cmd_eval->add_option("--out", eval.out, "Report path (default stdout)");

    std::string info_model;
    auto* cmd_info = app.add_subcommand("info", "Print a model summary");
    cmd_info->add_option("--model", info_model, "Model file")->required();

    try {
        app.parse(argc, argv);
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_solve->parsed()) return run_solve(solve);
        if (cmd_transform->parsed()) return run_transform(transform);
        if (cmd_eval->parsed()) return run_eval(eval);
        if (cmd_info->parsed()) return run_info(info_model);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
