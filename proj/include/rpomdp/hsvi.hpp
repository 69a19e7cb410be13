#pragma once

#include <cstdint>
#include <vector>

#include "rpomdp/bounds.hpp"
#include "rpomdp/game_lp.hpp"
#include "rpomdp/model.hpp"
#include "rpomdp/policy.hpp"
#include "rpomdp/transforms.hpp"

namespace rpomdp {

struct SolveConfig {
    /// Gap threshold; <= 0 derives 0.1 * min nonzero |reward| from the
    /// model being solved.
    double epsilon = 0.0;
    double time_limit_s = 3600.0;
    /// Depth safeguard; < 0 derives the depth past which the epsilon *
    /// gamma^-t termination test is unreachable.
    int max_depth = -1;
    std::uint64_t rng_seed = 0;
    /// HSVI weighted-excess observation rule; false selects the plain
    /// largest-gap rule.
    bool weighted_excess = true;
};

struct TraceRow {
    int iter = 0;
    double elapsed_s = 0.0;
    double lb = 0.0;
    double ub = 0.0;
    double gap = 0.0;
};

struct SolveResult {
    LowerBound lower;
    UpperBound upper;
    Belief worst_belief;
    double lb_value = 0.0;
    double ub_value = 0.0;
    bool converged = false;
    int iterations = 0;
    double wall_time_s = 0.0;
    std::vector<TraceRow> trace;
    int depth_limit_hits = 0;
    double epsilon_used = 0.0;
};

/// sawtooth upper value minus lower envelope value at b.
double gap_value(const UpperBound& ub, const LowerBound& lb, const Belief& b);

/// One HSVI depth-first search from b. Bound updates happen on the
/// unwind; the time budget is checked at every recursion entry.
struct ExploreStats {
    int depth_limit_hits = 0;
    bool timed_out = false;
};
ExploreStats explore(const Pomdp& m, UpperBound& ub, LowerBound& lb, const Belief& b,
                     const SolveConfig& cfg, double deadline_s, double elapsed_offset_s);

/// Algorithm: FIB/blind initialization, then depth-first searches
/// restarted from the nature LP's worst-case belief until the gap there
/// drops below epsilon or the time budget runs out.
SolveResult ab_hsvi(const AbPomdp& m, const SolveConfig& cfg);

struct ExactSolution {
    double value = 0.0;
    NatureSolution nature;
    AgentSolution agent;
    GammaStack stack;
};

/// Exact finite-horizon solve: pruned cross-sum sets, then the two game
/// LPs over the top level restricted to the belief support.
ExactSolution solve_exact(const AbPomdp& m, int horizon, const ExactGammaOptions& opts = {});

struct MeExactSolution {
    double value = 0.0;
    NatureSolution nature;  // over the transformed bottom corners
    AgentSolution agent;
    GammaStack stack;
    AbPomdp ab;
    TransformRecord record;
    MixedPolicy policy_transformed;
    MixedPolicy policy;  // lifted to the original history space
};

/// me_to_ab then the exact pipeline at horizon H+1; the transform
/// already embeds the 1/gamma correction, so the reported value is the
/// ME-POMDP robust value.
MeExactSolution solve_me_exact(const MePomdp& m, const ExactGammaOptions& opts = {});

struct MeHsviSolution {
    SolveResult result;
    AbPomdp ab;
    TransformRecord record;
    MixedPolicy policy_transformed;
    MixedPolicy policy;
};

MeHsviSolution solve_me_hsvi(const MePomdp& m, const SolveConfig& cfg);

/// Mixture extracted from a finished solve: agent LP over the active
/// lower-bound vectors restricted to the belief support.
MixedPolicy extract_solution_policy(const AbPomdp& m, const SolveResult& result,
                                    AgentSolution* agent_out = nullptr);

}  // namespace rpomdp
