#pragma once

#include <vector>

#include "rpomdp/bounds.hpp"
#include "rpomdp/model.hpp"

namespace rpomdp {

/// LP over nonnegative variables, the shape generated by the two game
/// LPs. Relations are '<' (<=), '>' (>=), '='.
struct LinearProgram {
    struct Constraint {
        std::vector<double> coeffs;
        char relation = '<';
        double rhs = 0.0;
    };
    bool maximize = false;
    std::vector<double> objective;
    std::vector<Constraint> constraints;
};

struct LpSolution {
    std::vector<double> primal;
    std::vector<double> dual;  // one multiplier per constraint
    double objective = 0.0;
};

/// Dense two-phase simplex with Bland's rule. Throws Infeasible /
/// Unbounded; both indicate construction bugs for well-formed game LPs.
LpSolution lp_solve(const LinearProgram& lp);

/// Worst-case belief over Q against the upper envelope of gamma_set:
/// value = min_{b in Delta(Q)} max_alpha alpha . b.
struct NatureSolution {
    Belief belief;  // full-length, support within Q
    double value = 0.0;
};

/// Optimal mixture over gamma_set guaranteeing the game value from
/// every corner of Q. Weights are indexed like gamma_set; vectors
/// dropped by the Q-restricted pruning carry weight zero.
struct AgentSolution {
    std::vector<double> weights;
    double value = 0.0;
};

NatureSolution nature_lp(const std::vector<AlphaVector>& gamma_set, const std::vector<int>& q,
                         int num_states);
AgentSolution agent_lp(const std::vector<AlphaVector>& gamma_set, const std::vector<int>& q);

/// Indices of vectors kept by pointwise-domination pruning restricted
/// to the coordinates in q (ties keep the earlier vector).
std::vector<int> prune_on_support(const std::vector<AlphaVector>& vectors,
                                  const std::vector<int>& q);

}  // namespace rpomdp
