#include "rpomdp/game_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpomdp {

namespace {

constexpr double kPivotTol = 1e-9;

/// Dense tableau simplex over the standard form min c.x, Ax = b, x >= 0
/// with b >= 0. Columns: structural variables, then slacks/surplus,
/// then artificials, then an identity block tracking B^{-1} for dual
/// recovery. Bland's rule throughout.
class SimplexKernel {
public:
    SimplexKernel(const LinearProgram& lp) : lp_(lp) {
        const int n = static_cast<int>(lp.objective.size());
        const int m = static_cast<int>(lp.constraints.size());
        num_vars_ = n;
        num_rows_ = m;

        // slack/surplus columns for every inequality, artificials for
        // '>' and '=' rows (after sign normalization to rhs >= 0)
        int slack_count = 0;
        for (const auto& c : lp.constraints)
            if (c.relation != '=') ++slack_count;
        slack_base_ = n;
        art_base_ = n + slack_count;
        total_cols_ = art_base_ + m;           // one artificial slot per row (some unused)
        ident_base_ = total_cols_;
        width_ = total_cols_ + m + 1;          // + B^{-1} block + rhs

        tab_.assign(m, std::vector<double>(width_, 0.0));
        basis_.assign(m, -1);
        row_sign_.assign(m, 1.0);
        is_artificial_.assign(total_cols_, false);

        int slack = slack_base_;
        for (int i = 0; i < m; ++i) {
            const auto& c = lp.constraints[i];
            double sign = c.rhs < 0.0 ? -1.0 : 1.0;
            row_sign_[i] = sign;
            char rel = c.relation;
            if (sign < 0.0) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
            for (int j = 0; j < n; ++j) tab_[i][j] = sign * c.coeffs[j];
            tab_[i][width_ - 1] = sign * c.rhs;
            if (c.relation != '=') {
                tab_[i][slack] = (rel == '<') ? 1.0 : -1.0;
                if (rel == '<') basis_[i] = slack;
                ++slack;
            }
            if (basis_[i] < 0) {
                int art = art_base_ + i;
                tab_[i][art] = 1.0;
                is_artificial_[art] = true;
                basis_[i] = art;
            }
            tab_[i][ident_base_ + i] = 1.0;
        }
    }

    LpSolution solve() {
        // Phase 1: minimize the artificial sum when any artificial is basic.
        bool need_phase1 = false;
        for (int i = 0; i < num_rows_; ++i)
            if (is_artificial_[basis_[i]]) need_phase1 = true;
        if (need_phase1) {
            std::vector<double> phase1(total_cols_, 0.0);
            for (int j = art_base_; j < total_cols_; ++j)
                if (is_artificial_[j]) phase1[j] = 1.0;
            run(phase1, /*phase1=*/true);
            double infeas = objective_value(phase1);
            if (infeas > 1e-7) throw Error("Infeasible", "phase 1 optimum is positive");
            evict_artificials();
        }

        std::vector<double> cost(total_cols_, 0.0);
        for (int j = 0; j < num_vars_; ++j)
            cost[j] = lp_.maximize ? -lp_.objective[j] : lp_.objective[j];
        run(cost, /*phase1=*/false);

        LpSolution sol;
        sol.primal.assign(num_vars_, 0.0);
        for (int i = 0; i < num_rows_; ++i)
            if (basis_[i] < num_vars_) sol.primal[basis_[i]] = tab_[i][width_ - 1];
        sol.dual.assign(num_rows_, 0.0);
        for (int r = 0; r < num_rows_; ++r) {
            double y = 0.0;
            for (int i = 0; i < num_rows_; ++i) y += cost[basis_[i]] * tab_[i][ident_base_ + r];
            y *= row_sign_[r];
            sol.dual[r] = lp_.maximize ? -y : y;
        }
        double obj = 0.0;
        for (int j = 0; j < num_vars_; ++j) obj += lp_.objective[j] * sol.primal[j];
        sol.objective = obj;
        return sol;
    }

private:
    double objective_value(const std::vector<double>& cost) const {
        double v = 0.0;
        for (int i = 0; i < num_rows_; ++i) v += cost[basis_[i]] * tab_[i][width_ - 1];
        return v;
    }

    double reduced_cost(const std::vector<double>& cost, int j) const {
        double rc = cost[j];
        for (int i = 0; i < num_rows_; ++i) rc -= cost[basis_[i]] * tab_[i][j];
        return rc;
    }

    void pivot(int row, int col) {
        double p = tab_[row][col];
        for (double& v : tab_[row]) v /= p;
        for (int i = 0; i < num_rows_; ++i) {
            if (i == row) continue;
            double f = tab_[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j < width_; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    void run(const std::vector<double>& cost, bool phase1) {
        const long max_iters = 2000L + 200L * (num_rows_ + total_cols_);
        for (long iter = 0; iter < max_iters; ++iter) {
            // Bland: entering column = smallest index with negative
            // reduced cost. Artificials never re-enter after phase 1.
            int enter = -1;
            for (int j = 0; j < total_cols_; ++j) {
                if (!phase1 && is_artificial_[j]) continue;
                if (reduced_cost(cost, j) < -kPivotTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return;  // optimal

            // Degenerate rows holding a basic artificial leave first so
            // artificials can never grow back above zero.
            int leave = -1;
            if (!phase1) {
                for (int i = 0; i < num_rows_; ++i) {
                    if (is_artificial_[basis_[i]] && tab_[i][width_ - 1] <= kPivotTol &&
                        std::abs(tab_[i][enter]) > kPivotTol) {
                        leave = i;
                        break;
                    }
                }
            }
            if (leave < 0) {
                double best_ratio = std::numeric_limits<double>::infinity();
                for (int i = 0; i < num_rows_; ++i) {
                    if (tab_[i][enter] <= kPivotTol) continue;
                    double ratio = tab_[i][width_ - 1] / tab_[i][enter];
                    if (ratio < best_ratio - kPivotTol ||
                        (ratio < best_ratio + kPivotTol &&
                         (leave < 0 || basis_[i] < basis_[leave]))) {
                        best_ratio = std::min(best_ratio, ratio);
                        leave = i;
                    }
                }
            }
            if (leave < 0) throw Error("Unbounded", "no leaving row for entering column");
            pivot(leave, enter);
        }
        throw Error("LpNumericalFailure", "simplex iteration limit reached");
    }

    const LinearProgram& lp_;
    int num_vars_ = 0, num_rows_ = 0;
    int slack_base_ = 0, art_base_ = 0, total_cols_ = 0, ident_base_ = 0, width_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
    std::vector<double> row_sign_;
    std::vector<bool> is_artificial_;

    void evict_artificials() {
        for (int i = 0; i < num_rows_; ++i) {
            if (!is_artificial_[basis_[i]]) continue;
            for (int j = 0; j < art_base_; ++j) {
                if (std::abs(tab_[i][j]) > kPivotTol) {
                    pivot(i, j);
                    break;
                }
            }
            // A row whose non-artificial entries are all zero is
            // redundant; its artificial stays basic at zero.
        }
    }
};

/// Payoff matrix of the reduced game: rows are vectors, columns the
/// coordinates in q, shifted so every entry is >= 1.
struct ShiftedGame {
    std::vector<std::vector<double>> payoff;
    double shift = 0.0;
};

ShiftedGame build_game(const std::vector<AlphaVector>& vectors, const std::vector<int>& kept,
                       const std::vector<int>& q) {
    ShiftedGame game;
    double lo = std::numeric_limits<double>::infinity();
    for (int i : kept)
        for (int s : q) lo = std::min(lo, vectors[i].values[s]);
    game.shift = 1.0 - lo;
    for (int i : kept) {
        std::vector<double> row;
        row.reserve(q.size());
        for (int s : q) row.push_back(vectors[i].values[s] + game.shift);
        game.payoff.push_back(std::move(row));
    }
    return game;
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp) {
    SimplexKernel kernel(lp);
    return kernel.solve();
}

std::vector<int> prune_on_support(const std::vector<AlphaVector>& vectors,
                                  const std::vector<int>& q) {
    auto dominated_on_q = [&](int i, int j) {
        for (int s : q)
            if (vectors[i].values[s] > vectors[j].values[s]) return false;
        return true;
    };
    std::vector<int> kept;
    for (int i = 0; i < static_cast<int>(vectors.size()); ++i) {
        bool dominated = false;
        for (int k : kept) {
            if (dominated_on_q(i, k)) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        std::erase_if(kept, [&](int k) { return dominated_on_q(k, i); });
        kept.push_back(i);
    }
    return kept;
}

NatureSolution nature_lp(const std::vector<AlphaVector>& gamma_set, const std::vector<int>& q,
                         int num_states) {
    if (gamma_set.empty() || q.empty())
        throw Error("LpNumericalFailure", "nature LP needs a nonempty vector set and support");
    const std::vector<int> kept = prune_on_support(gamma_set, q);
    const ShiftedGame game = build_game(gamma_set, kept, q);

    // max 1.x  s.t.  payoff . x <= 1, x >= 0;  value = 1/sum(x) - shift
    LinearProgram lp;
    lp.maximize = true;
    lp.objective.assign(q.size(), 1.0);
    for (const auto& row : game.payoff) lp.constraints.push_back({row, '<', 1.0});

    LpSolution sol;
    try {
        sol = lp_solve(lp);
    } catch (const Error& e) {
        throw Error("LpNumericalFailure", std::string("nature LP: ") + e.what());
    }
    double denom = 0.0;
    for (double x : sol.primal) denom += x;
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw Error("LpNumericalFailure", "nature LP returned a degenerate scaling");

    NatureSolution out;
    std::vector<double> belief(num_states, 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) belief[q[j]] = sol.primal[j] / denom;
    out.belief = Belief::from_probs(std::move(belief));
    out.value = 1.0 / denom - game.shift;
    return out;
}

AgentSolution agent_lp(const std::vector<AlphaVector>& gamma_set, const std::vector<int>& q) {
    if (gamma_set.empty() || q.empty())
        throw Error("LpNumericalFailure", "agent LP needs a nonempty vector set and support");
    const std::vector<int> kept = prune_on_support(gamma_set, q);
    const ShiftedGame game = build_game(gamma_set, kept, q);

    // min 1.p  s.t.  payoff^T . p >= 1, p >= 0;  value = 1/sum(p) - shift
    LinearProgram lp;
    lp.maximize = false;
    lp.objective.assign(kept.size(), 1.0);
    for (std::size_t col = 0; col < q.size(); ++col) {
        LinearProgram::Constraint c;
        c.coeffs.resize(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) c.coeffs[i] = game.payoff[i][col];
        c.relation = '>';
        c.rhs = 1.0;
        lp.constraints.push_back(std::move(c));
    }

    LpSolution sol;
    try {
        sol = lp_solve(lp);
    } catch (const Error& e) {
        throw Error("LpNumericalFailure", std::string("agent LP: ") + e.what());
    }
    double denom = 0.0;
    for (double p : sol.primal) denom += p;
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw Error("LpNumericalFailure", "agent LP returned a degenerate scaling");

    AgentSolution out;
    out.weights.assign(gamma_set.size(), 0.0);
    for (std::size_t i = 0; i < kept.size(); ++i) out.weights[kept[i]] = sol.primal[i] / denom;
    out.value = 1.0 / denom - game.shift;
    return out;
}

}  // namespace rpomdp
