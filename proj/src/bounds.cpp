#include "rpomdp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpomdp {

bool pointwise_dominated(const AlphaVector& a, const AlphaVector& b) {
    for (std::size_t s = 0; s < a.values.size(); ++s)
        if (a.values[s] > b.values[s]) return false;
    return true;
}

std::vector<AlphaVector> prune_pointwise(std::vector<AlphaVector> vectors) {
    std::vector<AlphaVector> kept;
    for (auto& v : vectors) {
        bool dominated = false;
        for (const auto& w : kept) {
            if (pointwise_dominated(v, w)) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        std::erase_if(kept, [&](const AlphaVector& w) { return pointwise_dominated(w, v); });
        kept.push_back(std::move(v));
    }
    return kept;
}

int LowerBound::insert(AlphaVector v) {
    int index = static_cast<int>(vectors_.size());
    bool dominated = false;
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (active_[i] && pointwise_dominated(v, vectors_[i])) {
            dominated = true;
            break;
        }
    }
    if (!dominated) {
        for (std::size_t i = 0; i < vectors_.size(); ++i)
            if (active_[i] && pointwise_dominated(vectors_[i], v)) active_[i] = false;
    }
    vectors_.push_back(std::move(v));
    active_.push_back(!dominated);
    return index;
}

double LowerBound::value_at(const Belief& b) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vectors_.size(); ++i)
        if (active_[i]) best = std::max(best, vectors_[i].dot(b));
    return best;
}

int LowerBound::best_at(const Belief& b) const {
    int best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (!active_[i]) continue;
        double v = vectors_[i].dot(b);
        if (v > best_v) {
            best_v = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<int> LowerBound::active_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < vectors_.size(); ++i)
        if (active_[i]) out.push_back(static_cast<int>(i));
    return out;
}

int LowerBound::resolve_dominator(int i) const {
    if (active_[i]) return i;
    for (std::size_t j = 0; j < vectors_.size(); ++j)
        if (active_[j] && pointwise_dominated(vectors_[i], vectors_[j]))
            return static_cast<int>(j);
    // Unreachable while deactivation implies an active dominator exists.
    throw Error("MissingProvenance", "no active dominator for pruned vector");
}

double UpperBound::value_at(const Belief& b) const {
    double corner = 0.0;
    for (int s : b.support) corner += b.probs[s] * corner_values_[s];
    double best = corner;
    for (const auto& [bp, vp] : points_) {
        double ratio = std::numeric_limits<double>::infinity();
        for (int s : bp.support) ratio = std::min(ratio, b.probs[s] / bp.probs[s]);
        if (ratio <= 0.0) continue;
        double point_corner = 0.0;
        for (int s : bp.support) point_corner += bp.probs[s] * corner_values_[s];
        best = std::min(best, corner + ratio * (vp - point_corner));
    }
    return best;
}

void UpperBound::insert(const Belief& b, double v) {
    if (value_at(b) <= v + 1e-12) return;
    points_.emplace_back(b, v);
    if (++inserts_since_prune_ >= 100) {
        prune_points();
        inserts_since_prune_ = 0;
    }
}

void UpperBound::prune_points() {
    std::vector<std::pair<Belief, double>> all;
    all.swap(points_);
    // Re-insert newest first so a point is only kept when the others do
    // not already imply it.
    for (auto it = all.rbegin(); it != all.rend(); ++it) {
        if (value_at(it->first) > it->second + 1e-9)
            points_.push_back(std::move(*it));
    }
    std::reverse(points_.begin(), points_.end());
}

namespace {

/// g(s) = sum_{s'} T(s,a)(s') O(s',a)(z) alpha(s'), the backprojection
/// of alpha through (a, z).
std::vector<double> backproject(const Pomdp& m, int a, int z, const std::vector<double>& alpha) {
    std::vector<double> g(m.num_states(), 0.0);
    for (int s = 0; s < m.num_states(); ++s) {
        double acc = 0.0;
        for (const auto& [sp, tp] : m.transition[s][a]) {
            for (const auto& [zz, op] : m.observation_fn[sp][a]) {
                if (zz == z) {
                    acc += tp * op * alpha[sp];
                    break;
                }
            }
        }
        g[s] = acc;
    }
    return g;
}

struct Partial {
    std::vector<double> values;
    std::vector<int> choices;  // alpha index per observation handled so far
};

bool partial_dominated(const Partial& a, const Partial& b) {
    for (std::size_t s = 0; s < a.values.size(); ++s)
        if (a.values[s] > b.values[s]) return false;
    return true;
}

std::vector<Partial> prune_partials(std::vector<Partial> in) {
    std::vector<Partial> kept;
    for (auto& p : in) {
        bool dominated = false;
        for (const auto& k : kept) {
            if (partial_dominated(p, k)) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        std::erase_if(kept, [&](const Partial& k) { return partial_dominated(k, p); });
        kept.push_back(std::move(p));
    }
    return kept;
}

}  // namespace

GammaStack exact_gamma(const Pomdp& m, int horizon, const ExactGammaOptions& opts) {
    if (horizon < 1) throw Error("InvalidHorizon", "horizon must be >= 1");
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();

    GammaStack stack;
    stack.num_observations = Z;
    std::vector<AlphaVector> level;
    for (int a = 0; a < A; ++a) {
        AlphaVector v;
        v.values.resize(S);
        for (int s = 0; s < S; ++s) v.values[s] = m.reward_at(s, a);
        v.action = a;
        level.push_back(std::move(v));
    }
    if (opts.prune) level = prune_pointwise(std::move(level));
    stack.levels.push_back(std::move(level));

    for (int t = 2; t <= horizon; ++t) {
        const std::vector<AlphaVector>& prev = stack.levels.back();
        const std::size_t P = prev.size();
        std::vector<AlphaVector> next;
        for (int a = 0; a < A; ++a) {
            // backprojections of every previous vector through (a, z)
            std::vector<std::vector<std::vector<double>>> g(Z);
            for (int z = 0; z < Z; ++z) {
                g[z].reserve(P);
                for (const auto& alpha : prev) g[z].push_back(backproject(m, a, z, alpha.values));
            }

            std::vector<Partial> partials;
            {
                Partial seed;
                seed.values.resize(S);
                for (int s = 0; s < S; ++s) seed.values[s] = m.reward_at(s, a);
                partials.push_back(std::move(seed));
            }
            for (int z = 0; z < Z; ++z) {
                if (partials.size() * P > opts.blowup_cap)
                    throw Error("BlowupGuard",
                                "cross-sum would exceed " + std::to_string(opts.blowup_cap) +
                                    " vectors");
                std::vector<Partial> expanded;
                expanded.reserve(partials.size() * P);
                for (const auto& p : partials) {
                    for (std::size_t k = 0; k < P; ++k) {
                        Partial q;
                        q.values.resize(S);
                        for (int s = 0; s < S; ++s)
                            q.values[s] = p.values[s] + m.discount * g[z][k][s];
                        q.choices = p.choices;
                        q.choices.push_back(static_cast<int>(k));
                        expanded.push_back(std::move(q));
                    }
                }
                partials = opts.prune ? prune_partials(std::move(expanded)) : std::move(expanded);
            }
            for (auto& p : partials) {
                AlphaVector v;
                v.values = std::move(p.values);
                v.action = a;
                v.successors = std::move(p.choices);
                next.push_back(std::move(v));
                if (next.size() > opts.blowup_cap)
                    throw Error("BlowupGuard",
                                "level would exceed " + std::to_string(opts.blowup_cap) +
                                    " vectors");
            }
        }
        if (opts.prune) next = prune_pointwise(std::move(next));
        stack.levels.push_back(std::move(next));
    }
    return stack;
}

AlphaVector backup(const Pomdp& m, const LowerBound& lb, const Belief& b) {
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();
    const std::vector<int> active = lb.active_indices();

    AlphaVector best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
        // choose, per observation, the continuation vector best at b
        std::vector<int> chosen(Z, active.front());
        for (int z = 0; z < Z; ++z) {
            double best_dot = -std::numeric_limits<double>::infinity();
            for (int idx : active) {
                const auto& alpha = lb.vector(idx).values;
                double dot = 0.0;
                for (int s : b.support) {
                    double acc = 0.0;
                    for (const auto& [sp, tp] : m.transition[s][a]) {
                        for (const auto& [zz, op] : m.observation_fn[sp][a]) {
                            if (zz == z) {
                                acc += tp * op * alpha[sp];
                                break;
                            }
                        }
                    }
                    dot += b.probs[s] * acc;
                }
                if (dot > best_dot) {
                    best_dot = dot;
                    chosen[z] = idx;
                }
            }
        }
        AlphaVector v;
        v.values.assign(S, 0.0);
        for (int s = 0; s < S; ++s) v.values[s] = m.reward_at(s, a);
        for (int z = 0; z < Z; ++z) {
            const auto g = backproject(m, a, z, lb.vector(chosen[z]).values);
            for (int s = 0; s < S; ++s) v.values[s] += m.discount * g[s];
        }
        v.action = a;
        v.successors = chosen;
        double value = v.dot(b);
        if (value > best_value) {
            best_value = value;
            best = std::move(v);
        }
    }
    return best;
}

std::vector<double> fib_bound(const Pomdp& m, double tol) {
    if (m.discount >= 1.0)
        throw Error("InvalidDiscount", "FIB requires discount < 1");
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();
    std::vector<double> q(static_cast<std::size_t>(S) * A,
                          m.max_reward() / (1.0 - m.discount));
    std::vector<double> fresh(q.size());
    double residual = tol + 1.0;
    while (residual > tol) {
        residual = 0.0;
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                // weight[z][a'] = sum_{s'} T(s,a)(s') O(s',a)(z) q(s',a')
                std::vector<double> weight(static_cast<std::size_t>(Z) * A, 0.0);
                for (const auto& [sp, tp] : m.transition[s][a]) {
                    for (const auto& [z, op] : m.observation_fn[sp][a]) {
                        double w = tp * op;
                        for (int ap = 0; ap < A; ++ap) weight[z * A + ap] += w * q[sp * A + ap];
                    }
                }
                double value = m.reward_at(s, a);
                for (int z = 0; z < Z; ++z) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (int ap = 0; ap < A; ++ap) best = std::max(best, weight[z * A + ap]);
                    if (std::isfinite(best)) value += m.discount * best;
                }
                fresh[s * A + a] = value;
                residual = std::max(residual, std::abs(value - q[s * A + a]));
            }
        }
        q.swap(fresh);
    }
    std::vector<double> corner(S, -std::numeric_limits<double>::infinity());
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) corner[s] = std::max(corner[s], q[s * A + a]);
    return corner;
}

std::vector<AlphaVector> blind_bound(const Pomdp& m, double tol) {
    if (m.discount >= 1.0)
        throw Error("InvalidDiscount", "the blind bound requires discount < 1");
    const int S = m.num_states(), A = m.num_actions(), Z = m.num_observations();
    std::vector<AlphaVector> out;
    for (int a = 0; a < A; ++a) {
        double worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < S; ++s) worst = std::min(worst, m.reward_at(s, a));
        std::vector<double> alpha(S, worst / (1.0 - m.discount));
        std::vector<double> fresh(S);
        double residual = tol + 1.0;
        while (residual > tol) {
            residual = 0.0;
            for (int s = 0; s < S; ++s) {
                double value = m.reward_at(s, a);
                for (const auto& [sp, tp] : m.transition[s][a])
                    value += m.discount * tp * alpha[sp];
                fresh[s] = value;
                residual = std::max(residual, std::abs(value - alpha[s]));
            }
            alpha.swap(fresh);
        }
        AlphaVector v;
        v.values = std::move(alpha);
        v.action = a;
        // Self-loop: caller inserts these in action order into an empty
        // lower bound, so vector a lives at index a.
        v.successors.assign(Z, a);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace rpomdp
