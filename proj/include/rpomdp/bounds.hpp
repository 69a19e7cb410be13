#pragma once

#include <cstddef>
#include <vector>

#include "rpomdp/model.hpp"

namespace rpomdp {

/// Linear value-function piece with the policy provenance that produced
/// it: the action it plays and, per observation, the index of the
/// vector it continues with. Blind (initial) vectors continue with
/// themselves.
struct AlphaVector {
    std::vector<double> values;
    int action = 0;
    std::vector<int> successors;  // indexed by observation

    double dot(const Belief& b) const {
        double v = 0.0;
        for (int s : b.support) v += b.probs[s] * values[s];
        return v;
    }
};

/// True when a <= b coordinatewise.
bool pointwise_dominated(const AlphaVector& a, const AlphaVector& b);

/// Removes vectors dominated coordinatewise by another vector in the
/// list. Ties keep the earlier-generated vector.
std::vector<AlphaVector> prune_pointwise(std::vector<AlphaVector> vectors);

/// Append-only lower-bound vector set. Dominated vectors are
/// deactivated rather than erased so successor indices stay valid for
/// policy extraction.
class LowerBound {
public:
    int insert(AlphaVector v);

    double value_at(const Belief& b) const;
    /// Index of the active vector maximizing alpha . b.
    int best_at(const Belief& b) const;

    const std::vector<AlphaVector>& vectors() const { return vectors_; }
    const AlphaVector& vector(int i) const { return vectors_[i]; }
    bool active(int i) const { return active_[i]; }
    std::vector<int> active_indices() const;
    int size() const { return static_cast<int>(vectors_.size()); }

    /// Earliest-generated active vector dominating vectors_[i]
    /// coordinatewise (i itself when active).
    int resolve_dominator(int i) const;

private:
    std::vector<AlphaVector> vectors_;
    std::vector<bool> active_;
};

/// Upper bound: per-state corner values plus belief-value points with
/// sawtooth interpolation.
class UpperBound {
public:
    UpperBound() = default;
    explicit UpperBound(std::vector<double> corner_values)
        : corner_values_(std::move(corner_values)) {}

    double value_at(const Belief& b) const;
    void insert(const Belief& b, double v);

    const std::vector<double>& corner_values() const { return corner_values_; }
    const std::vector<std::pair<Belief, double>>& points() const { return points_; }

private:
    void prune_points();

    std::vector<double> corner_values_;
    std::vector<std::pair<Belief, double>> points_;
    std::size_t inserts_since_prune_ = 0;
};

/// Per-timestep vector sets for the exact finite-horizon recursion.
/// levels[t] holds Gamma_{t+1}; successor indices of level t point into
/// level t-1.
struct GammaStack {
    std::vector<std::vector<AlphaVector>> levels;
    int num_observations = 0;

    const std::vector<AlphaVector>& top() const { return levels.back(); }
};

struct ExactGammaOptions {
    bool prune = true;
    std::size_t blowup_cap = 1000000;
};

/// Exact finite-horizon alpha-vector sets by full cross-sum, discounting
/// inside the backup so the top level carries the discounted H-step
/// value. Throws BlowupGuard when a level would exceed the cap.
GammaStack exact_gamma(const Pomdp& m, int horizon, const ExactGammaOptions& opts = {});

/// Point-based backup of the lower bound at belief b.
AlphaVector backup(const Pomdp& m, const LowerBound& lb, const Belief& b);

/// Fast Informed Bound corner values, iterated from above so truncation
/// keeps the bound valid.
std::vector<double> fib_bound(const Pomdp& m, double tol = 1e-6);

/// One always-play-a vector per action, iterated from the worst-case
/// underapproximation so any iteration count stays a valid lower bound.
std::vector<AlphaVector> blind_bound(const Pomdp& m, double tol = 1e-6);

}  // namespace rpomdp
