#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rpomdp {

/// Tolerance used when checking that probability rows sum to one.
inline constexpr double kDistributionTol = 1e-9;

/// Error with a stable machine-readable code ("InvalidDiscount",
/// "BlowupGuard", ...) next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// Sparse probability row: (index, probability) pairs sorted by index.
using SparseRow = std::vector<std::pair<int, double>>;

inline double row_sum(const SparseRow& row) {
    double s = 0.0;
    for (const auto& [i, p] : row) s += p;
    return s;
}

/// Finite horizon (positive step count) or infinite.
class Horizon {
public:
    static Horizon finite(int steps) { return Horizon(steps); }
    static Horizon infinite() { return Horizon(-1); }

    bool is_infinite() const { return steps_ < 0; }
    bool is_finite() const { return steps_ >= 0; }
    int steps() const {
        if (is_infinite()) throw Error("InfiniteHorizon", "horizon is infinite");
        return steps_;
    }
    /// H + 1, with inf + 1 = inf.
    Horizon plus_one() const { return is_infinite() ? infinite() : finite(steps_ + 1); }

    bool operator==(const Horizon& o) const { return steps_ == o.steps_; }

private:
    explicit Horizon(int steps) : steps_(steps) {}
    int steps_;
};

/// Probability vector over states with explicit support.
struct Belief {
    std::vector<double> probs;
    std::vector<int> support;  // sorted indices of nonzero entries

    static Belief from_probs(std::vector<double> p);
    static Belief delta(int num_states, int state);
    static Belief uniform(int num_states, const std::vector<int>& states);

    int size() const { return static_cast<int>(probs.size()); }
    double operator[](int s) const { return probs[s]; }
};

inline Belief Belief::from_probs(std::vector<double> p) {
    Belief b;
    b.probs = std::move(p);
    for (int s = 0; s < static_cast<int>(b.probs.size()); ++s) {
        if (b.probs[s] != 0.0) b.support.push_back(s);
    }
    return b;
}

inline Belief Belief::delta(int num_states, int state) {
    std::vector<double> p(num_states, 0.0);
    p[state] = 1.0;
    return from_probs(std::move(p));
}

inline Belief Belief::uniform(int num_states, const std::vector<int>& states) {
    std::vector<double> p(num_states, 0.0);
    for (int s : states) p[s] = 1.0 / static_cast<double>(states.size());
    return from_probs(std::move(p));
}

}  // namespace rpomdp
