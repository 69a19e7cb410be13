#pragma once

#include <vector>

namespace rpomdp {

/// Finite-state controller: each node plays an action and moves to a
/// successor node per observation.
struct PolicyGraph {
    struct Node {
        int action = 0;
        std::vector<int> next;  // indexed by observation
    };
    std::vector<Node> nodes;
    int root = 0;
};

/// Distribution over deterministic controllers.
struct MixedPolicy {
    std::vector<PolicyGraph> components;
    std::vector<double> weights;
};

}  // namespace rpomdp
