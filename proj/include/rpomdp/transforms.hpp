#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpomdp/model.hpp"
#include "rpomdp/policy_graph.hpp"

namespace rpomdp {

/// Bookkeeping for the dummy-stage construction shared by the POSG,
/// AB-POMDP and PO-MEMDP transforms: a fresh initial state family
/// (bottom), a dummy stage-one observation (top), the forced initial
/// action (diamond) and the 1/gamma reward correction that compensates
/// for the extra step.
struct SentinelInfo {
    std::vector<int> bottom_states;
    int top_observation = -1;
    int diamond_action = 0;
    double reward_scale = 1.0;  // 1/gamma
    int horizon_shift = 0;      // 0 or 1
};

enum class TransformKind { AbToPosg, MeToAb, AbToPomemdp, PomemdpToMo };

/// Origin of a transformed state: the original state index (or -1 for a
/// bottom state), the environment / nature index when applicable (-1
/// otherwise), and the stage tag (0 = bottom, 1, 2). The product
/// construction of pomemdp_to_mo instead stores the per-environment
/// factor states in `product`.
struct StateOrigin {
    int state = -1;
    int env = -1;
    int stage = 0;
    std::vector<int> product;
};

struct TransformRecord {
    TransformKind kind;
    std::vector<StateOrigin> state_map;  // new state index -> origin
    std::optional<SentinelInfo> sentinel;
};

std::string to_string(TransformKind kind);

/// Theorem construction of the one-sided POSG associated with an
/// AB-POMDP over Delta(Q): nature's actions are the states of Q.
std::pair<Posg, TransformRecord> ab_to_posg(const AbPomdp& m);

/// Reduction of a multi-environment POMDP to an AB-POMDP over the
/// bottom-state corners, one per environment.
std::pair<AbPomdp, TransformRecord> me_to_ab(const MePomdp& m);

/// Reduction of an AB-POMDP over Delta(Q) to a PO-MEMDP with one
/// environment per state in Q.
std::pair<MePomdp, TransformRecord> ab_to_pomemdp(const AbPomdp& m);

struct MoOptions {
    std::size_t max_states = 1000000;
};

/// Product construction turning a PO-MEMDP into an MO-POMDP over the
/// states reachable from the product of the initial supports.
std::pair<MePomdp, TransformRecord> pomemdp_to_mo(const MePomdp& m, const MoOptions& opts = {});

/// Strips the forced (diamond, top) prefix from a controller over a
/// transformed model: the result is rooted at the node reached from the
/// root on the top observation. Theorem-4 records carry no sentinel and
/// policies transfer unchanged; this throws NoSentinel there.
PolicyGraph lift_policy(const TransformRecord& record, const PolicyGraph& policy);
MixedPolicy lift_policy(const TransformRecord& record, const MixedPolicy& policy);

}  // namespace rpomdp
