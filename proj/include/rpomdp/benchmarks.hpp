#pragma once

#include <cstdint>

#include "rpomdp/model.hpp"

namespace rpomdp {

enum class BirdVariant { MePomdp, PoMemdp, MoPomdp };

struct BirdParams {
    int num_states = 3;   // >= 2
    int num_actions = 2;  // DN plus at least one intervention
    int num_experts = 3;
    std::uint64_t seed = 0;
    BirdVariant variant = BirdVariant::MePomdp;
};

/// The fixed three-expert bird preservation model.
MePomdp bird_fixture();

/// Randomized bird-family instance; deterministic in the seed. Throws
/// GenerationFailure when the distinct-orderings constraint cannot be
/// met within the retry budget.
MePomdp gen_bird(const BirdParams& p);

enum class RockPlacement { Random, Nearby, FarAway };
enum class RockFormulation { AbPomdp, MePomdp };

struct RockSampleParams {
    int grid = 2;         // m
    int good_rocks = 1;   // g
    int total_rocks = 2;  // t
    RockPlacement placement = RockPlacement::Nearby;
    RockFormulation formulation = RockFormulation::MePomdp;
    std::uint64_t seed = 0;
    /// Sensor half-efficiency distance; < 0 selects the default m/2.
    double sensor_d0 = -1.0;
    /// Reward granted when exiting at the right edge.
    double exit_reward = 10.0;
};

/// ME formulation: g good-rock slots in the state, one environment per
/// choice of which rocks are the good ones.
MePomdp gen_rocksample_me(const RockSampleParams& p);

/// AB formulation: all t rock bits in the state (at most g good), the
/// belief set ranging over the start states with exactly g good rocks.
AbPomdp gen_rocksample_ab(const RockSampleParams& p);

}  // namespace rpomdp
