#pragma once

// Small hand-built models shared across the unit suites.

#include "rpomdp/model.hpp"

namespace rpomdp::testutil {

inline SparseRow dense_row(const std::vector<double>& p) {
    SparseRow row;
    for (int i = 0; i < static_cast<int>(p.size()); ++i)
        if (p[i] != 0.0) row.emplace_back(i, p[i]);
    return row;
}

/// One state, one action, reward 1, single observation.
inline Pomdp single_state(double reward = 1.0, double discount = 0.5) {
    Pomdp m;
    m.states = {"s"};
    m.actions = {"a"};
    m.observations = {"z"};
    m.transition = {{dense_row({1.0})}};
    m.observation_fn = {{dense_row({1.0})}};
    m.reward = {reward};
    m.initial_belief = Belief::delta(1, 0);
    m.discount = discount;
    m.horizon = Horizon::infinite();
    return m;
}

/// Deterministic two-state chain s0 -> s1 -> s1 with one observation.
inline Pomdp det_chain() {
    Pomdp m;
    m.states = {"s0", "s1"};
    m.actions = {"go"};
    m.observations = {"z"};
    m.transition = {{dense_row({0.0, 1.0})}, {dense_row({0.0, 1.0})}};
    m.observation_fn = {{dense_row({1.0})}, {dense_row({1.0})}};
    m.reward = {0.0, 1.0};
    m.initial_belief = Belief::delta(2, 0);
    m.discount = 0.9;
    m.horizon = Horizon::infinite();
    return m;
}

/// Two states, one action that keeps the state, symmetric-noise
/// observation: O(s', a)(z_i) = 0.8 when i matches s', else 0.2.
inline Pomdp two_state_noise() {
    Pomdp m;
    m.states = {"s0", "s1"};
    m.actions = {"a"};
    m.observations = {"z0", "z1"};
    m.transition = {{dense_row({1.0, 0.0})}, {dense_row({0.0, 1.0})}};
    m.observation_fn = {{dense_row({0.8, 0.2})}, {dense_row({0.2, 0.8})}};
    m.reward = {0.0, 0.0};
    m.initial_belief = Belief::from_probs({0.5, 0.5});
    m.discount = 0.9;
    m.horizon = Horizon::infinite();
    return m;
}

/// Two states with an identity observation function (fully observable).
inline Pomdp fully_observable(double discount = 0.9) {
    Pomdp m;
    m.states = {"s0", "s1"};
    m.actions = {"stay", "swap"};
    m.observations = {"z0", "z1"};
    m.transition.assign(2, std::vector<SparseRow>(2));
    m.transition[0][0] = dense_row({1.0, 0.0});
    m.transition[0][1] = dense_row({0.0, 1.0});
    m.transition[1][0] = dense_row({0.0, 1.0});
    m.transition[1][1] = dense_row({1.0, 0.0});
    m.observation_fn.assign(2, std::vector<SparseRow>(2));
    for (int a = 0; a < 2; ++a) {
        m.observation_fn[0][a] = dense_row({1.0, 0.0});
        m.observation_fn[1][a] = dense_row({0.0, 1.0});
    }
    m.reward = {0.0, 1.0, 2.0, 0.5};
    m.initial_belief = Belief::from_probs({0.5, 0.5});
    m.discount = discount;
    m.horizon = Horizon::infinite();
    return m;
}

/// Appendix A.2 Proposition 1 model: one state, two actions, one
/// observation, two environments with opposing unit rewards, H = 1,
/// gamma = 1.
inline MePomdp proposition1_fixture() {
    MePomdp m;
    m.states = {"s"};
    m.actions = {"a1", "a2"};
    m.observations = {"z"};
    m.discount = 1.0;
    m.horizon = Horizon::finite(1);
    for (int i = 0; i < 2; ++i) {
        MeEnvironment env;
        env.transition = {{dense_row({1.0}), dense_row({1.0})}};
        env.observation_fn = {{dense_row({1.0}), dense_row({1.0})}};
        env.reward = i == 0 ? std::vector<double>{1.0, -1.0} : std::vector<double>{-1.0, 1.0};
        env.initial_belief = Belief::delta(1, 0);
        m.envs.push_back(std::move(env));
    }
    return m;
}

}  // namespace rpomdp::testutil
