#include <doctest.h>

#include "oracles.hpp"
#include "rpomdp/benchmarks.hpp"
#include "rpomdp/model.hpp"
#include "test_util.hpp"

using namespace rpomdp;
using namespace rpomdp::testutil;

TEST_CASE("validate accepts rows within the 1e-9 tolerance") {
    Pomdp m = two_state_noise();
    m.transition[0][0] = {{0, 0.999999999}};  // off by 1e-9
    CHECK(validate(m).empty());
}

TEST_CASE("validate names the offending row") {
    Pomdp m = two_state_noise();
    m.transition[0][0] = {{0, 0.9}};
    const auto violations = validate(m);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("(s0,a0)") != std::string::npos);
}

TEST_CASE("discount 1 with infinite horizon is rejected") {
    Pomdp m = two_state_noise();
    m.discount = 1.0;
    const auto violations = validate(m);
    REQUIRE(!violations.empty());
    CHECK(violations[0].find("discount/horizon") != std::string::npos);

    m.horizon = Horizon::finite(3);
    CHECK(validate(m).empty());
}

TEST_CASE("validate flags empty available_actions and bad beliefs") {
    Pomdp m = two_state_noise();
    m.available_actions = std::vector<std::vector<int>>{{0}, {}};
    CHECK(!validate(m).empty());

    Pomdp b = two_state_noise();
    b.initial_belief.probs = {0.5, 0.6};
    CHECK(!validate(b).empty());
}

TEST_CASE("belief_update on a deterministic chain") {
    const Pomdp m = det_chain();
    const Belief next = belief_update(m, Belief::delta(2, 0), 0, 0);
    CHECK(next.probs[1] == doctest::Approx(1.0));
    CHECK(next.support == std::vector<int>{1});
}

TEST_CASE("fully revealing observation collapses the posterior") {
    Pomdp m = two_state_noise();
    m.observation_fn = {{dense_row({1.0, 0.0})}, {dense_row({0.0, 1.0})}};
    const Belief next = belief_update(m, m.initial_belief, 0, 1);
    CHECK(next.probs[1] == doctest::Approx(1.0));
}

TEST_CASE("symmetric-noise posterior matches the hand computation") {
    const Pomdp m = two_state_noise();
    // uniform prior, z0: posterior proportional to (0.5*0.8, 0.5*0.2)
    const Belief post = belief_update(m, m.initial_belief, 0, 0);
    CHECK(post.probs[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(post.probs[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(pr_obs(m, m.initial_belief, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // brute-force joint enumeration over (s, s', z)
    double pz = 0.0, mass0 = 0.0;
    for (int s = 0; s < 2; ++s)
        for (const auto& [sp, tp] : m.transition[s][0])
            for (const auto& [z, op] : m.observation_fn[sp][0])
                if (z == 0) {
                    pz += m.initial_belief.probs[s] * tp * op;
                    if (sp == 0) mass0 += m.initial_belief.probs[s] * tp * op;
                }
    CHECK(pz == doctest::Approx(pr_obs(m, m.initial_belief, 0, 0)).epsilon(1e-12));
    CHECK(mass0 / pz == doctest::Approx(post.probs[0]).epsilon(1e-12));
}

TEST_CASE("zero-probability observation raises") {
    Pomdp m = two_state_noise();
    m.observation_fn = {{dense_row({1.0, 0.0})}, {dense_row({1.0, 0.0})}};
    CHECK_THROWS_WITH_AS(belief_update(m, m.initial_belief, 0, 1), doctest::Contains("ZeroProb"),
                         Error);
}

TEST_CASE("single-observation models have pr_obs 1") {
    const Pomdp m = det_chain();
    CHECK(pr_obs(m, m.initial_belief, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("pr_obs sums to one over observations") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        const Pomdp m = oracles::random_pomdp(seed, 4, 3, 3, 0.9, Horizon::infinite());
        REQUIRE(validate(m).empty());
        SplitMix64 rng{seed ^ 77};
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> p(4);
            double total = 0.0;
            for (double& x : p) total += (x = rng.unit());
            for (double& x : p) x /= total;
            const Belief b = Belief::from_probs(std::move(p));
            for (int a = 0; a < 3; ++a) {
                double sum = 0.0;
                for (int z = 0; z < 3; ++z) sum += pr_obs(m, b, a, z);
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("belief_update output satisfies the belief invariants") {
    const Pomdp m = oracles::random_pomdp(9, 4, 2, 3, 0.9, Horizon::infinite());
    Belief b = m.initial_belief;
    for (int step = 0; step < 5; ++step) {
        b = belief_update(m, b, step % 2, step % 3);
        CHECK(validate(b).empty());
    }
}

TEST_CASE("env_slice of a single-environment model is that environment") {
    MePomdp me = oracles::random_me_pomdp(5, 3, 2, 2, 1, 0.9, Horizon::infinite());
    const Pomdp p = env_slice(me, 0);
    CHECK(p.transition == me.envs[0].transition);
    CHECK(p.reward == me.envs[0].reward);
}

TEST_CASE("env_slice exposes the bird fixture's second expert") {
    const MePomdp bird = bird_fixture();
    const Pomdp expert2 = env_slice(bird, 1);
    // control action at s_L: (0.2, 0.6, 0.2)
    const SparseRow& row = expert2.transition[0][0];
    REQUIRE(row.size() == 3);
    CHECK(row[0].second == doctest::Approx(0.2));
    CHECK(row[1].second == doctest::Approx(0.6));
    CHECK(row[2].second == doctest::Approx(0.2));
}

TEST_CASE("env_slice rejects out-of-range indices") {
    const MePomdp bird = bird_fixture();
    CHECK_THROWS_WITH_AS(env_slice(bird, 3), doctest::Contains("IndexOutOfRange"), Error);
    CHECK_THROWS_AS(env_slice(bird, -1), Error);
}

TEST_CASE("env_slice inherits validity and agrees bitwise with the parent") {
    const MePomdp me = oracles::random_me_pomdp(11, 3, 2, 2, 3, 0.9, Horizon::infinite());
    REQUIRE(validate(me).empty());
    for (int i = 0; i < me.num_envs(); ++i) {
        const Pomdp p = env_slice(me, i);
        CHECK(validate(p).empty());
        CHECK(p.transition == me.envs[i].transition);
        CHECK(p.observation_fn == me.envs[i].observation_fn);
        CHECK(p.reward == me.envs[i].reward);
        CHECK(p.initial_belief.probs == me.envs[i].initial_belief.probs);
    }
}

TEST_CASE("po-memdp and mo-pomdp flags") {
    MePomdp me = oracles::random_me_pomdp(13, 3, 2, 2, 2, 0.9, Horizon::infinite());
    CHECK(!me.is_po_memdp());
    CHECK(!me.is_mo_pomdp());
    me.envs[1].observation_fn = me.envs[0].observation_fn;
    CHECK(me.is_po_memdp());
    me.envs[1].transition = me.envs[0].transition;
    me.envs[1].initial_belief = me.envs[0].initial_belief;
    CHECK(me.is_mo_pomdp());
}
