#include "rpomdp/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "rpomdp/rng.hpp"

namespace rpomdp {

namespace {

SparseRow make_row(const std::vector<double>& dense) {
    SparseRow row;
    for (int i = 0; i < static_cast<int>(dense.size()); ++i)
        if (dense[i] != 0.0) row.emplace_back(i, dense[i]);
    return row;
}

// ---------------------------------------------------------------- bird

constexpr int kGrain = 20;  // probabilities are multiples of 1/20 = 0.05

/// Uniform composition of kGrain into k nonnegative parts, scaled to a
/// distribution (stars and bars).
std::vector<double> random_granular_dist(SplitMix64& rng, int k) {
    // choose k-1 distinct bar positions among kGrain + k - 1 slots
    std::vector<int> bars;
    int total = kGrain + k - 1;
    while (static_cast<int>(bars.size()) < k - 1) {
        int pos = rng.below(total);
        if (std::find(bars.begin(), bars.end(), pos) == bars.end()) bars.push_back(pos);
    }
    std::sort(bars.begin(), bars.end());
    std::vector<double> out;
    int prev = -1;
    for (int b : bars) {
        out.push_back(static_cast<double>(b - prev - 1) / kGrain);
        prev = b;
    }
    out.push_back(static_cast<double>(total - prev - 1) / kGrain);
    return out;
}

/// Successor slots of a state, ordered by population rank.
std::vector<int> bird_slots(int rank, int num_states) {
    if (num_states == 2) return {0, 1};
    if (rank == 0) return {0, 1, 2};
    if (rank == num_states - 1) return {rank - 2, rank - 1, rank};
    return {rank - 1, rank, rank + 1};
}

/// The fixed do-nothing rows, extended to larger state counts: heavy
/// self-weight, the rest on the nearest ranks.
std::vector<double> bird_dn_row(int rank, int num_states) {
    std::vector<double> row(num_states, 0.0);
    if (num_states == 2) {
        row[rank] = 0.8;
        row[1 - rank] = 0.2;
        return row;
    }
    if (rank == 0) {
        row[0] = 0.8;
        row[1] = 0.15;
        row[2] = 0.05;
    } else if (rank == num_states - 1) {
        row[rank] = 0.8;
        row[rank - 1] = 0.15;
        row[rank - 2] = 0.05;
    } else {
        row[rank] = 0.8;
        row[rank - 1] = 0.1;
        row[rank + 1] = 0.1;
    }
    return row;
}

std::vector<std::string> bird_state_labels(int num_states) {
    std::vector<std::string> labels;
    labels.push_back("s_L");
    for (int i = 1; i + 1 < num_states; ++i) labels.push_back("s_" + std::to_string(i));
    labels.push_back("s_H");
    return labels;
}

}  // namespace

MePomdp bird_fixture() {
    MePomdp m;
    m.states = {"s_L", "s_M", "s_H"};
    m.actions = {"C", "DN"};
    m.observations = {"o_L", "o_H"};
    m.discount = 0.95;
    m.horizon = Horizon::infinite();

    const std::vector<std::vector<double>> dn = {
        {0.8, 0.15, 0.05}, {0.1, 0.8, 0.1}, {0.05, 0.15, 0.8}};
    // control rows per expert: p (from s_L), q (from s_M), w (from s_H)
    const std::vector<std::vector<std::vector<double>>> control = {
        {{0.6, 0.35, 0.05}, {0.1, 0.5, 0.4}, {0.0, 0.1, 0.9}},
        {{0.2, 0.6, 0.2}, {0.1, 0.75, 0.15}, {0.05, 0.15, 0.8}},
        {{0.6, 0.35, 0.05}, {0.1, 0.5, 0.4}, {0.0, 0.1, 0.9}}};
    const std::vector<double> z_low = {0.5, 0.5, 0.4};
    const std::vector<double> rewards = {-5, 0, 0, 5, 5, 10};  // (s, a) row-major

    for (int e = 0; e < 3; ++e) {
        MeEnvironment env;
        env.transition.assign(3, std::vector<SparseRow>(2));
        env.observation_fn.assign(3, std::vector<SparseRow>(2));
        for (int s = 0; s < 3; ++s) {
            env.transition[s][0] = make_row(control[e][s]);
            env.transition[s][1] = make_row(dn[s]);
            std::vector<double> obs(2, 0.0);
            if (s == 0)
                obs[0] = 1.0;
            else if (s == 2)
                obs[1] = 1.0;
            else {
                obs[0] = z_low[e];
                obs[1] = 1.0 - z_low[e];
            }
            env.observation_fn[s][0] = make_row(obs);
            env.observation_fn[s][1] = make_row(obs);
        }
        env.reward = rewards;
        env.initial_belief = Belief::from_probs({1.0 / 3, 1.0 / 3, 1.0 / 3});
        m.envs.push_back(std::move(env));
    }
    return m;
}

MePomdp gen_bird(const BirdParams& p) {
    if (p.num_states < 2)
        throw Error("GenerationFailure", "bird models need at least two states");
    if (p.num_actions < 2)
        throw Error("GenerationFailure", "bird models need DN plus at least one action");
    if (p.num_experts < 1) throw Error("GenerationFailure", "at least one expert required");

    const int S = p.num_states, A = p.num_actions, n = p.num_experts;
    const int k = std::min(S, 3);
    const int dn = A - 1;  // the do-nothing action is the last one
    SplitMix64 rng{p.seed};

    // Effectiveness-ranked slot distributions, least effective first:
    // sorted descending lexicographically, so the most mass on the
    // lowest-ranked successor comes first.
    std::vector<std::vector<double>> dists;
    for (int a = 0; a < A; ++a) dists.push_back(random_granular_dist(rng, k));
    std::sort(dists.begin(), dists.end(), [](const auto& x, const auto& y) { return x > y; });

    const bool vary_transitions = p.variant != BirdVariant::MoPomdp;
    const bool vary_observations = p.variant != BirdVariant::PoMemdp;
    const int num_orderings = vary_transitions ? n : 1;
    const int num_obs_sets = vary_observations ? n : 1;

    // Per expert, per state: permutation of actions by claimed
    // effectiveness (rank 0 = least effective).
    using OrderingSet = std::vector<std::vector<int>>;
    std::vector<OrderingSet> orderings;
    const int retry_budget = 1000;
    for (int attempt = 0;; ++attempt) {
        orderings.clear();
        for (int e = 0; e < num_orderings; ++e) {
            OrderingSet per_state(S);
            for (int s = 0; s < S; ++s) {
                std::vector<int> perm(A);
                for (int a = 0; a < A; ++a) perm[a] = a;
                for (int i = A - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
                per_state[s] = std::move(perm);
            }
            orderings.push_back(std::move(per_state));
        }
        bool distinct = true;
        for (int i = 0; i < num_orderings && distinct; ++i)
            for (int j = i + 1; j < num_orderings; ++j)
                if (orderings[i] == orderings[j]) {
                    distinct = false;
                    break;
                }
        if (distinct) break;
        if (attempt >= retry_budget)
            throw Error("GenerationFailure",
                        "could not draw pairwise-distinct effectiveness orderings");
    }

    // Per expert: |S|-2 distinct observation rows over (o_L, o_H),
    // sorted with the most o_L-leaning row first and assigned to the
    // in-between states by rank.
    const int mids = S - 2;
    if (mids > kGrain + 1)
        throw Error("GenerationFailure", "not enough distinct 0.05-granular observation rows");
    auto draw_obs_set = [&]() {
        std::set<int> picks;
        while (static_cast<int>(picks.size()) < mids) picks.insert(rng.below(kGrain + 1));
        std::vector<int> rows(picks.rbegin(), picks.rend());  // most o_L mass first
        std::vector<double> out;
        for (int v : rows) out.push_back(static_cast<double>(v) / kGrain);
        return out;
    };
    std::vector<std::vector<double>> obs_sets;
    for (int attempt = 0;; ++attempt) {
        obs_sets.clear();
        for (int e = 0; e < num_obs_sets; ++e) obs_sets.push_back(draw_obs_set());
        if (p.variant != BirdVariant::MoPomdp || num_obs_sets == 1) break;
        // A MO variant whose experts agree on observations has
        // indistinguishable environments.
        bool distinct = mids > 0;
        for (int i = 0; i < num_obs_sets && distinct; ++i)
            for (int j = i + 1; j < num_obs_sets; ++j)
                if (obs_sets[i] == obs_sets[j]) distinct = false;
        if (distinct) break;
        if (attempt >= retry_budget || mids == 0)
            throw Error("GenerationFailure",
                        "MO variant needs pairwise-distinct observation tables");
    }

    MePomdp m;
    m.states = bird_state_labels(S);
    for (int a = 0; a + 1 < A; ++a) m.actions.push_back("a" + std::to_string(a + 1));
    m.actions.push_back("DN");
    m.observations = {"o_L", "o_H"};
    m.discount = 0.95;
    m.horizon = Horizon::infinite();

    Belief init = Belief::from_probs(std::vector<double>(S, 1.0 / S));
    for (int e = 0; e < n; ++e) {
        const OrderingSet& ord = orderings[vary_transitions ? e : 0];
        const std::vector<double>& obs_rows = obs_sets[vary_observations ? e : 0];
        MeEnvironment env;
        env.transition.assign(S, std::vector<SparseRow>(A));
        env.observation_fn.assign(S, std::vector<SparseRow>(A));
        env.reward.assign(static_cast<std::size_t>(S) * A, 0.0);
        for (int s = 0; s < S; ++s) {
            const std::vector<int> slots = bird_slots(s, S);
            for (int a = 0; a < A; ++a) {
                std::vector<double> dense(S, 0.0);
                if (a == dn) {
                    dense = bird_dn_row(s, S);
                } else {
                    int rank = static_cast<int>(
                        std::find(ord[s].begin(), ord[s].end(), a) - ord[s].begin());
                    for (int j = 0; j < k; ++j) dense[slots[j]] += dists[rank][j];
                }
                env.transition[s][a] = make_row(dense);
                env.reward[s * A + a] = 5.0 * s - (a == dn ? 0.0 : 5.0);

                std::vector<double> obs(2, 0.0);
                if (s == 0)
                    obs[0] = 1.0;
                else if (s == S - 1)
                    obs[1] = 1.0;
                else {
                    obs[0] = obs_rows[s - 1];
                    obs[1] = 1.0 - obs_rows[s - 1];
                }
                env.observation_fn[s][a] = make_row(obs);
            }
        }
        env.initial_belief = init;
        m.envs.push_back(std::move(env));
    }
    return m;
}

// ---------------------------------------------------------- rocksample

namespace {

struct RockLayout {
    int m;
    std::vector<std::pair<int, int>> rocks;  // (x, y)
    double d0;
};

void check_rock_params(const RockSampleParams& p) {
    if (p.grid < 1) throw Error("GenerationFailure", "grid size must be >= 1");
    if (p.good_rocks < 1 || p.good_rocks > p.total_rocks)
        throw Error("GenerationFailure", "need 1 <= good rocks <= total rocks");
    if (p.total_rocks > p.grid * p.grid)
        throw Error("GenerationFailure", "more rocks than grid cells");
    if (p.placement != RockPlacement::Random && (p.total_rocks < 2 || p.total_rocks > 3))
        throw Error("GenerationFailure", "nearby/far-away placement needs 2 or 3 rocks");
    if (p.placement != RockPlacement::Random && p.grid < 2)
        throw Error("GenerationFailure", "nearby/far-away placement needs a grid of >= 2");
}

RockLayout rock_layout(const RockSampleParams& p) {
    check_rock_params(p);
    RockLayout layout;
    layout.m = p.grid;
    layout.d0 = p.sensor_d0 > 0.0 ? p.sensor_d0 : p.grid / 2.0;
    const int m = p.grid;
    switch (p.placement) {
        case RockPlacement::Nearby:
            layout.rocks = {{1, 0}, {0, 1}};
            if (p.total_rocks == 3) layout.rocks.push_back({1, 1});
            break;
        case RockPlacement::FarAway:
            layout.rocks = {{m - 1, 0}, {0, m - 1}};
            if (p.total_rocks == 3) layout.rocks.push_back({m - 1, m - 1});
            break;
        case RockPlacement::Random: {
            SplitMix64 rng{p.seed};
            std::set<int> cells;
            while (static_cast<int>(cells.size()) < p.total_rocks)
                cells.insert(rng.below(m * m));
            for (int c : cells) layout.rocks.push_back({c % m, c / m});
            break;
        }
    }
    return layout;
}

std::vector<std::vector<int>> combinations(int t, int g) {
    std::vector<std::vector<int>> out;
    std::vector<int> combo(g);
    for (int i = 0; i < g; ++i) combo[i] = i;
    while (true) {
        out.push_back(combo);
        int i = g - 1;
        while (i >= 0 && combo[i] == t - g + i) --i;
        if (i < 0) break;
        ++combo[i];
        for (int j = i + 1; j < g; ++j) combo[j] = combo[j - 1] + 1;
    }
    return out;
}

double sensor_accuracy(const RockLayout& layout, int x, int y, int rock) {
    double dx = x - layout.rocks[rock].first;
    double dy = y - layout.rocks[rock].second;
    double d = std::sqrt(dx * dx + dy * dy);
    return 0.5 * (1.0 + std::pow(2.0, -d / layout.d0));
}

constexpr int kObsGood = 0, kObsBad = 1, kObsNone = 2;

std::vector<std::string> rock_actions(int total_rocks) {
    std::vector<std::string> actions = {"north", "south", "east", "west", "sample"};
    for (int r = 0; r < total_rocks; ++r) actions.push_back("check" + std::to_string(r + 1));
    return actions;
}

/// Destination cell of a move, or -1 for the exit, or the same cell for
/// a blocked move.
int move_dest(int m, int x, int y, int action) {
    int nx = x, ny = y;
    if (action == 0) ny = y + 1;
    if (action == 1) ny = y - 1;
    if (action == 2) nx = x + 1;
    if (action == 3) nx = x - 1;
    if (nx >= m) return -1;  // exit at the right edge
    if (nx < 0 || ny < 0 || ny >= m) return y * m + x;
    return ny * m + nx;
}

}  // namespace

MePomdp gen_rocksample_me(const RockSampleParams& p) {
    const RockLayout layout = rock_layout(p);
    const int m = p.grid, g = p.good_rocks, t = p.total_rocks;
    const int cells = m * m;
    const int masks = 1 << g;
    const int S = cells * masks + 1;
    const int terminal = S - 1;
    const auto combos = combinations(t, g);
    const int A = 5 + t;

    MePomdp me;
    for (int c = 0; c < cells; ++c) {
        for (int mask = 0; mask < masks; ++mask) {
            std::string label = "x" + std::to_string(c % m) + "y" + std::to_string(c / m) + "|";
            for (int j = 0; j < g; ++j) label += (mask >> j) & 1 ? 'G' : 'B';
            me.states.push_back(label);
        }
    }
    me.states.push_back("done");
    me.actions = rock_actions(t);
    me.observations = {"good", "bad", "none"};
    me.discount = 0.95;
    me.horizon = Horizon::infinite();

    auto state_index = [&](int cell, int mask) { return cell * masks + mask; };
    // rock index at a cell, or -1
    std::vector<int> rock_at(cells, -1);
    for (int r = 0; r < t; ++r)
        rock_at[layout.rocks[r].second * m + layout.rocks[r].first] = r;

    for (const auto& combo : combos) {
        // slot_of[r] = slot index when rock r is good in this environment
        std::vector<int> slot_of(t, -1);
        for (int j = 0; j < g; ++j) slot_of[combo[j]] = j;

        MeEnvironment env;
        env.transition.assign(S, std::vector<SparseRow>(A));
        env.observation_fn.assign(S, std::vector<SparseRow>(A));
        env.reward.assign(static_cast<std::size_t>(S) * A, 0.0);

        for (int a = 0; a < A; ++a) {
            env.transition[terminal][a] = {{terminal, 1.0}};
            env.observation_fn[terminal][a] = {{kObsNone, 1.0}};
        }
        for (int c = 0; c < cells; ++c) {
            const int x = c % m, y = c / m;
            for (int mask = 0; mask < masks; ++mask) {
                const int s = state_index(c, mask);
                for (int a = 0; a < A; ++a) {
                    int succ = s;
                    double reward = 0.0;
                    if (a < 4) {
                        int dest = move_dest(m, x, y, a);
                        if (dest < 0) {
                            succ = terminal;
                            reward = p.exit_reward;
                        } else {
                            succ = state_index(dest, mask);
                        }
                    } else if (a == 4) {
                        int r = rock_at[c];
                        if (r >= 0 && slot_of[r] >= 0 && ((mask >> slot_of[r]) & 1)) {
                            reward = 10.0;
                            succ = state_index(c, mask & ~(1 << slot_of[r]));
                        } else {
                            reward = -10.0;
                        }
                    }
                    env.transition[s][a] = {{succ, 1.0}};
                    env.reward[s * A + a] = reward;

                    if (a >= 5) {
                        int r = a - 5;
                        bool good = slot_of[r] >= 0 && ((mask >> slot_of[r]) & 1);
                        double eta = sensor_accuracy(layout, x, y, r);
                        double p_good = good ? eta : 1.0 - eta;
                        SparseRow obs;
                        if (p_good > 0.0) obs.emplace_back(kObsGood, p_good);
                        if (1.0 - p_good > 0.0) obs.emplace_back(kObsBad, 1.0 - p_good);
                        env.observation_fn[s][a] = std::move(obs);
                    } else {
                        env.observation_fn[s][a] = {{kObsNone, 1.0}};
                    }
                }
            }
        }
        env.initial_belief = Belief::delta(S, state_index(0, masks - 1));
        me.envs.push_back(std::move(env));
    }
    return me;
}

AbPomdp gen_rocksample_ab(const RockSampleParams& p) {
    const RockLayout layout = rock_layout(p);
    const int m = p.grid, g = p.good_rocks, t = p.total_rocks;
    const int cells = m * m;

    // masks over all t rocks with at most g good bits
    std::vector<int> masks;
    std::vector<int> mask_index(1 << t, -1);
    for (int mask = 0; mask < (1 << t); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) <= g) {
            mask_index[mask] = static_cast<int>(masks.size());
            masks.push_back(mask);
        }
    }
    const int M = static_cast<int>(masks.size());
    const int S = cells * M + 1;
    const int terminal = S - 1;
    const int A = 5 + t;

    Pomdp pom;
    for (int c = 0; c < cells; ++c) {
        for (int mask : masks) {
            std::string label = "x" + std::to_string(c % m) + "y" + std::to_string(c / m) + "|";
            for (int r = 0; r < t; ++r) label += (mask >> r) & 1 ? 'G' : 'B';
            pom.states.push_back(label);
        }
    }
    pom.states.push_back("done");
    pom.actions = rock_actions(t);
    pom.observations = {"good", "bad", "none"};
    pom.discount = 0.95;
    pom.horizon = Horizon::infinite();

    auto state_index = [&](int cell, int mask) { return cell * M + mask_index[mask]; };
    std::vector<int> rock_at(cells, -1);
    for (int r = 0; r < t; ++r)
        rock_at[layout.rocks[r].second * m + layout.rocks[r].first] = r;

    pom.transition.assign(S, std::vector<SparseRow>(A));
    pom.observation_fn.assign(S, std::vector<SparseRow>(A));
    pom.reward.assign(static_cast<std::size_t>(S) * A, 0.0);
    for (int a = 0; a < A; ++a) {
        pom.transition[terminal][a] = {{terminal, 1.0}};
        pom.observation_fn[terminal][a] = {{kObsNone, 1.0}};
    }
    for (int c = 0; c < cells; ++c) {
        const int x = c % m, y = c / m;
        for (int mi = 0; mi < M; ++mi) {
            const int mask = masks[mi];
            const int s = c * M + mi;
            for (int a = 0; a < A; ++a) {
                int succ = s;
                double reward = 0.0;
                if (a < 4) {
                    int dest = move_dest(m, x, y, a);
                    if (dest < 0) {
                        succ = terminal;
                        reward = p.exit_reward;
                    } else {
                        succ = state_index(dest, mask);
                    }
                } else if (a == 4) {
                    int r = rock_at[c];
                    if (r >= 0 && ((mask >> r) & 1)) {
                        reward = 10.0;
                        succ = state_index(c, mask & ~(1 << r));
                    } else {
                        reward = -10.0;
                    }
                }
                pom.transition[s][a] = {{succ, 1.0}};
                pom.reward[s * A + a] = reward;

                if (a >= 5) {
                    int r = a - 5;
                    bool good = (mask >> r) & 1;
                    double eta = sensor_accuracy(layout, x, y, r);
                    double p_good = good ? eta : 1.0 - eta;
                    SparseRow obs;
                    if (p_good > 0.0) obs.emplace_back(kObsGood, p_good);
                    if (1.0 - p_good > 0.0) obs.emplace_back(kObsBad, 1.0 - p_good);
                    pom.observation_fn[s][a] = std::move(obs);
                } else {
                    pom.observation_fn[s][a] = {{kObsNone, 1.0}};
                }
            }
        }
    }

    std::vector<int> support;
    for (int mi = 0; mi < M; ++mi)
        if (__builtin_popcount(static_cast<unsigned>(masks[mi])) == g)
            support.push_back(0 * M + mi);  // start cell is (0,0)
    std::sort(support.begin(), support.end());
    pom.initial_belief = Belief::uniform(S, support);

    return AbPomdp{std::move(pom), std::move(support)};
}

}  // namespace rpomdp
