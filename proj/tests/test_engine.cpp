#include <gtest/gtest.h>

#include <vector>

#include "d2dsim/engine.hpp"

using namespace d2dsim;

namespace {

SimConfig small_config(std::uint32_t slots = 30, std::uint32_t reps = 8)
{
    auto c = default_config();
    c.experiment.num_slots = slots;
    c.experiment.num_reps = reps;
    c.experiment.due_arrival_rate = 1.0;
    return c;
}

} // namespace

TEST(Arrivals, ZeroRate)
{
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        EXPECT_EQ(spawn_arrivals(rng, 0.0), 0u);
    }
    EXPECT_THROW(spawn_arrivals(rng, -1.0), std::invalid_argument);
}

TEST(Arrivals, PoissonMean)
{
    Rng rng(2);
    double sum = 0.0;
    constexpr int n = 100'000;
    for (int k = 0; k < n; ++k) {
        sum += static_cast<double>(spawn_arrivals(rng, 0.5));
    }
    EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Arrivals, Reproducible)
{
    Rng a(3);
    Rng b(3);
    for (int k = 0; k < 200; ++k) {
        EXPECT_EQ(spawn_arrivals(a, 0.5), spawn_arrivals(b, 0.5));
    }
}

TEST(RunSlot, NothingToRent)
{
    auto c = default_config();
    c.experiment.due_arrival_rate = 0.0;
    auto state = make_episode_state(c, PolicyKind::Proposed, 1, 0);
    for (int t = 0; t < 5; ++t) {
        const auto r = run_slot(state, c);
        EXPECT_EQ(r.slot, static_cast<std::uint32_t>(t));
        EXPECT_EQ(r.revenue, 0.0);
        EXPECT_EQ(r.r_max, 0.0);
        EXPECT_EQ(r.eta, 0.0);
        EXPECT_EQ(r.active_due, 0u);
    }
}

// One OMA C-UE with one admitted D-UE: revenue 1, r_max 1.5, eta 2/3.
TEST(RunSlot, SingleOmaTenantAccounting)
{
    auto c = default_config();
    c.experiment.num_cue_m = 1;
    c.radio.p_cue = 1.0;
    c.radio.p_due = 1.0;
    c.radio.noise_power = 0.001;
    GainTable g(1, 1);
    g.set_cue_to_bs(0, 0.01);
    g.set_due_to_bs(0, 0.002);
    g.set_due_to_rx(0, 0, 0.02);
    g.set_cue_to_rx(0, 0, 0.003);
    PolicyState policy(PolicyKind::AllOma, c, Rng(1));
    const auto r = play_slot(0, policy, g, c);
    EXPECT_EQ(r.admitted_count, 1u);
    EXPECT_DOUBLE_EQ(r.revenue, 1.0);
    EXPECT_DOUBLE_EQ(r.r_max, 1.5);
    EXPECT_DOUBLE_EQ(r.eta, 2.0 / 3.0);
    EXPECT_EQ(r.constraint_violations, 0u);
}

// The bandit plays NOMA through slot 6 under the default parameters.
TEST(Episode, ProposedMatchesAllNomaBeforeSwitch)
{
    const auto c = default_config();
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        const auto p = run_episode(c, PolicyKind::Proposed, seed);
        const auto n = run_episode(c, PolicyKind::AllNoma, seed);
        for (std::size_t t = 0; t < 7; ++t) {
            EXPECT_EQ(p.per_slot[t], n.per_slot[t]) << "slot " << t;
        }
        const auto o = run_episode(c, PolicyKind::AllOma, seed);
        for (std::size_t t = 7; t < p.per_slot.size(); ++t) {
            EXPECT_EQ(p.per_slot[t], o.per_slot[t]) << "slot " << t;
        }
    }
}

TEST(Episode, ZeroSlots)
{
    auto c = default_config();
    c.experiment.num_slots = 0;
    const auto ep = run_episode(c, PolicyKind::Random, 5);
    EXPECT_TRUE(ep.per_slot.empty());
    EXPECT_TRUE(ep.cumulative_eta.empty());
}

TEST(Episode, Deterministic)
{
    const auto c = small_config();
    for (const auto p : kAllPolicies) {
        EXPECT_EQ(run_episode(c, p, 17, 3), run_episode(c, p, 17, 3));
    }
    EXPECT_NE(run_episode(c, PolicyKind::Random, 17, 3), run_episode(c, PolicyKind::Random, 18, 3));
}

TEST(Episode, LockstepEqualsIndividual)
{
    const auto c = small_config(40);
    const auto joint = run_episodes(c, kAllPolicies, 23, 5);
    ASSERT_EQ(joint.size(), 4u);
    for (std::size_t p = 0; p < 4; ++p) {
        EXPECT_EQ(joint[p], run_episode(c, kAllPolicies[p], 23, 5));
    }
}

TEST(Episode, OmaCapacityAndInvariants)
{
    const auto c = small_config(60);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (const auto& ep : run_episodes(c, kAllPolicies, seed)) {
            double prev_rev = 0.0;
            for (std::size_t t = 0; t < ep.per_slot.size(); ++t) {
                const auto& s = ep.per_slot[t];
                EXPECT_EQ(s.constraint_violations, 0u);
                EXPECT_GE(s.eta, 0.0);
                EXPECT_LE(s.eta, 1.0);
                EXPECT_LE(s.revenue, s.r_max);
                EXPECT_LE(s.admitted_count, s.active_due);
                if (ep.policy == PolicyKind::AllOma) {
                    EXPECT_LE(s.admitted_count, c.experiment.num_cue_m);
                }
                EXPECT_GE(ep.cumulative_revenue[t], prev_rev);
                prev_rev = ep.cumulative_revenue[t];
                EXPECT_GE(ep.cumulative_eta[t], 0.0);
                EXPECT_LE(ep.cumulative_eta[t], 1.0);
            }
        }
    }
}

TEST(Episode, DeparturesShrinkPopulation)
{
    auto c = small_config(80);
    c.experiment.due_departure_prob = 0.2;
    c.experiment.due_arrival_rate = 2.0;
    const auto ep = run_episode(c, PolicyKind::AllNoma, 4);
    bool shrank = false;
    for (std::size_t t = 1; t < ep.per_slot.size(); ++t) {
        shrank = shrank || ep.per_slot[t].active_due < ep.per_slot[t - 1].active_due;
        EXPECT_EQ(ep.per_slot[t].constraint_violations, 0u);
    }
    EXPECT_TRUE(shrank);
}

TEST(MonteCarlo, SingleRepHasZeroStd)
{
    const auto c = small_config(20, 1);
    const auto mc = run_monte_carlo(c, kAllPolicies);
    for (const auto& s : mc.series) {
        for (double v : s.std_cum_eta) {
            EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(MonteCarlo, DuplicatePolicyRowsIdentical)
{
    const auto c = small_config(20, 6);
    const PolicyKind twice[] = {PolicyKind::Random, PolicyKind::Random};
    const auto mc = run_monte_carlo(c, twice);
    EXPECT_EQ(mc.series[0], mc.series[1]);
}

TEST(MonteCarlo, ShapeAndBounds)
{
    const auto c = small_config(25, 10);
    const auto mc = run_monte_carlo(c, kAllPolicies);
    ASSERT_EQ(mc.series.size(), 4u);
    EXPECT_EQ(mc.reps, 10u);
    EXPECT_EQ(mc.constraint_violations, 0u);
    EXPECT_EQ(mc.normalization_violations, 0u);
    for (const auto& s : mc.series) {
        ASSERT_EQ(s.mean_cum_eta.size(), 25u);
        for (std::size_t t = 0; t < 25; ++t) {
            EXPECT_GE(s.mean_cum_eta[t], 0.0);
            EXPECT_LE(s.mean_cum_eta[t], 1.0);
            EXPECT_GE(s.std_cum_eta[t], 0.0);
        }
    }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResult)
{
    const auto c = small_config(30, 13);
    const auto one = run_monte_carlo(c, kAllPolicies, 1);
    EXPECT_EQ(one, run_monte_carlo(c, kAllPolicies, 3));
    EXPECT_EQ(one, run_monte_carlo(c, kAllPolicies, 8));
}

TEST(Policy, NamesRoundTrip)
{
    for (const auto p : kAllPolicies) {
        EXPECT_EQ(parse_policy(to_string(p)), p);
    }
    EXPECT_THROW(parse_policy("greedy"), std::invalid_argument);
}
