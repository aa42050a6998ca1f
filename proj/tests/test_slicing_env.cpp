#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "colsim/slicing_env.hpp"

using namespace colsim;

namespace {

SliceBuffer buffer_of(int slice, int count, int arrival = 0)
{
    SliceBuffer b;
    b.slice_id = slice;
    for (int i = 0; i < count; ++i) b.queue.push_back(Packet{0, slice, arrival + i});
    return b;
}

UserState user(int id, AppKind k)
{
    UserState u;
    u.user_id = id;
    u.profile = default_profiles()[static_cast<std::size_t>(k)];
    return u;
}

} // namespace

TEST(LinkConfig, PacketsPerSlot)
{
    const LinkConfig link;
    EXPECT_EQ(link.packets_for_blocks(0), 0);
    EXPECT_EQ(link.packets_for_blocks(1), 1);
    EXPECT_EQ(link.packets_for_blocks(4), 7);
    EXPECT_EQ(link.packets_for_blocks(10), 19);
    EXPECT_EQ(link.decisions_per_episode(), 100);
    LinkConfig bad;
    bad.episode_slots = 1005;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Transmit, Examples)
{
    const LinkConfig link;
    std::vector<DeliveredPacket> out;
    auto q = buffer_of(0, 50);
    EXPECT_EQ(transmit(q, 4, 60, link, out), 7);
    EXPECT_EQ(q.size(), 43);
    ASSERT_EQ(out.size(), 7u);
    EXPECT_EQ(out[0].delay, 60);
    EXPECT_EQ(out[6].delay, 54);

    auto full = buffer_of(0, 50);
    EXPECT_EQ(transmit(full, 10, 60, link, out), 19);

    auto empty = buffer_of(1, 0);
    for (int n = 0; n <= 10; ++n) EXPECT_EQ(transmit(empty, n, 3, link, out), 0);
    EXPECT_EQ(empty.size(), 0);
    EXPECT_THROW(transmit(empty, 11, 0, link, out), ContractViolation);
}

TEST(Transmit, MonotoneInBlocksAndQueue)
{
    const LinkConfig link;
    std::vector<DeliveredPacket> out;
    for (int len = 0; len <= 30; ++len) {
        int prev = -1;
        for (int n = 0; n <= 10; ++n) {
            auto q = buffer_of(0, len);
            const int chi = transmit(q, n, 100, link, out);
            EXPECT_GE(chi, prev);
            prev = chi;
            auto longer = buffer_of(0, len + 1);
            EXPECT_GE(transmit(longer, n, 100, link, out), chi);
        }
    }
}

TEST(Enqueue, OverflowDropsOldest)
{
    auto q = buffer_of(0, 91);
    std::vector<Packet> arrivals(15, Packet{1, 0, 500});
    std::vector<Packet> dropped;
    EXPECT_EQ(enqueue_with_overflow(q, arrivals, dropped), 6);
    EXPECT_EQ(q.size(), 100);
    ASSERT_EQ(dropped.size(), 6u);
    EXPECT_EQ(dropped[0].arrival_slot, 0);
    EXPECT_EQ(dropped[5].arrival_slot, 5);
    EXPECT_EQ(q.queue.front().arrival_slot, 6);
    EXPECT_EQ(q.queue.back().arrival_slot, 500);
}

TEST(Enqueue, NoOverflow)
{
    std::vector<Packet> dropped;
    auto q = buffer_of(0, 10);
    std::vector<Packet> five(5, Packet{0, 0, 9});
    EXPECT_EQ(enqueue_with_overflow(q, five, dropped), 0);
    EXPECT_EQ(q.size(), 15);
    auto full = buffer_of(0, 100);
    EXPECT_EQ(enqueue_with_overflow(full, {}, dropped), 0);
    EXPECT_TRUE(dropped.empty());
}

TEST(Enqueue, RejectsForeignSlice)
{
    auto q = buffer_of(0, 0);
    std::vector<Packet> wrong{Packet{0, 1, 0}};
    std::vector<Packet> dropped;
    EXPECT_THROW(enqueue_with_overflow(q, wrong, dropped), ContractViolation);
}

TEST(Utility, Examples)
{
    const auto p = default_profiles();
    const auto& ncvi = p[static_cast<std::size_t>(AppKind::NCVI)];
    const auto& cvi = p[static_cast<std::size_t>(AppKind::CVI)];
    EXPECT_EQ(utility(ncvi, 60), 0.5);
    EXPECT_EQ(utility(ncvi, 30), 1.0);
    EXPECT_EQ(utility(cvi, 10), 1.0);
    EXPECT_EQ(utility(cvi, 11), 0.0);
    for (const auto& prof : p) {
        EXPECT_EQ(utility(prof, 0), 1.0);
        EXPECT_EQ(utility(prof, kDropped), 0.0);
    }
}

TEST(SlotReward, Examples)
{
    const std::vector<UserState> users{user(0, AppKind::NCVI), user(1, AppKind::CVI)};
    const std::array<bool, 2> both{true, true};
    std::vector<std::vector<DeliveredPacket>> delivered(2);
    std::vector<std::vector<Packet>> dropped(2);
    EXPECT_EQ(slot_reward(delivered, dropped, users, both), 0.0);

    // NC slice: utilities {1, 0.5} plus one drop -> 0.5; C slice idle -> 0.
    delivered[0] = {DeliveredPacket{Packet{0, 0, 0}, 5}, DeliveredPacket{Packet{0, 0, 0}, 60}};
    dropped[0] = {Packet{0, 0, 0}};
    const std::array<bool, 2> nc_only{true, false};
    EXPECT_DOUBLE_EQ(slot_reward(delivered, dropped, users, nc_only), 0.5);
    EXPECT_DOUBLE_EQ(slot_reward(delivered, dropped, users, both), 0.25);

    delivered[0] = {DeliveredPacket{Packet{0, 0, 0}, 2}};
    dropped[0].clear();
    delivered[1] = {DeliveredPacket{Packet{1, 1, 0}, 10}};
    EXPECT_EQ(slot_reward(delivered, dropped, users, both), 1.0);
}

TEST(Actions, ApplyAndMask)
{
    const Allocation even{{5, 5}};
    EXPECT_EQ(num_actions(2), 3);
    EXPECT_EQ(apply_action(even, 1), (Allocation{{4, 6}}));
    EXPECT_EQ(apply_action(even, 2), (Allocation{{6, 4}}));
    EXPECT_EQ(apply_action(even, 0), even);
    const Allocation all_c{{0, 10}};
    EXPECT_FALSE(action_valid(all_c, 1));
    EXPECT_TRUE(action_valid(all_c, 2));
    EXPECT_THROW(apply_action(all_c, 1), ContractViolation);
    EXPECT_THROW(apply_action(even, 3), ContractViolation);
    EXPECT_EQ(decode_action(1, 2).donor, 0);
    EXPECT_EQ(decode_action(2, 2).donor, 1);
    EXPECT_EQ(Allocation::even_split(3, 10), (Allocation{{4, 3, 3}}));
}

TEST(BuildState, EmptySystem)
{
    const std::vector<SliceBuffer> buffers{buffer_of(0, 0), buffer_of(1, 0)};
    const EnvConfig ec;
    const auto x = build_state(buffers, Allocation{{5, 5}}, {}, 0, ec.link, ec.state_scale());
    EXPECT_EQ(x, (StateVector{0, 1, 1, 0, 0, 1, 1, 0}));
}

TEST(BuildState, SlackAndDeliverable)
{
    const EnvConfig ec;
    const std::vector<UserState> users{user(0, AppKind::NCVI), user(1, AppKind::CVI)};
    SliceBuffer nc = buffer_of(0, 0);
    for (int i = 0; i < 50; ++i) nc.queue.push_back(Packet{0, 0, 100});
    SliceBuffer c = buffer_of(1, 0);
    c.queue.push_back(Packet{1, 1, 96});
    const std::vector<SliceBuffer> buffers{nc, c};
    const auto x = build_state(buffers, Allocation{{4, 6}}, users, 100, ec.link, ec.state_scale());
    ASSERT_EQ(x.size(), 8u);
    EXPECT_DOUBLE_EQ(x[0], 0.5);
    EXPECT_DOUBLE_EQ(x[1], 1.0); // slack 30 of 30
    EXPECT_DOUBLE_EQ(x[3], 7.0 / 19.0);
    EXPECT_DOUBLE_EQ(x[4], 0.01);
    EXPECT_DOUBLE_EQ(x[5], 0.2);
    EXPECT_DOUBLE_EQ(x[6], 0.2);
    EXPECT_DOUBLE_EQ(x[7], 1.0 / 19.0);
}

TEST(BuildState, SlackIsClamped)
{
    EXPECT_EQ(normalized_slack(10, 500, 30), -1.0);
    EXPECT_EQ(normalized_slack(10, 4, 30), 0.2);
}

TEST(SlicingEnv, HandTraceSingleNcvi)
{
    SlicingEnv env(EnvConfig{});
    env.set_users({user(0, AppKind::NCVI)});
    env.set_allocation(Allocation{{10, 0}});
    std::vector<SlotOutcome> seen;
    env.set_slot_observer([&](const SlotOutcome& o) { seen.push_back(o); });
    std::mt19937_64 rng(1);
    for (int t = 0; t < 3; ++t) env.run_slot(env.allocation(), rng);
    ASSERT_EQ(seen.size(), 3u);
    EXPECT_EQ(seen[0].chi[0], 0);
    EXPECT_EQ(seen[1].chi[0], 7);
    EXPECT_EQ(seen[2].chi[0], 8);
    for (const auto& o : seen) {
        for (const auto& d : o.delivered[0]) EXPECT_EQ(d.delay, 1);
        EXPECT_EQ(o.omega[0], 0);
    }
    EXPECT_EQ(seen[0].phi, 0.0);
    EXPECT_EQ(seen[1].phi, 1.0);
    EXPECT_EQ(seen[2].phi, 1.0);
    EXPECT_EQ(env.buffers()[0].size(), 7);
}

TEST(SlicingEnv, ZeroTrafficInterval)
{
    EnvConfig ec;
    SlicingEnv env(ec);
    UserState silent = user(0, AppKind::CVO);
    silent.onoff = OnOff::Silent;
    silent.profile.p_stay = 1.0;
    env.set_users({silent});
    std::mt19937_64 rng(1);
    const auto r = env.step_decision_interval(0, rng);
    EXPECT_EQ(r.mean_phi, 0.0);
    EXPECT_EQ(env.buffers()[0].size() + env.buffers()[1].size(), 0);
    EXPECT_EQ(env.slot(), 10);
}

TEST(SlicingEnv, UpdateIntervalSendsNothing)
{
    SlicingEnv env(EnvConfig{});
    std::mt19937_64 rng(6);
    env.reset(rng);
    bool any_sent = false;
    env.set_slot_observer([&](const SlotOutcome& o) {
        for (int c : o.chi) any_sent = any_sent || c != 0;
        for (int b : o.blocks) any_sent = any_sent || b != 0;
    });
    std::vector<int> sizes;
    for (int k = 0; k < 20; ++k) {
        env.step_update_interval(rng);
        sizes.push_back(env.buffers()[0].size() + env.buffers()[1].size());
    }
    EXPECT_FALSE(any_sent);
    for (std::size_t i = 1; i < sizes.size(); ++i) EXPECT_GE(sizes[i], sizes[i - 1]);
    EXPECT_EQ(env.allocation(), (Allocation{{5, 5}}));
}

TEST(SlicingEnv, ResetRestoresEvenSplitAndFixedApps)
{
    EnvConfig ec;
    ec.fixed_apps = {AppKind::NCVI, AppKind::CVI};
    SlicingEnv env(ec);
    std::mt19937_64 rng(2);
    env.reset(rng);
    env.step_decision_interval(1, rng);
    EXPECT_EQ(env.allocation(), (Allocation{{4, 6}}));
    env.reset(rng);
    EXPECT_EQ(env.allocation(), (Allocation{{5, 5}}));
    EXPECT_EQ(env.slot(), 0);
    ASSERT_EQ(env.users().size(), 2u);
    EXPECT_EQ(env.users()[0].profile.kind, AppKind::NCVI);
    EXPECT_EQ(env.users()[1].profile.kind, AppKind::CVI);
    EXPECT_EQ(env.buffers()[0].size(), 0);
}

TEST(SlicingEnvProperty, ConservationBoundsAndFifo)
{
    std::mt19937_64 rng(77);
    for (int sim = 0; sim < 30; ++sim) {
        EnvConfig ec;
        ec.num_users = 1 + sim % 6;
        SlicingEnv env(ec);
        bool ok = true;
        env.set_slot_observer([&](const SlotOutcome& o) {
            ok = ok && o.phi >= 0.0 && o.phi <= 1.0;
            int total = 0;
            for (int b : o.blocks) total += b;
            ok = ok && (total == 0 || total == 10);
            for (const auto& slice : o.delivered) {
                for (std::size_t i = 0; i < slice.size(); ++i) {
                    ok = ok && slice[i].delay >= 1;
                    if (i > 0) ok = ok && slice[i].delay <= slice[i - 1].delay;
                }
            }
        });
        std::uniform_int_distribution<int> pick(0, 2);
        for (int episode = 0; episode < 3; ++episode) {
            env.account_flush();
            env.reset(rng);
            for (int k = 0; k < 100; ++k) {
                if (k >= 95) {
                    env.step_update_interval(rng);
                    continue;
                }
                int a = pick(rng);
                if (!action_valid(env.allocation(), a)) a = 0;
                env.step_decision_interval(a, rng);
                ASSERT_EQ(env.allocation().total(), 10);
            }
        }
        ASSERT_TRUE(ok) << "simulation " << sim;
        for (int s = 0; s < kNumSlices; ++s) {
            EXPECT_EQ(env.generated(s),
                      env.delivered(s) + env.dropped(s) + env.buffers()[static_cast<std::size_t>(s)].size() + env.flushed(s));
        }
    }
}
