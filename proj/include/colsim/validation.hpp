#pragma once

// Self-checks behind `colsim validate` and the fast acceptance criteria.
// Every expected value here comes from an independent route: closed-form
// arithmetic, a hand trace, or finite differences.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "colsim/harness.hpp"
#include "colsim/neuralnet.hpp"
#include "colsim/scheduler.hpp"
#include "colsim/slicing_env.hpp"

namespace colsim::validation {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail; // first failure, or a short summary
    std::string digest; // values produced, for byte-level determinism checks
};

namespace detail {

class Recorder {
public:
    explicit Recorder(std::string name) { result_.name = std::move(name); }

    void expect(bool ok, const std::string& what)
    {
        if (!ok && result_.passed) {
            result_.passed = false;
            result_.detail = what;
        }
    }
    void log(const std::string& key, double value)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        result_.digest += key + "=" + buf + ";";
    }
    CheckResult finish(std::string summary)
    {
        if (result_.passed) result_.detail = std::move(summary);
        return result_;
    }

private:
    CheckResult result_;
};

inline SliceBuffer filled_buffer(int slice, int count, int arrival_slot = 0)
{
    SliceBuffer b;
    b.slice_id = slice;
    b.capacity = 100;
    for (int i = 0; i < count; ++i) b.queue.push_back(Packet{0, slice, arrival_slot});
    return b;
}

} // namespace detail

/// chi/omega/utility unit values and the 3-slot single-NCVI hand trace.
inline CheckResult environment_oracles()
{
    detail::Recorder rec("environment oracle equivalence");
    const LinkConfig link;
    const auto profiles = default_profiles();

    std::vector<DeliveredPacket> sent;
    auto q50 = detail::filled_buffer(0, 50);
    const int chi4 = transmit(q50, 4, 5, link, sent);
    rec.log("chi4", chi4);
    rec.expect(chi4 == 7, "chi(50 queued, 4 blocks) != 7");
    auto q50b = detail::filled_buffer(0, 50);
    const int chi10 = transmit(q50b, 10, 5, link, sent);
    rec.log("chi10", chi10);
    rec.expect(chi10 == 19, "chi(50 queued, 10 blocks) != 19");

    auto q91 = detail::filled_buffer(0, 91);
    std::vector<Packet> arrivals(15, Packet{0, 0, 1});
    std::vector<Packet> dropped;
    const int omega = enqueue_with_overflow(q91, arrivals, dropped);
    rec.log("omega", omega);
    rec.expect(omega == 6 && q91.size() == 100, "overflow of 91 + 15 did not drop 6");

    const AppProfile& ncvi = profiles[static_cast<int>(AppKind::NCVI)];
    const AppProfile& cvi = profiles[static_cast<int>(AppKind::CVI)];
    rec.log("f_ncvi_60", utility(ncvi, 60));
    rec.expect(utility(ncvi, 60) == 0.5, "f_NCVI(60) != 0.5");
    rec.expect(utility(cvi, 10) == 1.0, "f_CVI(10) != 1");
    rec.expect(utility(cvi, 11) == 0.0, "f_CVI(11) != 0");

    // Hand trace: one NCVI user, all ten blocks on the non-critical slice.
    // slot 0: 3840 b -> 7 packets (256 b carry); slot 1: deliver 7 at delay 1,
    // 4096 b -> 8 packets; slot 2: deliver 8 at delay 1.
    EnvConfig ec;
    SlicingEnv env(ec);
    UserState user;
    user.user_id = 0;
    user.profile = ncvi;
    env.set_users({user});
    env.set_allocation(Allocation{{10, 0}});
    std::vector<int> chis;
    std::vector<double> phis;
    bool delays_ok = true;
    env.set_slot_observer([&](const SlotOutcome& o) {
        chis.push_back(o.chi[0]);
        phis.push_back(o.phi);
        for (const auto& d : o.delivered[0]) delays_ok = delays_ok && d.delay == 1;
    });
    std::mt19937_64 rng(1);
    for (int t = 0; t < 3; ++t) env.run_slot(env.allocation(), rng);
    rec.expect(chis == std::vector<int>{0, 7, 8}, "hand trace delivered counts differ from (0, 7, 8)");
    rec.expect(delays_ok, "hand trace delivered a packet with delay != 1");
    rec.expect(phis.size() == 3 && phis[0] == 0.0 && phis[1] == 1.0 && phis[2] == 1.0,
               "hand trace slot utilities differ from (0, 1, 1)");
    rec.expect(env.generated(0) == 7 + 8 + 7, "hand trace generated count != 22");
    for (double p : phis) rec.log("phi", p);
    return rec.finish("chi(4)=7, chi(10)=19, omega=6, f_NCVI(60)=0.5, CVI edge 10/11, 3-slot trace");
}

/// Random short simulations: packet conservation, utility bounds and the
/// allocation total in every slot.
inline CheckResult conservation_property(int simulations = 100, int episodes = 10)
{
    detail::Recorder rec("packet conservation and reward bounds");
    const std::vector<StrategyMode> modes{StrategyMode{Mode::Constant, 3}, StrategyMode{Mode::Ideal, 0},
                                          StrategyMode{Mode::Constant, 5}, StrategyMode{Mode::Adaptive, 2}};
    std::int64_t slots = 0;
    for (int sim = 0; sim < simulations; ++sim) {
        EnvConfig ec;
        ec.num_users = 1 + sim % 7;
        ScheduleParams sp;
        sp.k_avg = 2;
        const auto& mode = modes[static_cast<std::size_t>(sim) % modes.size()];
        CoherenceRun run(ec, AgentParams{}, sp, mode, 5000, 1000 + static_cast<std::uint64_t>(sim));
        const int n_blocks = ec.link.num_blocks;
        run.env().set_slot_observer([&](const SlotOutcome& o) {
            ++slots;
            rec.expect(o.phi >= 0.0 && o.phi <= 1.0, "slot utility outside [0, 1]");
            int total = 0;
            for (int b : o.blocks) {
                total += b;
                rec.expect(b >= 0, "negative allocation");
            }
            rec.expect(total == 0 || total == n_blocks, "allocation total not in {0, N}");
            for (std::size_t s = 0; s < o.delivered.size(); ++s) {
                rec.expect(static_cast<int>(o.delivered[s].size()) == o.chi[s], "|delivered| != chi");
                rec.expect(static_cast<int>(o.dropped[s].size()) == o.omega[s], "|dropped| != omega");
                for (const auto& d : o.delivered[s]) rec.expect(d.delay >= 1, "delivered packet with delay < 1");
            }
        });
        double reward_sum = 0.0;
        for (int k = 0; k < episodes; ++k) {
            const auto s = run.step_episode();
            rec.expect(s.result.mean_reward >= 0.0 && s.result.mean_reward <= 1.0, "episode reward outside [0, 1]");
            reward_sum += s.result.mean_reward;
        }
        for (int sl = 0; sl < kNumSlices; ++sl) {
            const auto& env = run.env();
            const std::int64_t queued = env.buffers()[static_cast<std::size_t>(sl)].size();
            rec.expect(env.generated(sl) == env.delivered(sl) + env.dropped(sl) + queued + env.flushed(sl),
                       "generated != delivered + dropped + queued");
            rec.expect(queued <= ec.link.buffer_packets, "buffer above capacity");
            rec.log("gen", static_cast<double>(env.generated(sl)));
            rec.log("drop", static_cast<double>(env.dropped(sl)));
        }
        rec.log("reward", reward_sum);
    }
    return rec.finish(std::to_string(simulations) + " simulations, " + std::to_string(slots) + " slots checked");
}

/// Central finite differences of the squared TD error against backprop.
inline CheckResult gradient_check(int instances = 100, double h = 1e-5, double rel_tol = 1e-4, double abs_floor = 1e-7)
{
    detail::Recorder rec("gradient correctness");
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    std::size_t coords = 0;
    for (int n = 0; n < instances; ++n) {
        ValueNet net = init_net(8, 3, rng);
        for (int l = 0; l < ValueNet::kLayers; ++l) {
            for (double& b : net.bias(l)) b = 0.1 * normal(rng);
        }
        std::vector<double> x(8);
        for (double& v : x) v = normal(rng);
        const int action = static_cast<int>(rng() % 3);
        const double target = 2.0 * normal(rng);
        const ValueNet grad = grad_td_loss(net, x, action, target);
        auto loss = [&](const ValueNet& m) {
            const double r = forward(m, x)[static_cast<std::size_t>(action)] - target;
            return r * r;
        };
        ValueNet probe = net;
        for (std::size_t i = 0; i < net.size(); ++i) {
            const double keep = probe.params()[i];
            probe.params()[i] = keep + h;
            const double up = loss(probe);
            probe.params()[i] = keep - h;
            const double down = loss(probe);
            probe.params()[i] = keep;
            const double fd = (up - down) / (2.0 * h);
            const double g = grad.params()[i];
            const double err = std::abs(g - fd);
            const double allowed = std::max(abs_floor, rel_tol * std::max(std::abs(g), std::abs(fd)));
            worst = std::max(worst, err / allowed);
            ++coords;
            if (err > allowed) {
                rec.expect(false, "instance " + std::to_string(n) + " coordinate " + std::to_string(i) +
                                      ": backprop " + std::to_string(g) + " vs finite difference " + std::to_string(fd));
            }
        }
        rec.log("g0", grad.params()[0]);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu coordinates, worst error/allowance %.3g", coords, worst);
    return rec.finish(buf);
}

/// Tuples per update phase against floor(T*1e5/704) and floor((T*1e5 - 92256)/704).
inline CheckResult channel_budget_arithmetic()
{
    detail::Recorder rec("channel-budget arithmetic");
    const LinkConfig link;
    const ScheduleParams sched;
    for (int t = 0; t <= 5; ++t) {
        for (bool syncs : {false, true}) {
            EpisodePlan plan;
            plan.update_decisions = t;
            plan.exploit_decisions = 100 - t;
            plan.sync_episode = syncs && t > 0;
            const ChannelBudget b = channel_budget(plan, link, sched);
            const std::int64_t bits = static_cast<std::int64_t>(t) * 100000;
            const std::int64_t expected = plan.sync_episode ? std::max<std::int64_t>(0, (bits - 92256) / 704) : bits / 704;
            rec.log("tr", b.transitions);
            rec.expect(b.bits_available == bits, "bits for T_rho=" + std::to_string(t) + " != T_rho * 1e5");
            rec.expect(b.transitions == expected, "transitions for T_rho=" + std::to_string(t) +
                                                      (syncs ? " (sync)" : "") + " = " + std::to_string(b.transitions) +
                                                      ", expected " + std::to_string(expected));
        }
    }
    EpisodePlan two{100, 98, 2, false};
    EpisodePlan one_sync{100, 99, 1, true};
    rec.expect(channel_budget(two, link, sched).transitions == 284, "(T_rho=2, non-sync) != 284");
    // 100000 - 92256 = 7744 = 11 * 704 exactly
    rec.expect(channel_budget(one_sync, link, sched).transitions == 11, "(T_rho=1, sync) != 11");
    return rec.finish("T_rho 0..5 x {sync, non-sync}; (2, non-sync)=284, (1, sync)=11");
}

inline std::vector<CheckResult> quick_suite()
{
    return {environment_oracles(), conservation_property(), gradient_check(), channel_budget_arithmetic()};
}

} // namespace colsim::validation
