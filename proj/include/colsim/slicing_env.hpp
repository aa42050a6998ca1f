#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/link_config.hpp"
#include "colsim/traffic.hpp"

namespace colsim {

/// Per-slice FIFO at the base station. Head is the oldest packet.
struct SliceBuffer {
    int slice_id = 0;
    int capacity = 100;
    std::deque<Packet> queue;

    [[nodiscard]] int size() const { return static_cast<int>(queue.size()); }
};

/// Resource blocks per slice.
struct Allocation {
    std::vector<int> blocks;

    [[nodiscard]] int total() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }
    [[nodiscard]] int slices() const { return static_cast<int>(blocks.size()); }

    static Allocation even_split(int num_slices, int num_blocks)
    {
        Allocation a;
        a.blocks.assign(static_cast<std::size_t>(num_slices), num_blocks / num_slices);
        for (int i = 0; i < num_blocks % num_slices; ++i) ++a.blocks[static_cast<std::size_t>(i)];
        return a;
    }
    static Allocation zero(int num_slices) { return Allocation{std::vector<int>(static_cast<std::size_t>(num_slices), 0)}; }

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct DeliveredPacket {
    Packet packet;
    int delay = 0; // slots
};

struct SlotOutcome {
    int slot = 0;
    std::vector<int> blocks; // allocation in force during the slot
    std::vector<std::vector<DeliveredPacket>> delivered;
    std::vector<std::vector<Packet>> dropped;
    std::vector<int> chi;
    std::vector<int> omega;
    double phi = 0.0;
};

using StateVector = std::vector<double>;

// ---------------------------------------------------------------------------
// Actions. 0 keeps the allocation; the rest enumerate ordered slice pairs
// (donor, receiver) in lexicographic order.

inline constexpr int num_actions(int num_slices) { return 1 + num_slices * (num_slices - 1); }

struct BlockMove {
    int donor = 0;
    int receiver = 0;
};

inline BlockMove decode_action(int action, int num_slices)
{
    expects(action >= 1 && action < num_actions(num_slices), "action index out of range");
    int k = action - 1;
    const int donor = k / (num_slices - 1);
    int receiver = k % (num_slices - 1);
    if (receiver >= donor) ++receiver;
    return {donor, receiver};
}

inline bool action_valid(const Allocation& alloc, int action)
{
    if (action == 0) return true;
    if (action < 0 || action >= num_actions(alloc.slices())) return false;
    return alloc.blocks[static_cast<std::size_t>(decode_action(action, alloc.slices()).donor)] >= 1;
}

inline Allocation apply_action(Allocation alloc, int action)
{
    expects(action >= 0 && action < num_actions(alloc.slices()), "action index out of range");
    if (action == 0) return alloc;
    const auto [donor, receiver] = decode_action(action, alloc.slices());
    if (alloc.blocks[static_cast<std::size_t>(donor)] < 1) {
        throw ContractViolation("invalid action: donor slice has no resource block");
    }
    --alloc.blocks[static_cast<std::size_t>(donor)];
    ++alloc.blocks[static_cast<std::size_t>(receiver)];
    return alloc;
}

// ---------------------------------------------------------------------------
// Queue dynamics.

/// Sends the chi oldest packets. Delivered packets are appended to `out`.
inline int transmit(SliceBuffer& buffer, int n_blocks, int current_slot, const LinkConfig& link,
                    std::vector<DeliveredPacket>& out)
{
    expects(n_blocks >= 0 && n_blocks <= link.num_blocks, "block count out of range");
    const int chi = std::min(buffer.size(), link.packets_for_blocks(n_blocks));
    for (int i = 0; i < chi; ++i) {
        const Packet& p = buffer.queue.front();
        out.push_back(DeliveredPacket{p, current_slot - p.arrival_slot});
        buffer.queue.pop_front();
    }
    return chi;
}

/// Appends arrivals, then discards the oldest packets beyond capacity.
/// Dropped packets are appended to `dropped`; returns omega.
inline int enqueue_with_overflow(SliceBuffer& buffer, std::span<const Packet> arrivals, std::vector<Packet>& dropped)
{
    for (const Packet& p : arrivals) {
        expects(p.slice_id == buffer.slice_id, "arrival belongs to another slice");
        buffer.queue.push_back(p);
    }
    const int omega = std::max(0, buffer.size() - buffer.capacity);
    for (int i = 0; i < omega; ++i) {
        dropped.push_back(buffer.queue.front());
        buffer.queue.pop_front();
    }
    return omega;
}

inline constexpr double kDropped = std::numeric_limits<double>::infinity();

/// Delay utility in [0, 1]. Soft budgets decay as Delta/delay, hard budgets
/// are a step at Delta. Dropped packets (infinite delay) are worth 0.
inline double utility(const AppProfile& profile, double delay)
{
    if (delay == kDropped) return 0.0;
    if (delay <= 0.0) return 1.0;
    if (profile.hard_deadline()) return delay <= profile.delay_budget_slots ? 1.0 : 0.0;
    return std::min(1.0, profile.delay_budget_slots / delay);
}

/// System utility of one slot: per-slice sum of delivered utility over
/// (chi + omega), averaged over the slices flagged in `slice_has_users`.
/// A slice that neither delivers nor drops scores 0.
inline double slot_reward(const std::vector<std::vector<DeliveredPacket>>& delivered,
                          const std::vector<std::vector<Packet>>& dropped, std::span<const UserState> users,
                          std::span<const bool> slice_has_users)
{
    double sum = 0.0;
    int counted = 0;
    for (std::size_t s = 0; s < delivered.size(); ++s) {
        if (!slice_has_users[s]) continue;
        ++counted;
        const std::size_t handled = delivered[s].size() + dropped[s].size();
        if (handled == 0) continue;
        double score = 0.0;
        for (const auto& d : delivered[s]) {
            score += utility(users[static_cast<std::size_t>(d.packet.user_id)].profile, d.delay);
        }
        sum += score / static_cast<double>(handled);
    }
    return counted == 0 ? 0.0 : sum / counted;
}

// ---------------------------------------------------------------------------
// State encoding.

struct StateScale {
    int buffer_packets = 100;
    double max_delay_budget = 30.0; // largest Delta_u, slots
    int max_packets_per_slot = 19;
};

inline double normalized_slack(double budget, int delay, double max_budget)
{
    return std::clamp(budget - delay, -max_budget, max_budget) / max_budget;
}

/// Four features per slice, in slice order: occupancy, mean slack, min slack,
/// packets deliverable this slot under the previous allocation.
inline StateVector build_state(std::span<const SliceBuffer> buffers, const Allocation& prev_alloc,
                               std::span<const UserState> users, int current_slot, const LinkConfig& link,
                               const StateScale& scale)
{
    StateVector x;
    x.reserve(buffers.size() * 4);
    for (std::size_t s = 0; s < buffers.size(); ++s) {
        const auto& q = buffers[s].queue;
        x.push_back(static_cast<double>(q.size()) / scale.buffer_packets);
        if (q.empty()) {
            x.push_back(1.0);
            x.push_back(1.0);
        } else {
            double total = 0.0;
            double lowest = std::numeric_limits<double>::infinity();
            for (const Packet& p : q) {
                const double budget = users[static_cast<std::size_t>(p.user_id)].profile.delay_budget_slots;
                const double v = normalized_slack(budget, current_slot - p.arrival_slot, scale.max_delay_budget);
                total += v;
                lowest = std::min(lowest, v);
            }
            x.push_back(total / static_cast<double>(q.size()));
            x.push_back(lowest);
        }
        const int deliverable = std::min(static_cast<int>(q.size()), link.packets_for_blocks(prev_alloc.blocks[s]));
        x.push_back(static_cast<double>(deliverable) / scale.max_packets_per_slot);
    }
    return x;
}

// ---------------------------------------------------------------------------

struct EnvConfig {
    LinkConfig link;
    std::array<AppProfile, kNumAppKinds> profiles = default_profiles();
    int num_users = 5;
    /// When non-empty, users keep these applications every episode.
    std::vector<AppKind> fixed_apps;

    [[nodiscard]] double max_delay_budget() const
    {
        double m = 0.0;
        for (const auto& p : profiles) m = std::max(m, p.delay_budget_slots);
        return m;
    }

    [[nodiscard]] StateScale state_scale() const
    {
        return StateScale{link.buffer_packets, max_delay_budget(), link.max_packets_per_slot()};
    }

    void validate() const
    {
        link.validate();
        for (const auto& p : profiles) p.validate();
        if (fixed_apps.empty() && num_users <= 0) throw ConfigError("num_users must be at least 1");
    }
};

struct IntervalResult {
    StateVector state;
    double mean_phi = 0.0;
};

/// Discrete-time backhaul with one FIFO per slice. Each slot runs: on-off
/// transitions, transmission, packet generation, enqueue with overflow,
/// reward.
class SlicingEnv {
public:
    using SlotObserver = std::function<void(const SlotOutcome&)>;

    explicit SlicingEnv(EnvConfig config) : config_(std::move(config)), scale_(config_.state_scale())
    {
        config_.validate();
        buffers_.resize(kNumSlices);
        for (int s = 0; s < kNumSlices; ++s) {
            buffers_[static_cast<std::size_t>(s)].slice_id = s;
            buffers_[static_cast<std::size_t>(s)].capacity = config_.link.buffer_packets;
        }
        alloc_ = Allocation::even_split(kNumSlices, config_.link.num_blocks);
        outcome_.delivered.resize(kNumSlices);
        outcome_.dropped.resize(kNumSlices);
        outcome_.chi.resize(kNumSlices);
        outcome_.omega.resize(kNumSlices);
        arrivals_.resize(kNumSlices);
        generated_.fill(0);
        delivered_.fill(0);
        dropped_.fill(0);
    }

    /// Empties buffers, restores the even split and (re)assigns applications.
    template <std::uniform_random_bit_generator Rng>
    void reset(Rng& rng)
    {
        for (auto& b : buffers_) b.queue.clear();
        alloc_ = Allocation::even_split(kNumSlices, config_.link.num_blocks);
        if (config_.fixed_apps.empty()) {
            users_ = assign_applications(config_.num_users, std::span<const AppProfile>(config_.profiles), rng);
        } else {
            if (users_.empty()) {
                for (std::size_t u = 0; u < config_.fixed_apps.size(); ++u) {
                    UserState s;
                    s.user_id = static_cast<int>(u);
                    s.profile = config_.profiles[static_cast<std::size_t>(config_.fixed_apps[u])];
                    users_.push_back(s);
                }
            }
            reset_users(users_, rng);
        }
        slice_has_users_.fill(false);
        for (const auto& u : users_) slice_has_users_[static_cast<std::size_t>(u.profile.slice_id())] = true;
        slot_ = 0;
    }

    [[nodiscard]] StateVector state() const
    {
        return build_state(buffers_, alloc_, users_, slot_, config_.link, scale_);
    }

    /// Applies `action` and runs one decision interval under the new allocation.
    template <std::uniform_random_bit_generator Rng>
    IntervalResult step_decision_interval(int action, Rng& rng)
    {
        alloc_ = apply_action(alloc_, action);
        return run_interval(alloc_, rng);
    }

    /// Runs one decision interval with no blocks for user data.
    template <std::uniform_random_bit_generator Rng>
    IntervalResult step_update_interval(Rng& rng)
    {
        return run_interval(Allocation::zero(kNumSlices), rng);
    }

    /// Runs a single slot under `alloc` and returns its utility.
    template <std::uniform_random_bit_generator Rng>
    double run_slot(const Allocation& alloc, Rng& rng)
    {
        expects(alloc.slices() == kNumSlices, "allocation has wrong slice count");
        const LinkConfig& link = config_.link;
        outcome_.slot = slot_;
        outcome_.blocks = alloc.blocks;
        for (int s = 0; s < kNumSlices; ++s) {
            outcome_.delivered[static_cast<std::size_t>(s)].clear();
            outcome_.dropped[static_cast<std::size_t>(s)].clear();
            arrivals_[static_cast<std::size_t>(s)].clear();
        }
        for (auto& u : users_) {
            if (u.profile.is_onoff) u = step_onoff(u, rng);
        }
        for (int s = 0; s < kNumSlices; ++s) {
            const auto i = static_cast<std::size_t>(s);
            outcome_.chi[i] = transmit(buffers_[i], alloc.blocks[i], slot_, link, outcome_.delivered[i]);
            delivered_[i] += outcome_.chi[i];
        }
        for (auto& u : users_) {
            const auto i = static_cast<std::size_t>(u.profile.slice_id());
            generated_[i] += generate_packets(u, slot_, link.slot_seconds, link.packet_bits, arrivals_[i]);
        }
        for (int s = 0; s < kNumSlices; ++s) {
            const auto i = static_cast<std::size_t>(s);
            outcome_.omega[i] = enqueue_with_overflow(buffers_[i], arrivals_[i], outcome_.dropped[i]);
            dropped_[i] += outcome_.omega[i];
        }
        outcome_.phi = slot_reward(outcome_.delivered, outcome_.dropped, users_, slice_has_users_);
        if (observer_) observer_(outcome_);
        ++slot_;
        return outcome_.phi;
    }

    void set_slot_observer(SlotObserver observer) { observer_ = std::move(observer); }

    [[nodiscard]] const EnvConfig& config() const { return config_; }
    [[nodiscard]] const Allocation& allocation() const { return alloc_; }
    [[nodiscard]] const std::vector<UserState>& users() const { return users_; }
    [[nodiscard]] const std::vector<SliceBuffer>& buffers() const { return buffers_; }
    [[nodiscard]] int slot() const { return slot_; }
    [[nodiscard]] int action_count() const { return num_actions(kNumSlices); }
    [[nodiscard]] int state_size() const { return 4 * kNumSlices; }

    /// Cumulative packet counters since construction, per slice.
    [[nodiscard]] std::int64_t generated(int slice) const { return generated_[static_cast<std::size_t>(slice)]; }
    [[nodiscard]] std::int64_t delivered(int slice) const { return delivered_[static_cast<std::size_t>(slice)]; }
    [[nodiscard]] std::int64_t dropped(int slice) const { return dropped_[static_cast<std::size_t>(slice)]; }
    /// Packets flushed by episode resets.
    [[nodiscard]] std::int64_t flushed(int slice) const { return flushed_[static_cast<std::size_t>(slice)]; }

    /// Counts packets still queued as flushed; call before reset() to keep
    /// the conservation ledger closed across episodes.
    void account_flush()
    {
        for (std::size_t s = 0; s < buffers_.size(); ++s) flushed_[s] += buffers_[s].size();
    }

    /// Test hook: places users directly (e.g. for hand traces).
    void set_users(std::vector<UserState> users)
    {
        users_ = std::move(users);
        slice_has_users_.fill(false);
        for (const auto& u : users_) slice_has_users_[static_cast<std::size_t>(u.profile.slice_id())] = true;
    }
    void set_allocation(Allocation alloc) { alloc_ = std::move(alloc); }

private:
    template <std::uniform_random_bit_generator Rng>
    IntervalResult run_interval(const Allocation& alloc, Rng& rng)
    {
        double sum = 0.0;
        for (int i = 0; i < config_.link.decision_slots; ++i) sum += run_slot(alloc, rng);
        return IntervalResult{state(), sum / config_.link.decision_slots};
    }

    EnvConfig config_;
    StateScale scale_;
    std::vector<SliceBuffer> buffers_;
    std::vector<UserState> users_;
    Allocation alloc_;
    std::array<bool, kNumSlices> slice_has_users_{};
    int slot_ = 0;
    SlotOutcome outcome_;
    std::vector<std::vector<Packet>> arrivals_;
    std::array<std::int64_t, kNumSlices> generated_{};
    std::array<std::int64_t, kNumSlices> delivered_{};
    std::array<std::int64_t, kNumSlices> dropped_{};
    std::array<std::int64_t, kNumSlices> flushed_{};
    SlotObserver observer_;
};

} // namespace colsim
