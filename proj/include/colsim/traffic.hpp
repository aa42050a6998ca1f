#pragma once

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/link_config.hpp"

namespace colsim {

enum class Slice : int { NonCritical = 0, Critical = 1 };
inline constexpr int kNumSlices = 2;

enum class AppKind : int { NCVO = 0, NCVI = 1, CVO = 2, CVI = 3 };
inline constexpr int kNumAppKinds = 4;

inline constexpr std::array<std::string_view, kNumAppKinds> kAppNames{"NCVO", "NCVI", "CVO", "CVI"};

inline std::string_view to_string(AppKind kind) { return kAppNames[static_cast<int>(kind)]; }

inline AppKind parse_app_kind(std::string_view name)
{
    for (int i = 0; i < kNumAppKinds; ++i) {
        if (kAppNames[i] == name) return static_cast<AppKind>(i);
    }
    throw ConfigError("unknown application '" + std::string(name) + "'");
}

struct AppProfile {
    AppKind kind = AppKind::NCVO;
    double bitrate_bps = 0.0;        // rate while active
    double delay_budget_slots = 1.0; // Delta_u
    Slice slice = Slice::NonCritical;
    bool is_onoff = false;
    double p_stay = 1.0;             // probability of keeping the on-off state for one slot

    [[nodiscard]] int slice_id() const { return static_cast<int>(slice); }
    /// Critical applications lose all utility past the budget.
    [[nodiscard]] bool hard_deadline() const { return slice == Slice::Critical; }

    void validate() const
    {
        if (!(bitrate_bps > 0.0)) throw ConfigError(std::string(to_string(kind)) + ": bitrate must be positive");
        if (!(delay_budget_slots >= 1.0)) {
            throw ConfigError(std::string(to_string(kind)) + ": delay budget must be at least one slot");
        }
        if (!(p_stay >= 0.0 && p_stay <= 1.0)) {
            throw ConfigError(std::string(to_string(kind)) + ": p_stay must lie in [0, 1]");
        }
    }
};

/// Builds a profile from table units (kb/s and ms).
inline AppProfile make_profile(AppKind kind, double kbps, double budget_ms, double p_stay, double slot_seconds)
{
    AppProfile p;
    p.kind = kind;
    p.bitrate_bps = kbps * 1000.0;
    p.delay_budget_slots = budget_ms / (slot_seconds * 1000.0);
    p.slice = (kind == AppKind::CVO || kind == AppKind::CVI) ? Slice::Critical : Slice::NonCritical;
    p.is_onoff = p.slice == Slice::Critical;
    p.p_stay = p.is_onoff ? p_stay : 1.0;
    return p;
}

/// The four default applications, indexed by AppKind.
inline std::array<AppProfile, kNumAppKinds> default_profiles(double slot_seconds = 0.010)
{
    return {
        make_profile(AppKind::NCVO, 25.0, 100.0, 0.9, slot_seconds),
        make_profile(AppKind::NCVI, 384.0, 300.0, 0.9, slot_seconds),
        make_profile(AppKind::CVO, 25.0, 75.0, 0.9, slot_seconds),
        make_profile(AppKind::CVI, 384.0, 100.0, 0.9, slot_seconds),
    };
}

struct Packet {
    int user_id = 0;
    int slice_id = 0;
    int arrival_slot = 0;

    friend bool operator==(const Packet&, const Packet&) = default;
};

enum class OnOff : int { Silent = 0, Active = 1 };

struct UserState {
    int user_id = 0;
    AppProfile profile;
    OnOff onoff = OnOff::Active;
    double bit_accumulator = 0.0; // generated bits not yet packetized, in [0, L)
};

/// Bits a profile generates in one active slot, snapped to a micro-bit grid so
/// that decimal rates such as 384 kb/s * 10 ms are exact.
inline double bits_per_active_slot(const AppProfile& profile, double slot_seconds)
{
    return std::round(profile.bitrate_bps * slot_seconds * 1e6) / 1e6;
}

/// Gives every user an application drawn uniformly from `profiles`.
template <std::uniform_random_bit_generator Rng>
std::vector<UserState> assign_applications(int num_users, std::span<const AppProfile> profiles, Rng& rng)
{
    if (num_users <= 0) throw ConfigError("num_users must be at least 1");
    if (profiles.empty()) throw ConfigError("no application profiles available");
    std::uniform_int_distribution<std::size_t> pick(0, profiles.size() - 1);
    std::bernoulli_distribution coin(0.5);
    std::vector<UserState> users;
    users.reserve(static_cast<std::size_t>(num_users));
    for (int u = 0; u < num_users; ++u) {
        UserState s;
        s.user_id = u;
        s.profile = profiles[pick(rng)];
        s.onoff = (s.profile.is_onoff && !coin(rng)) ? OnOff::Silent : OnOff::Active;
        users.push_back(s);
    }
    return users;
}

/// Re-draws the on-off state of existing users (uniform, the stationary
/// distribution of the symmetric chain) and clears their bit carry.
template <std::uniform_random_bit_generator Rng>
void reset_users(std::vector<UserState>& users, Rng& rng)
{
    std::bernoulli_distribution coin(0.5);
    for (auto& u : users) {
        u.bit_accumulator = 0.0;
        u.onoff = (u.profile.is_onoff && !coin(rng)) ? OnOff::Silent : OnOff::Active;
    }
}

/// One slot of the two-state Markov chain.
template <std::uniform_random_bit_generator Rng>
UserState step_onoff(UserState state, Rng& rng)
{
    expects(state.profile.is_onoff, "step_onoff called on a constant-bitrate profile");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    if (uni(rng) >= state.profile.p_stay) {
        state.onoff = state.onoff == OnOff::Active ? OnOff::Silent : OnOff::Active;
    }
    return state;
}

/// Adds one slot worth of bits and cuts full packets out of the carry.
/// Emitted packets are appended to `out`; returns how many were emitted.
inline int generate_packets(UserState& state, int slot, double slot_seconds, int packet_bits, std::vector<Packet>& out)
{
    if (state.onoff == OnOff::Silent) return 0;
    state.bit_accumulator += bits_per_active_slot(state.profile, slot_seconds);
    const int count = static_cast<int>(std::floor(state.bit_accumulator / packet_bits));
    state.bit_accumulator -= static_cast<double>(count) * packet_bits;
    for (int i = 0; i < count; ++i) {
        out.push_back(Packet{state.user_id, state.profile.slice_id(), slot});
    }
    return count;
}

inline std::vector<Packet> generate_packets(UserState& state, int slot, const LinkConfig& link)
{
    std::vector<Packet> out;
    generate_packets(state, slot, link.slot_seconds, link.packet_bits, out);
    return out;
}

} // namespace colsim
