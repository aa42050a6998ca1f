#pragma once

#include <cmath>

#include "colsim/errors.hpp"

namespace colsim {

/// Physical and timing constants of the sliced backhaul link.
struct LinkConfig {
    double slot_seconds = 0.010;   // tau
    double capacity_bps = 1.0e6;   // C_bh
    int num_blocks = 10;           // N
    int packet_bits = 512;         // L
    int buffer_packets = 100;      // Q, per slice
    int decision_slots = 10;       // D, slots between agent actions
    int episode_slots = 1000;      // T

    /// Bits the whole link carries in one slot.
    [[nodiscard]] double bits_per_slot() const { return slot_seconds * capacity_bps; }

    /// floor(n * tau * C_bh / (L * N)): packets that n blocks can move in one slot.
    [[nodiscard]] int packets_for_blocks(int n_blocks) const
    {
        // Rounded to the nearest bit first so that 0.01 * 1e6 is exactly 10000.
        const double bits = std::round(n_blocks * bits_per_slot() * 1e6) / 1e6;
        return static_cast<int>(std::floor(bits / (static_cast<double>(packet_bits) * num_blocks)));
    }

    /// Packets per slot with the full link assigned to one slice.
    [[nodiscard]] int max_packets_per_slot() const { return packets_for_blocks(num_blocks); }

    [[nodiscard]] int decisions_per_episode() const { return episode_slots / decision_slots; }

    void validate() const
    {
        if (!(slot_seconds > 0.0)) throw ConfigError("slot_seconds must be positive");
        if (!(capacity_bps > 0.0)) throw ConfigError("capacity_bps must be positive");
        if (num_blocks <= 0) throw ConfigError("num_blocks must be positive");
        if (packet_bits <= 0) throw ConfigError("packet_bits must be positive");
        if (buffer_packets <= 0) throw ConfigError("buffer_packets must be positive");
        if (decision_slots <= 0) throw ConfigError("decision_slots must be positive");
        if (episode_slots <= 0 || episode_slots % decision_slots != 0) {
            throw ConfigError("episode_slots must be a positive multiple of decision_slots");
        }
        if (max_packets_per_slot() <= 0) {
            throw ConfigError("link cannot carry a single packet per slot");
        }
    }
};

} // namespace colsim
