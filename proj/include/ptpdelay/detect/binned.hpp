#pragma once

#include "ptpdelay/net/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ptpdelay::detect
{

struct BinnedPacket
{
    std::int64_t bin = 0;
    std::uint32_t length = 0;
    net::Direction direction = net::Direction::master_to_slave;
    // Index of the kept observation in the discretized input.
    std::size_t source = 0;
};

/// 1 ms bins holding at most one packet each. Later packets landing in an
/// occupied bin are dropped and counted.
struct BinnedStream
{
    std::vector<BinnedPacket> packets; // strictly increasing bin
    std::uint64_t collisions = 0;
    // One past the last bin of the observation window.
    std::int64_t end_bin = 0;

    [[nodiscard]] bool empty() const noexcept { return packets.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return packets.size(); }
};

// Input must be sorted by seen_at; throws InvariantViolation otherwise.
// `window_end_bin` extends end_bin past the last packet (0: last packet + 1).
[[nodiscard]] BinnedStream discretize(std::span<const net::Observation> observations, std::int64_t window_end_bin = 0);

/// A (length, direction) traffic class. With direction withheld every
/// packet maps to the master-to-slave variant of its length.
struct ClassKey
{
    std::uint32_t length = 0;
    net::Direction direction = net::Direction::master_to_slave;

    friend auto operator<=>(const ClassKey&, const ClassKey&) = default;
};

[[nodiscard]] inline ClassKey class_of(const BinnedPacket& p, bool use_direction)
{
    return {p.length, use_direction ? p.direction : net::Direction::master_to_slave};
}

// Bins of all packets in class `key`, ascending.
[[nodiscard]] std::vector<std::int64_t> class_positions(const BinnedStream& s, ClassKey key, bool use_direction);

} // namespace ptpdelay::detect
