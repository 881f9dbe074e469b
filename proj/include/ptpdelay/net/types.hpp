#pragma once

#include "ptpdelay/sim/time.hpp"

#include <cstdint>
#include <string_view>

namespace ptpdelay::net
{

enum class Direction : std::uint8_t
{
    master_to_slave,
    slave_to_master,
};

constexpr std::size_t index(Direction d) noexcept { return static_cast<std::size_t>(d); }
constexpr Direction opposite(Direction d) noexcept
{
    return d == Direction::master_to_slave ? Direction::slave_to_master : Direction::master_to_slave;
}

// "MS" / "SM", as used in every trace format.
std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view s);

/// What an on-path observer of encrypted traffic can see. No payload, port or
/// endpoint information is carried.
struct Observation
{
    SimTime seen_at;
    std::uint32_t wire_length = 0;
    Direction direction = Direction::master_to_slave;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Opaque identity of an in-flight envelope. The attack path receives this
/// token instead of the envelope so it can never inspect the payload.
struct EnvelopeHandle
{
    std::uint64_t id = 0;
};

/// A packet travelling over the encrypted tunnel.
struct Envelope
{
    std::uint64_t id = 0;
    // Opaque to netmodel and to the observer; the harness maps it to a message kind.
    std::uint32_t payload_tag = 0;
    std::uint32_t plain_length = 0;
    std::uint32_t wire_length = 0;
    SimTime send_time;
    Direction direction = Direction::master_to_slave;
    // Per-direction tunnel sequence number, consumed by replay protection.
    std::uint64_t seq = 0;

    [[nodiscard]] EnvelopeHandle handle() const noexcept { return {id}; }
};

} // namespace ptpdelay::net
