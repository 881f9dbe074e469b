#pragma once

#include "ptpdelay/net/types.hpp"
#include "ptpdelay/sim/time.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ptpdelay::ptp
{

enum class MessageKind : std::uint8_t
{
    sync,
    follow_up,
    delay_req,
    delay_resp,
    announce,
};

inline constexpr std::array<MessageKind, 5> kAllKinds{MessageKind::sync, MessageKind::follow_up, MessageKind::delay_req,
                                                      MessageKind::delay_resp, MessageKind::announce};

// Unencrypted on-wire lengths.
constexpr std::uint32_t plain_length(MessageKind k) noexcept
{
    switch (k)
    {
    case MessageKind::delay_req:
        return 96;
    case MessageKind::announce:
        return 106;
    default:
        return 86;
    }
}

constexpr net::Direction direction_of(MessageKind k) noexcept
{
    return k == MessageKind::delay_req ? net::Direction::slave_to_master : net::Direction::master_to_slave;
}

// "Sync", "FollowUp", "DelayReq", "DelayResp", "Announce".
std::string_view to_string(MessageKind k) noexcept;
std::optional<MessageKind> parse_kind(std::string_view s) noexcept;

struct PtpMessage
{
    MessageKind kind = MessageKind::sync;
    // Cycle sequence number (Announce uses its own counter).
    std::uint64_t seq = 0;
    // FollowUp carries t_M1, DelayResp carries t_M4.
    std::optional<LocalTime> timestamp;
};

} // namespace ptpdelay::ptp
