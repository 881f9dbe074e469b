#include "ptpdelay/ptp/cycle.hpp"

#include "ptpdelay/ptp/message.hpp"

#include <string>

namespace ptpdelay::ptp
{

namespace
{

void require_complete(const SyncCycle& c)
{
    if (!c.complete())
    {
        std::string missing;
        if (!c.t_m1) missing += " t_M1";
        if (!c.t_s2) missing += " t_S2";
        if (!c.t_s3) missing += " t_S3";
        if (!c.t_m4) missing += " t_M4";
        throw IncompleteCycle("sync cycle " + std::to_string(c.seq) + " is missing" + missing);
    }
}

} // namespace

std::string_view to_string(MessageKind k) noexcept
{
    switch (k)
    {
    case MessageKind::sync:
        return "Sync";
    case MessageKind::follow_up:
        return "FollowUp";
    case MessageKind::delay_req:
        return "DelayReq";
    case MessageKind::delay_resp:
        return "DelayResp";
    case MessageKind::announce:
        return "Announce";
    }
    return "?";
}

std::optional<MessageKind> parse_kind(std::string_view s) noexcept
{
    for (const auto k : kAllKinds)
    {
        if (to_string(k) == s)
        {
            return k;
        }
    }
    return std::nullopt;
}

Duration compute_rtd(const SyncCycle& c)
{
    require_complete(c);
    return (*c.t_s2 - *c.t_m1) + (*c.t_m4 - *c.t_s3);
}

Duration compute_offset(const SyncCycle& c)
{
    const Duration rtd = compute_rtd(c);
    return (*c.t_s2 - *c.t_m1) - rtd / 2;
}

bool has_halving_remainder(const SyncCycle& c)
{
    return compute_rtd(c).ns() % 2 != 0;
}

} // namespace ptpdelay::ptp
