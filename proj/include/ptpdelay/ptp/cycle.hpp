#pragma once

#include "ptpdelay/sim/time.hpp"

#include <cstdint>
#include <optional>

namespace ptpdelay::ptp
{

/// The four timestamps of one two-step synchronization round.
struct SyncCycle
{
    std::uint64_t seq = 0;
    std::optional<LocalTime> t_m1; // master-local Sync departure
    std::optional<LocalTime> t_s2; // slave-local Sync arrival
    std::optional<LocalTime> t_s3; // slave-local DelayReq departure
    std::optional<LocalTime> t_m4; // master-local DelayReq arrival
    // Slave-local DelayResp arrival. Not part of the offset math; used by the
    // second round-trip diagnostic.
    std::optional<LocalTime> t_s6;

    [[nodiscard]] bool complete() const noexcept { return t_m1 && t_s2 && t_s3 && t_m4; }

    static SyncCycle of(std::int64_t m1, std::int64_t s2, std::int64_t s3, std::int64_t m4, std::uint64_t seq = 0)
    {
        return {seq, LocalTime(m1), LocalTime(s2), LocalTime(s3), LocalTime(m4), std::nullopt};
    }
};

// RTD = (t_S2 − t_M1) + (t_M4 − t_S3). Throws IncompleteCycle.
[[nodiscard]] Duration compute_rtd(const SyncCycle& c);

// offset = t_S2 − t_M1 − RTD/2 with RTD/2 rounded toward zero. Positive: slave ahead.
[[nodiscard]] Duration compute_offset(const SyncCycle& c);

// True when RTD is odd, i.e. compute_offset dropped half a nanosecond.
[[nodiscard]] bool has_halving_remainder(const SyncCycle& c);

} // namespace ptpdelay::ptp
