#pragma once

#include "ptpdelay/ptp/cycle.hpp"
#include "ptpdelay/ptp/message.hpp"
#include "ptpdelay/sim/clock.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ptpdelay::ptp
{

struct EngineConfig
{
    Duration sync_interval = Duration(250'000'000);
    Duration announce_interval = Duration(2'000'000'000);
    // First Announce goes out at this offset, away from the Sync grid.
    Duration announce_offset = Duration(125'000'000);
    // t0: master FollowUp lag after Sync.
    Duration followup_lag = Duration(2'000'000);
    // t1: slave DelayReq lag after FollowUp arrival.
    Duration delayreq_lag = Duration(3'000'000);
    // Master turnaround from DelayReq arrival to DelayResp departure.
    Duration delayresp_lag{};
    Duration first_sync{};

    void validate() const;
};

/// Per-cycle timing. Fixed configs return the same lags every cycle; the
/// traffic-analysis countermeasure draws them at random.
struct CycleLags
{
    Duration sync_offset{};
    Duration followup_lag{};
    Duration delayreq_lag{};
};

using LagSource = std::function<CycleLags(std::uint64_t seq)>;

[[nodiscard]] LagSource fixed_lags(const EngineConfig& config);

struct Emission
{
    SimTime send_at;
    PtpMessage msg;
};

/// Two-step PTP master: Sync + FollowUp every sync interval, Announce every
/// announce interval, and a DelayResp for each DelayReq.
class Master
{
public:
    Master(EngineConfig config, const ClockModel& clock, LagSource lags = {});

    // True send time of the Sync for cycle `seq`.
    [[nodiscard]] SimTime sync_time(std::uint64_t seq) const;
    [[nodiscard]] SimTime announce_time(std::uint64_t n) const;

    // Sync now, FollowUp after t0 carrying the Sync's master-local departure time.
    std::vector<Emission> on_sync_tick(SimTime now, std::uint64_t seq);
    Emission on_announce_tick(SimTime now);
    Emission on_delay_req(SimTime now, const PtpMessage& req);

    [[nodiscard]] const EngineConfig& config() const noexcept { return config_; }

private:
    EngineConfig config_;
    const ClockModel* clock_;
    LagSource lags_;
    std::uint64_t announce_seq_ = 0;
};

// Everything the master emits in [0, horizon) with no DelayReq traffic.
[[nodiscard]] std::vector<Emission> master_step(const EngineConfig& config, const ClockModel& clock, Duration horizon);

struct SlaveCounters
{
    std::uint64_t completed = 0;
    std::uint64_t stale_followup = 0;
    std::uint64_t stale_delay_resp = 0;
    // Cycles started but superseded before their DelayResp came back.
    std::uint64_t abandoned = 0;
    // Cycles whose timestamps straddle a clock correction.
    std::uint64_t straddled = 0;
};

struct SlaveOutput
{
    // When set, the harness must call Slave::send_delay_req at this time.
    std::optional<SimTime> delay_req_at;
    std::uint64_t delay_req_seq = 0;
    std::optional<SyncCycle> completed;
};

/// Two-step PTP slave. Tracks a single cycle at a time: a new Sync supersedes
/// any cycle still waiting for its DelayResp.
class Slave
{
public:
    Slave(EngineConfig config, ClockModel& clock, LagSource lags = {});

    SlaveOutput on_message(SimTime now, const PtpMessage& msg);
    // Stamps t_S3 at the actual departure. nullopt when the cycle was
    // superseded after the request was scheduled.
    std::optional<PtpMessage> send_delay_req(SimTime now, std::uint64_t seq);

    [[nodiscard]] const SlaveCounters& counters() const noexcept { return counters_; }
    [[nodiscard]] ClockModel& clock() noexcept { return *clock_; }
    [[nodiscard]] const ClockModel& clock() const noexcept { return *clock_; }

    // True instants of the cycle in progress (oracle use only).
    [[nodiscard]] std::optional<SimTime> pending_sync_arrival() const;

private:
    struct Pending
    {
        SyncCycle cycle;
        SimTime sync_arrival;
        bool followup_seen = false;
        bool delay_req_sent = false;
    };

    EngineConfig config_;
    ClockModel* clock_;
    LagSource lags_;
    std::optional<Pending> pending_;
    std::optional<std::uint64_t> newest_seq_;
    SlaveCounters counters_;
};

inline SlaveOutput slave_step(Slave& slave, SimTime now, const PtpMessage& msg)
{
    return slave.on_message(now, msg);
}

} // namespace ptpdelay::ptp
