#include "ptpdelay/ptp/engine.hpp"

#include "ptpdelay/error.hpp"

#include <algorithm>

namespace ptpdelay::ptp
{

void EngineConfig::validate() const
{
    if (sync_interval <= Duration{})
    {
        throw ConfigError("engine.sync_interval_ns must be positive");
    }
    if (announce_interval <= Duration{})
    {
        throw ConfigError("engine.announce_interval_ns must be positive");
    }
    if (followup_lag <= Duration{})
    {
        throw ConfigError("engine.followup_lag_ns must be positive");
    }
    if (delayreq_lag < Duration{} || delayresp_lag < Duration{} || announce_offset < Duration{} || first_sync < Duration{})
    {
        throw ConfigError("engine lags and offsets must be non-negative");
    }
}

LagSource fixed_lags(const EngineConfig& config)
{
    return [lags = CycleLags{Duration{}, config.followup_lag, config.delayreq_lag}](std::uint64_t) { return lags; };
}

Master::Master(EngineConfig config, const ClockModel& clock, LagSource lags)
    : config_(config), clock_(&clock), lags_(lags ? std::move(lags) : fixed_lags(config))
{
    config_.validate();
}

SimTime Master::sync_time(std::uint64_t seq) const
{
    return SimTime::from_duration(config_.first_sync + config_.sync_interval * static_cast<std::int64_t>(seq) +
                                  lags_(seq).sync_offset);
}

SimTime Master::announce_time(std::uint64_t n) const
{
    return SimTime::from_duration(config_.announce_offset + config_.announce_interval * static_cast<std::int64_t>(n));
}

std::vector<Emission> Master::on_sync_tick(SimTime now, std::uint64_t seq)
{
    const LocalTime t_m1 = clock_->local_time(now);
    const CycleLags lags = lags_(seq);
    return {
        Emission{now, PtpMessage{MessageKind::sync, seq, std::nullopt}},
        Emission{now + lags.followup_lag, PtpMessage{MessageKind::follow_up, seq, t_m1}},
    };
}

Emission Master::on_announce_tick(SimTime now)
{
    return Emission{now, PtpMessage{MessageKind::announce, announce_seq_++, std::nullopt}};
}

Emission Master::on_delay_req(SimTime now, const PtpMessage& req)
{
    const LocalTime t_m4 = clock_->local_time(now);
    return Emission{now + config_.delayresp_lag, PtpMessage{MessageKind::delay_resp, req.seq, t_m4}};
}

std::vector<Emission> master_step(const EngineConfig& config, const ClockModel& clock, Duration horizon)
{
    Master m(config, clock);
    const SimTime end = SimTime::from_duration(horizon);
    std::vector<Emission> out;
    for (std::uint64_t seq = 0; m.sync_time(seq) < end; ++seq)
    {
        for (auto& e : m.on_sync_tick(m.sync_time(seq), seq))
        {
            out.push_back(e);
        }
    }
    for (std::uint64_t n = 0; m.announce_time(n) < end; ++n)
    {
        out.push_back(m.on_announce_tick(m.announce_time(n)));
    }
    std::stable_sort(out.begin(), out.end(), [](const Emission& a, const Emission& b) { return a.send_at < b.send_at; });
    return out;
}

Slave::Slave(EngineConfig config, ClockModel& clock, LagSource lags)
    : config_(config), clock_(&clock), lags_(lags ? std::move(lags) : fixed_lags(config))
{
    config_.validate();
}

std::optional<SimTime> Slave::pending_sync_arrival() const
{
    return pending_ ? std::optional<SimTime>(pending_->sync_arrival) : std::nullopt;
}

SlaveOutput Slave::on_message(SimTime now, const PtpMessage& msg)
{
    SlaveOutput out;
    switch (msg.kind)
    {
    case MessageKind::sync:
        if (newest_seq_ && msg.seq <= *newest_seq_)
        {
            break;
        }
        if (pending_)
        {
            ++counters_.abandoned;
        }
        newest_seq_ = msg.seq;
        pending_ = Pending{};
        pending_->cycle.seq = msg.seq;
        pending_->cycle.t_s2 = clock_->local_time(now);
        pending_->sync_arrival = now;
        break;

    case MessageKind::follow_up:
        if (!pending_ || pending_->cycle.seq != msg.seq || pending_->followup_seen || !msg.timestamp)
        {
            ++counters_.stale_followup;
            break;
        }
        pending_->followup_seen = true;
        pending_->cycle.t_m1 = *msg.timestamp;
        out.delay_req_at = now + lags_(msg.seq).delayreq_lag;
        out.delay_req_seq = msg.seq;
        break;

    case MessageKind::delay_resp:
    {
        if (!pending_ || pending_->cycle.seq != msg.seq || !pending_->delay_req_sent || !msg.timestamp)
        {
            ++counters_.stale_delay_resp;
            break;
        }
        Pending done = *pending_;
        pending_.reset();
        done.cycle.t_m4 = *msg.timestamp;
        done.cycle.t_s6 = clock_->local_time(now);
        const auto activity = clock_->correction_activity_end();
        if (activity && *activity >= done.sync_arrival)
        {
            ++counters_.straddled;
            break;
        }
        ++counters_.completed;
        out.completed = done.cycle;
        break;
    }

    case MessageKind::delay_req:
    case MessageKind::announce:
        break;
    }
    return out;
}

std::optional<PtpMessage> Slave::send_delay_req(SimTime now, std::uint64_t seq)
{
    if (!pending_ || pending_->cycle.seq != seq || !pending_->followup_seen || pending_->delay_req_sent)
    {
        return std::nullopt;
    }
    pending_->delay_req_sent = true;
    pending_->cycle.t_s3 = clock_->local_time(now);
    return PtpMessage{MessageKind::delay_req, pending_->cycle.seq, std::nullopt};
}

} // namespace ptpdelay::ptp
