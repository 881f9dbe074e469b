#include "ptpdelay/guard/bounds.hpp"

#include "ptpdelay/error.hpp"

#include <algorithm>
#include <string>

namespace ptpdelay::guard
{

namespace
{

Duration half_up(Duration d)
{
    // d >= 0 here.
    return Duration(d.ns() / 2 + d.ns() % 2);
}

Duration require_feasible(const ptp::SyncCycle& c, const OwdConstraints& k)
{
    const Duration rtd = ptp::compute_rtd(c);
    if (rtd < k.sum())
    {
        throw ConstraintViolation("cycle " + std::to_string(c.seq) + ": RTD " + std::to_string(rtd.ns()) +
                                  " ns is below d_min_ms + d_min_sm = " + std::to_string(k.sum().ns()) + " ns");
    }
    return rtd;
}

} // namespace

void OwdConstraints::validate() const
{
    if (d_min_ms < Duration{} || d_min_sm < Duration{})
    {
        throw ConfigError("guard.d_min_ms_ns and guard.d_min_sm_ns must be >= 0");
    }
}

void SystemBoundParams::validate(const OwdConstraints& k) const
{
    if (rtd_max < k.sum())
    {
        throw ConfigError("guard.rtd_max_ns must be >= d_min_ms + d_min_sm");
    }
    if (rho.num < 0)
    {
        throw ConfigError("guard.rho_ppm must be >= 0");
    }
    if (t_interval <= Duration{})
    {
        throw ConfigError("guard.t_interval_ns must be positive");
    }
}

OffsetBound bound_offset(const ptp::SyncCycle& c, const OwdConstraints& k)
{
    require_feasible(c, k);
    return OffsetBound{(*c.t_s3 - *c.t_m4) + k.d_min_sm, (*c.t_s2 - *c.t_m1) - k.d_min_ms};
}

Duration midpoint_offset(const ptp::SyncCycle& c, const OwdConstraints& k)
{
    const OffsetBound b = bound_offset(c, k);
    return (b.low + b.high) / 2;
}

Duration residual_uncertainty(const ptp::SyncCycle& c, const OwdConstraints& k)
{
    return half_up(require_feasible(c, k) - k.sum());
}

Duration system_half_width(const SystemBoundParams& p, const OwdConstraints& k)
{
    p.validate(k);
    const Duration drift_floor = p.rho.apply(p.t_interval);
    // apply() truncates; round the drift allowance up instead.
    const auto exact_num = static_cast<__int128>(p.t_interval.ns()) * p.rho.num;
    const auto denom = static_cast<__int128>(p.rho.den) * 1'000'000;
    const Duration drift = exact_num % denom == 0 ? drift_floor : drift_floor + Duration(1);
    return half_up(p.rtd_max - k.sum()) + drift;
}

OffsetBound system_bound(const SystemBoundParams& p, const OwdConstraints& k)
{
    const Duration h = system_half_width(p, k);
    return OffsetBound{-h, h};
}

GateDecision rtd_gate(const ptp::SyncCycle& c, Duration rtd_max)
{
    return ptp::compute_rtd(c) <= rtd_max ? GateDecision::accept : GateDecision::reject;
}

GateDecision RtdGate::check(const ptp::SyncCycle& c, SimTime completed_at)
{
    const GateDecision d = rtd_max_ ? rtd_gate(c, *rtd_max_) : GateDecision::accept;
    if (d == GateDecision::reject)
    {
        ++rejected_;
        longest_run_ = std::max(longest_run_, ++run_);
        return d;
    }
    ++accepted_;
    run_ = 0;
    if (last_accept_)
    {
        max_gap_ = std::max(max_gap_, completed_at - *last_accept_);
    }
    last_accept_ = completed_at;
    return d;
}

RoundTripCheck round_trip_check(const ptp::SyncCycle& c, const OwdConstraints& k, Duration resp_turnaround, double factor,
                                Duration floor)
{
    if (!c.t_s6)
    {
        throw IncompleteCycle("round-trip check needs the DelayResp arrival of cycle " + std::to_string(c.seq));
    }
    RoundTripCheck r;
    r.sync_width = require_feasible(c, k) - k.sum();
    r.resp_width = (*c.t_s6 - *c.t_s3) - resp_turnaround - k.sum();
    const double a = static_cast<double>(std::max(r.sync_width, floor).ns());
    const double b = static_cast<double>(std::max(r.resp_width, floor).ns());
    r.ratio = std::max(a, b) / std::min(a, b);
    r.suspicious = r.ratio > factor;
    return r;
}

} // namespace ptpdelay::guard
