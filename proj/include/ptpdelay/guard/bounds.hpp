#pragma once

#include "ptpdelay/ptp/cycle.hpp"
#include "ptpdelay/sim/clock.hpp"

#include <cstdint>
#include <optional>

namespace ptpdelay::guard
{

/// Minimum one-way delay knowledge. Each value must not exceed the true
/// minimum delay of its direction or the bounds below lose their guarantee.
struct OwdConstraints
{
    Duration d_min_ms{};
    Duration d_min_sm{};

    [[nodiscard]] Duration sum() const { return d_min_ms + d_min_sm; }
    void validate() const;
};

struct OffsetBound
{
    Duration low{};
    Duration high{};

    [[nodiscard]] Duration width() const { return high - low; }
    [[nodiscard]] bool contains(Duration v) const { return low <= v && v <= high; }
    friend bool operator==(const OffsetBound&, const OffsetBound&) = default;
};

struct SystemBoundParams
{
    Duration rtd_max{};
    Duration t_interval{};
    DriftRate rho{};

    void validate(const OwdConstraints& k) const;
};

// low = t_S3 − t_M4 + d_min_sm, high = t_S2 − t_M1 − d_min_ms.
// Throws ConstraintViolation when RTD < d_min_ms + d_min_sm.
[[nodiscard]] OffsetBound bound_offset(const ptp::SyncCycle& c, const OwdConstraints& k);

// (low + high) / 2, rounded toward zero.
[[nodiscard]] Duration midpoint_offset(const ptp::SyncCycle& c, const OwdConstraints& k);

// (RTD − d_min_ms − d_min_sm) / 2, rounded up so that
// |true − midpoint| <= residual holds even with an odd interval width.
[[nodiscard]] Duration residual_uncertainty(const ptp::SyncCycle& c, const OwdConstraints& k);

// Half-width (rtd_max − Σd_min)/2 + T_I·ρ, each term rounded up.
[[nodiscard]] Duration system_half_width(const SystemBoundParams& p, const OwdConstraints& k);
[[nodiscard]] OffsetBound system_bound(const SystemBoundParams& p, const OwdConstraints& k);

enum class GateDecision
{
    accept,
    reject,
};

// Boundary inclusive.
[[nodiscard]] GateDecision rtd_gate(const ptp::SyncCycle& c, Duration rtd_max);

/// rtd_gate with bookkeeping: rejected cycles starve the servo, and the
/// largest gap between accepted cycles is the empirical T_I.
class RtdGate
{
public:
    explicit RtdGate(std::optional<Duration> rtd_max) : rtd_max_(rtd_max) {}

    GateDecision check(const ptp::SyncCycle& c, SimTime completed_at);

    [[nodiscard]] std::uint64_t accepted() const noexcept { return accepted_; }
    [[nodiscard]] std::uint64_t rejected() const noexcept { return rejected_; }
    [[nodiscard]] std::uint64_t longest_starvation() const noexcept { return longest_run_; }
    [[nodiscard]] Duration observed_t_interval() const noexcept { return max_gap_; }
    [[nodiscard]] const std::optional<Duration>& rtd_max() const noexcept { return rtd_max_; }

private:
    std::optional<Duration> rtd_max_;
    std::uint64_t accepted_ = 0;
    std::uint64_t rejected_ = 0;
    std::uint64_t run_ = 0;
    std::uint64_t longest_run_ = 0;
    std::optional<SimTime> last_accept_;
    Duration max_gap_{};
};

/// Compares the Sync/DelayReq round trip with the DelayReq/DelayResp round
/// trip. A selective delay on one message kind widens only one of them.
struct RoundTripCheck
{
    Duration sync_width{};
    Duration resp_width{};
    double ratio = 1.0;
    bool suspicious = false;
};

// `resp_turnaround` is the master's DelayReq-in to DelayResp-out lag;
// `floor` keeps the ratio finite when a width is ~0. Needs t_S6.
[[nodiscard]] RoundTripCheck round_trip_check(const ptp::SyncCycle& c, const OwdConstraints& k, Duration resp_turnaround,
                                              double factor = 3.0, Duration floor = Duration(1'000));

} // namespace ptpdelay::guard
