#pragma once

#include "ptpdelay/sim/clock.hpp"

namespace ptpdelay::ptp
{

struct ServoConfig
{
    bool enabled = true;
    // Weight of the newest measurement, in (0, 1].
    double alpha = 0.5;
    Duration step_threshold = Duration(1'000'000);
    // Sub-threshold corrections are spread over this window.
    Duration slew_window = Duration(100'000'000);

    void validate() const;
};

struct ServoState
{
    ServoConfig config;
    Duration smoothed{};
    bool primed = false;
};

struct CorrectionAction
{
    enum class Kind
    {
        none,
        step,
        slew,
    };

    Kind kind = Kind::none;
    // Signed amount added to the slave clock (the negated smoothed offset).
    Duration amount{};
    Duration slew{};
};

/// EMA servo: smoothed = α·measured + (1−α)·smoothed, then a full step when
/// |smoothed| exceeds the threshold and a slew otherwise. smoothed starts at 0.
CorrectionAction servo_apply(ServoState& servo, Duration measured_offset, ClockModel& slave_clock, SimTime now);

// Same update without touching a clock.
CorrectionAction servo_decide(ServoState& servo, Duration measured_offset);

} // namespace ptpdelay::ptp
