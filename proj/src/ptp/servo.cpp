#include "ptpdelay/ptp/servo.hpp"

#include "ptpdelay/error.hpp"

#include <cmath>

namespace ptpdelay::ptp
{

void ServoConfig::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0))
    {
        throw ConfigError("servo.alpha must lie in (0, 1]");
    }
    if (step_threshold < Duration{} || slew_window < Duration{})
    {
        throw ConfigError("servo thresholds must be non-negative");
    }
}

CorrectionAction servo_decide(ServoState& servo, Duration measured_offset)
{
    if (!servo.config.enabled)
    {
        return {};
    }
    const double a = servo.config.alpha;
    const double next = a * static_cast<double>(measured_offset.ns()) + (1.0 - a) * static_cast<double>(servo.smoothed.ns());
    servo.smoothed = Duration(static_cast<std::int64_t>(std::llround(next)));
    servo.primed = true;

    if (servo.smoothed == Duration{})
    {
        return {};
    }
    CorrectionAction act;
    act.amount = -servo.smoothed;
    if (abs(servo.smoothed) > servo.config.step_threshold || servo.config.slew_window == Duration{})
    {
        act.kind = CorrectionAction::Kind::step;
    }
    else
    {
        act.kind = CorrectionAction::Kind::slew;
        act.slew = servo.config.slew_window;
    }
    return act;
}

CorrectionAction servo_apply(ServoState& servo, Duration measured_offset, ClockModel& slave_clock, SimTime now)
{
    const CorrectionAction act = servo_decide(servo, measured_offset);
    if (act.kind != CorrectionAction::Kind::none)
    {
        slave_clock.apply_correction(now, act.amount, act.slew);
    }
    return act;
}

} // namespace ptpdelay::ptp
