#pragma once

#include "ptpdelay/sim/time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace ptpdelay
{

/// Single-threaded discrete-event engine.
///
/// Events fire in (fire_at, seq) order where seq is the insertion counter, so
/// equal-time events run in the order they were scheduled. Scheduling into the
/// past is an invariant violation.
class EventLoop
{
public:
    using Action = std::function<void()>;

    struct Event
    {
        SimTime fire_at;
        std::uint64_t seq = 0;
        Action action;
    };

    std::uint64_t schedule(SimTime at, Action action);
    std::uint64_t schedule_after(Duration delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    // Runs every event with fire_at <= horizon. Returns the number executed.
    std::size_t run_until(SimTime horizon);

    [[nodiscard]] SimTime now() const noexcept { return now_; }
    [[nodiscard]] std::size_t pending() const noexcept { return queue_.size(); }
    [[nodiscard]] std::uint64_t executed() const noexcept { return executed_; }

private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_{};
    std::uint64_t next_seq_ = 0;
    std::uint64_t executed_ = 0;
};

} // namespace ptpdelay
