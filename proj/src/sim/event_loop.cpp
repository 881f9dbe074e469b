#include "ptpdelay/sim/event_loop.hpp"

#include <string>

namespace ptpdelay
{

std::uint64_t EventLoop::schedule(SimTime at, Action action)
{
    if (at < now_)
    {
        throw InvariantViolation("event scheduled at " + std::to_string(at.ns()) + " ns, before current time " +
                                 std::to_string(now_.ns()) + " ns");
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{at, seq, std::move(action)});
    return seq;
}

std::size_t EventLoop::run_until(SimTime horizon)
{
    std::size_t count = 0;
    while (!queue_.empty() && queue_.top().fire_at <= horizon)
    {
        // priority_queue::top is const; move the action out before popping.
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        now_ = ev.fire_at;
        ev.action();
        ++count;
        ++executed_;
    }
    return count;
}

} // namespace ptpdelay
