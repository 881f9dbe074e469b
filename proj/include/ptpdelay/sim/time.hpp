#pragma once

#include "ptpdelay/error.hpp"

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace ptpdelay
{

namespace detail
{

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
    {
        throw OverflowError("time arithmetic overflow: " + std::to_string(a) + " + " + std::to_string(b));
    }
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r))
    {
        throw OverflowError("time arithmetic overflow: " + std::to_string(a) + " - " + std::to_string(b));
    }
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
    {
        throw OverflowError("time arithmetic overflow: " + std::to_string(a) + " * " + std::to_string(b));
    }
    return r;
}

} // namespace detail

/// Signed span of time in integer nanoseconds.
///
/// All arithmetic is checked; leaving the 64-bit range throws OverflowError
/// instead of wrapping. `Duration::infinite()` is a sentinel used for
/// "never delivered" (attacker drop) and must not take part in arithmetic.
class Duration
{
public:
    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}

    static constexpr Duration nanoseconds(std::int64_t v) { return Duration(v); }
    static Duration microseconds(std::int64_t v) { return Duration(detail::checked_mul(v, 1'000)); }
    static Duration milliseconds(std::int64_t v) { return Duration(detail::checked_mul(v, 1'000'000)); }
    static Duration seconds(std::int64_t v) { return Duration(detail::checked_mul(v, 1'000'000'000)); }
    static constexpr Duration infinite() { return Duration(std::numeric_limits<std::int64_t>::max()); }

    [[nodiscard]] constexpr std::int64_t ns() const noexcept { return ns_; }
    [[nodiscard]] constexpr bool is_infinite() const noexcept { return ns_ == std::numeric_limits<std::int64_t>::max(); }

    friend constexpr auto operator<=>(Duration, Duration) = default;

    friend Duration operator+(Duration a, Duration b) { return Duration(detail::checked_add(a.ns_, b.ns_)); }
    friend Duration operator-(Duration a, Duration b) { return Duration(detail::checked_sub(a.ns_, b.ns_)); }
    friend Duration operator*(Duration a, std::int64_t k) { return Duration(detail::checked_mul(a.ns_, k)); }
    friend Duration operator*(std::int64_t k, Duration a) { return a * k; }
    Duration operator-() const { return Duration(detail::checked_sub(0, ns_)); }
    Duration& operator+=(Duration o) { return *this = *this + o; }
    Duration& operator-=(Duration o) { return *this = *this - o; }

    // Integer division rounds toward zero.
    friend Duration operator/(Duration a, std::int64_t k) { return Duration(a.ns_ / k); }

private:
    std::int64_t ns_ = 0;
};

[[nodiscard]] inline Duration abs(Duration d) { return d < Duration{} ? -d : d; }

/// True simulation time: nanoseconds since the simulation epoch, never negative.
class SimTime
{
public:
    constexpr SimTime() = default;
    explicit SimTime(std::int64_t ns) : ns_(ns)
    {
        if (ns < 0)
        {
            throw OverflowError("simulation time below epoch: " + std::to_string(ns));
        }
    }

    static SimTime from_duration(Duration d) { return SimTime(d.ns()); }
    static constexpr SimTime max() { return SimTime(std::numeric_limits<std::int64_t>::max(), 0); }

    [[nodiscard]] constexpr std::int64_t ns() const noexcept { return ns_; }
    [[nodiscard]] constexpr Duration since_epoch() const noexcept { return Duration(ns_); }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;

    friend SimTime operator+(SimTime t, Duration d) { return SimTime(detail::checked_add(t.ns_, d.ns())); }
    friend SimTime operator-(SimTime t, Duration d) { return SimTime(detail::checked_sub(t.ns_, d.ns())); }
    friend Duration operator-(SimTime a, SimTime b) { return Duration(detail::checked_sub(a.ns_, b.ns_)); }
    SimTime& operator+=(Duration d) { return *this = *this + d; }

private:
    constexpr SimTime(std::int64_t ns, int /*unchecked*/) : ns_(ns) {}
    std::int64_t ns_ = 0;
};

/// A timestamp read from a (possibly drifting, possibly offset) local clock.
/// Unlike SimTime it may be negative: a slave behind the master at epoch reads below zero.
class LocalTime
{
public:
    constexpr LocalTime() = default;
    constexpr explicit LocalTime(std::int64_t ns) : ns_(ns) {}

    [[nodiscard]] constexpr std::int64_t ns() const noexcept { return ns_; }

    friend constexpr auto operator<=>(LocalTime, LocalTime) = default;

    friend LocalTime operator+(LocalTime t, Duration d) { return LocalTime(detail::checked_add(t.ns_, d.ns())); }
    friend LocalTime operator-(LocalTime t, Duration d) { return LocalTime(detail::checked_sub(t.ns_, d.ns())); }
    friend Duration operator-(LocalTime a, LocalTime b) { return Duration(detail::checked_sub(a.ns_, b.ns_)); }

private:
    std::int64_t ns_ = 0;
};

namespace literals
{

constexpr Duration operator""_ns(unsigned long long v) { return Duration(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_us(unsigned long long v) { return Duration(static_cast<std::int64_t>(v) * 1'000); }
constexpr Duration operator""_ms(unsigned long long v) { return Duration(static_cast<std::int64_t>(v) * 1'000'000); }
constexpr Duration operator""_s(unsigned long long v) { return Duration(static_cast<std::int64_t>(v) * 1'000'000'000); }

} // namespace literals

} // namespace ptpdelay
