#pragma once

#include "ptpdelay/sim/time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ptpdelay
{

/// Drift in parts per million, held as the exact rational num/den.
struct DriftRate
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    static constexpr DriftRate ppm(std::int64_t v) { return {v, 1}; }

    // Accepts "3", "-0.25", "1/3".
    static DriftRate parse(const std::string& text);

    [[nodiscard]] bool is_zero() const noexcept { return num == 0; }
    [[nodiscard]] double as_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    // drift·t rounded toward zero.
    [[nodiscard]] Duration apply(Duration elapsed) const;
};

/// Optional random-walk wander added to a clock. A new Gaussian increment with
/// standard deviation `sigma` is taken every `step` of true time.
struct ClockNoise
{
    Duration sigma{};
    Duration step{};
    std::uint64_t seed = 0;
};

struct Correction
{
    SimTime at;
    Duration step;
    // Zero means the step takes effect instantly; otherwise it is spread linearly
    // over [at, at + slew].
    Duration slew{};

    [[nodiscard]] SimTime settled_at() const { return at + slew; }
    [[nodiscard]] Duration contribution(SimTime t) const;
};

/// Maps true simulation time to a local clock reading:
///
///     local(t) = t + offset_at_epoch + drift·t + noise(t) + Σ corrections effective at t
///
/// Drift is evaluated as an exact rational and rounded toward zero once.
class ClockModel
{
public:
    ClockModel() = default;
    explicit ClockModel(Duration offset_at_epoch, DriftRate drift = {}, std::optional<ClockNoise> noise = std::nullopt);

    [[nodiscard]] LocalTime local_time(SimTime t) const;

    // Offset of this clock relative to true time at t (local − true).
    [[nodiscard]] Duration offset_from_true(SimTime t) const { return local_time(t) - LocalTime(t.ns()); }

    // Throws ConfigError when `at` precedes the last correction already applied.
    void apply_correction(SimTime at, Duration step, Duration slew = Duration{});

    [[nodiscard]] const std::vector<Correction>& corrections() const noexcept { return corrections_; }
    [[nodiscard]] Duration offset_at_epoch() const noexcept { return offset_at_epoch_; }
    [[nodiscard]] DriftRate drift() const noexcept { return drift_; }

    // True time until which corrections are still acting; nullopt if none were applied.
    [[nodiscard]] std::optional<SimTime> correction_activity_end() const;

private:
    [[nodiscard]] Duration noise_at(SimTime t) const;

    Duration offset_at_epoch_{};
    DriftRate drift_{};
    std::optional<ClockNoise> noise_;
    std::vector<Correction> corrections_;
    std::optional<SimTime> activity_end_;

    // Cumulative random-walk values, extended on demand.
    mutable std::vector<std::int64_t> walk_;
    mutable std::uint64_t walk_state_ = 0;
};

} // namespace ptpdelay
