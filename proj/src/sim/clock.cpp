#include "ptpdelay/sim/clock.hpp"

#include "ptpdelay/sim/random.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace ptpdelay
{

namespace
{

std::int64_t parse_int(std::string_view s, const std::string& whole)
{
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end)
    {
        throw ConfigError("bad drift rate '" + whole + "'");
    }
    return v;
}

std::int64_t narrow(__int128 v)
{
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    {
        throw OverflowError("clock evaluation overflow");
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

DriftRate DriftRate::parse(const std::string& text)
{
    if (text.empty())
    {
        throw ConfigError("empty drift rate");
    }
    if (const auto slash = text.find('/'); slash != std::string::npos)
    {
        DriftRate r{parse_int(std::string_view(text).substr(0, slash), text),
                    parse_int(std::string_view(text).substr(slash + 1), text)};
        if (r.den <= 0)
        {
            throw ConfigError("drift rate denominator must be positive: '" + text + "'");
        }
        return r;
    }
    if (const auto dot = text.find('.'); dot != std::string::npos)
    {
        const std::string_view frac = std::string_view(text).substr(dot + 1);
        if (frac.size() > 12)
        {
            throw ConfigError("drift rate has too many decimals: '" + text + "'");
        }
        std::string digits = text.substr(0, dot) + std::string(frac);
        if (digits == "-" || digits == "+" || digits.empty())
        {
            throw ConfigError("bad drift rate '" + text + "'");
        }
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
        {
            den *= 10;
        }
        const std::int64_t num = parse_int(digits, text);
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
    }
    return {parse_int(text, text), 1};
}

Duration DriftRate::apply(Duration elapsed) const
{
    if (num == 0)
    {
        return Duration{};
    }
    // C++ integer division truncates toward zero, matching the rounding contract.
    const __int128 scaled = static_cast<__int128>(elapsed.ns()) * num / (static_cast<__int128>(den) * 1'000'000);
    return Duration(narrow(scaled));
}

Duration Correction::contribution(SimTime t) const
{
    if (t < at)
    {
        return Duration{};
    }
    if (slew.ns() <= 0 || t >= at + slew)
    {
        return step;
    }
    const __int128 part = static_cast<__int128>(step.ns()) * (t - at).ns() / slew.ns();
    return Duration(static_cast<std::int64_t>(part));
}

ClockModel::ClockModel(Duration offset_at_epoch, DriftRate drift, std::optional<ClockNoise> noise)
    : offset_at_epoch_(offset_at_epoch), drift_(drift), noise_(noise)
{
    if (drift_.den <= 0)
    {
        throw ConfigError("drift denominator must be positive");
    }
    // |drift| < 1e6 ppm keeps the local clock strictly increasing.
    if (std::abs(static_cast<long double>(drift_.num)) >= 1e6L * static_cast<long double>(drift_.den))
    {
        throw ConfigError("drift rate must be below 10^6 ppm in magnitude");
    }
    if (noise_ && noise_->step.ns() <= 0)
    {
        throw ConfigError("clock noise step must be positive");
    }
    if (noise_)
    {
        walk_state_ = mix_seed(noise_->seed, 0xc10c);
    }
}

LocalTime ClockModel::local_time(SimTime t) const
{
    Duration local = t.since_epoch() + offset_at_epoch_ + drift_.apply(t.since_epoch());
    if (noise_)
    {
        local += noise_at(t);
    }
    for (const auto& c : corrections_)
    {
        if (c.at > t)
        {
            break;
        }
        local += c.contribution(t);
    }
    return LocalTime(local.ns());
}

void ClockModel::apply_correction(SimTime at, Duration step, Duration slew)
{
    if (!corrections_.empty() && at < corrections_.back().at)
    {
        throw ConfigError("clock correction at " + std::to_string(at.ns()) + " ns precedes prior correction at " +
                          std::to_string(corrections_.back().at.ns()) + " ns");
    }
    if (slew.ns() < 0)
    {
        throw ConfigError("negative slew duration");
    }
    corrections_.push_back({at, step, slew});
    const SimTime end = at + slew;
    if (!activity_end_ || end > *activity_end_)
    {
        activity_end_ = end;
    }
}

std::optional<SimTime> ClockModel::correction_activity_end() const
{
    return activity_end_;
}

Duration ClockModel::noise_at(SimTime t) const
{
    const auto index = static_cast<std::size_t>(t.ns() / noise_->step.ns());
    if (walk_.empty())
    {
        walk_.push_back(0);
    }
    while (walk_.size() <= index)
    {
        walk_state_ = splitmix64(walk_state_);
        const double u1 = std::max(unit_interval(walk_state_), 0x1.0p-60);
        walk_state_ = splitmix64(walk_state_);
        const double u2 = unit_interval(walk_state_);
        const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        walk_.push_back(walk_.back() + std::llround(g * static_cast<double>(noise_->sigma.ns())));
    }
    return Duration(walk_[index]);
}

} // namespace ptpdelay
