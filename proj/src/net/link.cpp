#include "ptpdelay/net/link.hpp"

#include "ptpdelay/error.hpp"

#include <algorithm>
#include <cmath>

namespace ptpdelay::net
{

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::master_to_slave ? "MS" : "SM";
}

Direction parse_direction(std::string_view s)
{
    if (s == "MS")
    {
        return Direction::master_to_slave;
    }
    if (s == "SM")
    {
        return Direction::slave_to_master;
    }
    throw ConfigError("bad direction '" + std::string(s) + "' (expected MS or SM)");
}

Duration LinkProfile::tap_offset(Direction d) const
{
    const auto& explicit_offset = d == Direction::master_to_slave ? tap_offset_ms : tap_offset_sm;
    return explicit_offset ? *explicit_offset : d_common / 2;
}

Duration LinkProfile::transmission_delay(std::uint32_t wire_length) const
{
    if (rate == 0)
    {
        return Duration{};
    }
    // Rounded toward zero, like every other ns conversion.
    return Duration(static_cast<std::int64_t>(static_cast<__int128>(wire_length) * 1'000'000'000 / rate));
}

Duration LinkProfile::min_delay(Direction d, std::uint32_t wire_length) const
{
    return d_common + delta(d) + transmission_delay(wire_length);
}

void LinkProfile::validate() const
{
    if (d_common < Duration{})
    {
        throw ConfigError("link.d_common_ns must be >= 0");
    }
    if (delta_ms < Duration{} || delta_sm < Duration{})
    {
        throw ConfigError("link.delta_ms_ns and link.delta_sm_ns must be >= 0");
    }
    if (const auto* u = std::get_if<jitter::Uniform>(&jitter))
    {
        if (u->lo < Duration{} || u->hi < u->lo)
        {
            throw ConfigError("uniform jitter needs 0 <= lo <= hi");
        }
    }
    if (const auto* n = std::get_if<jitter::TruncatedNormal>(&jitter))
    {
        if (n->sigma < Duration{})
        {
            throw ConfigError("normal jitter sigma must be >= 0");
        }
        if (n->sigma == Duration{} && n->mean < Duration{})
        {
            throw ConfigError("normal jitter with sigma 0 needs mean >= 0");
        }
    }
    for (const Direction d : {Direction::master_to_slave, Direction::slave_to_master})
    {
        const Duration tap = tap_offset(d);
        if (tap < Duration{} || tap > d_common + delta(d))
        {
            throw ConfigError("link.tap_offset_" + std::string(d == Direction::master_to_slave ? "ms" : "sm") +
                              "_ns must lie within [0, d_common + delta] of its direction");
        }
    }
}

Link::Link(LinkProfile profile, std::uint64_t seed) : profile_(std::move(profile)), rng_(seed)
{
    profile_.validate();
}

Duration Link::sample_jitter()
{
    return std::visit(
        [this](const auto& j) -> Duration {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, jitter::None>)
            {
                return Duration{};
            }
            else if constexpr (std::is_same_v<T, jitter::Uniform>)
            {
                return Duration(rng_.uniform_int(j.lo.ns(), j.hi.ns()));
            }
            else
            {
                if (j.sigma == Duration{})
                {
                    return j.mean;
                }
                for (;;)
                {
                    const double v = rng_.normal(static_cast<double>(j.mean.ns()), static_cast<double>(j.sigma.ns()));
                    if (v >= 0.0)
                    {
                        return Duration(static_cast<std::int64_t>(v));
                    }
                }
            }
        },
        profile_.jitter);
}

Delivery Link::transmit(const Envelope& env, Duration attacker_delay)
{
    if (attacker_delay < Duration{})
    {
        throw InvariantViolation("attacker delay must be non-negative");
    }
    const auto dir = index(env.direction);
    Delivery out;
    out.parts.common = profile_.d_common;
    out.parts.asymmetry = profile_.delta(env.direction);
    out.parts.transmission = profile_.transmission_delay(env.wire_length);
    out.parts.jitter = sample_jitter();

    const SimTime natural = env.send_time + out.parts.common + out.parts.asymmetry + out.parts.transmission + out.parts.jitter;
    if (attacker_delay.is_infinite())
    {
        out.parts.attack = attacker_delay;
        return out;
    }
    out.parts.attack = attacker_delay;

    if (profile_.allow_overtake)
    {
        // The link stays FIFO; only the attacker's extra hold can let others pass.
        SimTime base = natural;
        if (last_base_arrival_[dir] && *last_base_arrival_[dir] > base)
        {
            base = *last_base_arrival_[dir];
        }
        last_base_arrival_[dir] = base;
        out.parts.queueing = base - natural;
        out.arrival = base + attacker_delay;
    }
    else
    {
        SimTime arrival = natural + attacker_delay;
        if (last_arrival_[dir] && *last_arrival_[dir] > arrival)
        {
            out.parts.queueing = *last_arrival_[dir] - arrival;
            arrival = *last_arrival_[dir];
        }
        out.arrival = arrival;
    }
    if (!last_arrival_[dir] || *out.arrival > *last_arrival_[dir])
    {
        last_arrival_[dir] = *out.arrival;
    }
    return out;
}

} // namespace ptpdelay::net
