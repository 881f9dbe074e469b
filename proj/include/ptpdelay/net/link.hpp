#pragma once

#include "ptpdelay/net/types.hpp"
#include "ptpdelay/sim/random.hpp"
#include "ptpdelay/sim/time.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

namespace ptpdelay::net
{

namespace jitter
{
struct None
{
};
// Uniform on [lo, hi]; lo >= 0.
struct Uniform
{
    Duration lo;
    Duration hi;
};
// Normal(mean, sigma) resampled until non-negative.
struct TruncatedNormal
{
    Duration mean;
    Duration sigma;
};
} // namespace jitter

using Jitter = std::variant<jitter::None, jitter::Uniform, jitter::TruncatedNormal>;

/// Bidirectional link with delay decomposed as
///
///     owd(dir) = d_common + delta(dir) + wire_length / rate + jitter
///
/// `tap_offset` places the on-path observer (and attacker) that far from the
/// sender in each direction; it defaults to half the common delay.
struct LinkProfile
{
    Duration d_common{};
    Duration delta_ms{};
    Duration delta_sm{};
    Jitter jitter = jitter::None{};
    // Bytes per second for length-dependent transmission delay; 0 disables it.
    std::uint64_t rate = 0;
    std::optional<Duration> tap_offset_ms;
    std::optional<Duration> tap_offset_sm;
    // When set, attacker-held packets may be overtaken by later ones in the same
    // direction. The link itself never reorders.
    bool allow_overtake = false;

    [[nodiscard]] Duration delta(Direction d) const { return d == Direction::master_to_slave ? delta_ms : delta_sm; }
    [[nodiscard]] Duration tap_offset(Direction d) const;
    [[nodiscard]] Duration transmission_delay(std::uint32_t wire_length) const;
    // Smallest delay any packet of this length can see in direction d.
    [[nodiscard]] Duration min_delay(Direction d, std::uint32_t wire_length) const;

    // Throws ConfigError with the offending field.
    void validate() const;
};

/// Per-packet delay components, as realized.
struct DelayBreakdown
{
    Duration common{};
    Duration asymmetry{};
    Duration transmission{};
    Duration jitter{};
    Duration attack{};
    // Extra wait behind an earlier packet of the same direction (FIFO).
    Duration queueing{};

    [[nodiscard]] Duration total() const { return common + asymmetry + transmission + jitter + attack + queueing; }
};

struct Delivery
{
    // nullopt: dropped by the attacker.
    std::optional<SimTime> arrival;
    DelayBreakdown parts;
};

class Link
{
public:
    Link(LinkProfile profile, std::uint64_t seed);

    // Computes the arrival of `env`; `attacker_delay` may be Duration::infinite() to drop.
    // Calls must be made in per-direction send order.
    Delivery transmit(const Envelope& env, Duration attacker_delay);

    [[nodiscard]] const LinkProfile& profile() const noexcept { return profile_; }

private:
    Duration sample_jitter();

    LinkProfile profile_;
    Rng rng_;
    // Latest arrival in each direction, and the latest arrival before attacker delay.
    std::array<std::optional<SimTime>, 2> last_arrival_;
    std::array<std::optional<SimTime>, 2> last_base_arrival_;
};

} // namespace ptpdelay::net
