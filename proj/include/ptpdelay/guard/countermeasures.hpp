#pragma once

#include "ptpdelay/net/encryption.hpp"
#include "ptpdelay/ptp/engine.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ptpdelay::guard
{

struct ReplayPolicy
{
    // 1 = strict: a packet is rejected once any later packet has arrived.
    std::uint32_t window = 1;

    void validate() const;
};

/// Receiver-side anti-replay window over one direction's tunnel sequence
/// numbers. A packet is accepted iff it is new and fewer than `window`
/// higher-numbered packets arrived before it.
class ReplayWindow
{
public:
    explicit ReplayWindow(ReplayPolicy policy);

    bool accept(std::uint64_t seq);

    [[nodiscard]] std::uint64_t rejected() const noexcept { return rejected_; }
    [[nodiscard]] std::optional<std::uint64_t> highest() const noexcept { return highest_; }

private:
    ReplayPolicy policy_;
    std::optional<std::uint64_t> highest_;
    // bit i set: highest − i already accepted (i < 64).
    std::uint64_t seen_ = 0;
    std::uint64_t rejected_ = 0;
};

// Free-function form over an explicit state.
inline bool replay_check(std::uint64_t seq, ReplayWindow& state) { return state.accept(seq); }

struct PaddingPolicy
{
    enum class Kind
    {
        none,
        fixed,
        per_scheme_max,
    };

    Kind kind = Kind::none;
    std::uint32_t target = 0;

    static PaddingPolicy parse(const std::string& text); // "none", "fixed:154", "max"
    [[nodiscard]] std::string to_string() const;
};

// Largest wrapped length among the PTP message kinds.
[[nodiscard]] std::uint32_t max_ptp_wire_length(const net::EncryptionScheme& scheme);

// Throws ConfigError when a fixed target is below max_ptp_wire_length.
void validate_padding(const PaddingPolicy& policy, const net::EncryptionScheme& scheme);

// Wire length after encryption and padding. Lengths already above the padded
// size (large cover packets) are left as wrapped.
[[nodiscard]] std::uint32_t apply_padding(std::uint32_t plain_length, const PaddingPolicy& policy,
                                          const net::EncryptionScheme& scheme);

struct LagRange
{
    Duration lo{};
    Duration hi{};
};

/// Per-cycle timing draws. Unset ranges keep the engine's fixed value.
struct TimingRandomization
{
    std::optional<LagRange> followup_lag;
    std::optional<LagRange> delayreq_lag;
    // Added to each nominal Sync instant.
    std::optional<LagRange> sync_jitter;
    std::uint64_t seed = 0;

    [[nodiscard]] bool active() const noexcept { return followup_lag || delayreq_lag || sync_jitter; }
    void validate(const ptp::EngineConfig& config) const;
};

// Draws are counter-based on (seed, seq), so master and slave agree on a cycle's lags.
[[nodiscard]] ptp::LagSource randomize_timing(const ptp::EngineConfig& config, const TimingRandomization& r);

} // namespace ptpdelay::guard
