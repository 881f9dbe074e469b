#pragma once

#include "ptpdelay/net/types.hpp"
#include "ptpdelay/ptp/message.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptpdelay::detect
{

/// Fingerprint of a PTP flow as seen by the observer. All timings are whole
/// 1 ms bins expressed as Durations; phases are taken modulo their period.
struct PtpProfile
{
    enum class Mode
    {
        // Fixed timings: slots predicted from phase modulo t3.
        periodic,
        // Timings not stable: slots recognised from message order alone.
        sequence,
    };

    Mode mode = Mode::periodic;
    Duration t3{}; // cycle period
    Duration t0{}; // Sync -> FollowUp
    Duration t1{}; // FollowUp -> DelayReq
    Duration t2{}; // DelayReq -> DelayResp
    std::uint32_t x = 0;     // wire length of Sync / FollowUp / DelayResp
    std::uint32_t x_req = 0; // wire length of DelayReq (equals x under IPsec)
    std::uint32_t y = 0;     // Announce wire length, 0 if none was found
    Duration announce_period{};
    Duration sync_phase{};
    Duration announce_phase{};
    bool use_direction = true;
    double confidence = 0.0;

    // Timings within ±tolerance and lengths exact.
    [[nodiscard]] bool matches(const PtpProfile& truth, Duration tolerance = Duration(1'000'000)) const;
};

std::string_view to_string(PtpProfile::Mode m) noexcept;

// key=value lines, `# ptp-profile v1` header.
void write_profile(std::ostream& out, const PtpProfile& p);
[[nodiscard]] PtpProfile read_profile(std::istream& in);
void write_profile_file(const std::string& path, const PtpProfile& p);
[[nodiscard]] PtpProfile read_profile_file(const std::string& path);

/// Label assigned by the classifier; `noise` when no slot matches.
struct Label
{
    std::optional<ptp::MessageKind> kind;

    [[nodiscard]] bool is_noise() const noexcept { return !kind.has_value(); }
    [[nodiscard]] std::string_view name() const noexcept { return kind ? ptp::to_string(*kind) : "Noise"; }
    friend bool operator==(const Label&, const Label&) = default;
};

struct ClassifiedObservation
{
    net::Observation obs;
    Label label;
    // Distance to the matched slot's predicted position, in ns.
    Duration phase_residual{};
};

// `# classified-trace v1`: seen_at_ns,length,direction,label
void write_classified_trace(std::ostream& out, std::span<const ClassifiedObservation> rows);

} // namespace ptpdelay::detect
