#pragma once

#include "ptpdelay/adversary/attack.hpp"
#include "ptpdelay/detect/detector.hpp"
#include "ptpdelay/guard/bounds.hpp"
#include "ptpdelay/harness/scenario.hpp"
#include "ptpdelay/net/link.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ptpdelay::harness
{

struct SyncRecord
{
    SimTime at;
    std::uint64_t seq = 0;
    Duration rtd{};
    Duration measured{};
    // Slave minus master at completion, before this cycle's correction.
    Duration true_offset{};
    Duration correction{};
};

struct BoundRecord
{
    SimTime at;
    std::uint64_t seq = 0;
    guard::OffsetBound bound;
    Duration midpoint{};
    Duration residual{};
    Duration true_offset{};
    bool accepted = true;
};

/// Ground truth for one completed cycle. Values ending in `_2x` are doubled
/// so that every identity holds without rounding.
struct OracleRecord
{
    SimTime at;
    std::uint64_t seq = 0;
    // (t_S2 − t_M1) − (t_M4 − t_S3), i.e. twice the measured offset before truncation.
    Duration measured_2x{};
    // off(τ2) + off(τ3): twice the real offset over the cycle.
    Duration real_2x{};
    // real_2x with all servo corrections removed (drift and clock noise only).
    Duration intrinsic_2x{};
    // (asymmetry + transmission + attack) MS minus the same SM.
    Duration asymmetry_2x{};
    // Jitter of both packets plus drift of the master timescale over both OWDs.
    Duration envelope_2x{};
    Duration owd_ms{};
    Duration owd_sm{};
    net::DelayBreakdown parts_ms;
    net::DelayBreakdown parts_sm;
    // measured_2x == real_2x + OWD_ms − OWD_sm in the master timescale.
    bool identity_ok = true;
    // Breakdown totals equal realized OWDs and |measured − real − asymmetry| ≤ envelope.
    bool decomposition_ok = true;
};

struct RunSummary
{
    std::string name;
    std::uint64_t seed = 0;
    Duration duration{};

    std::uint64_t cycles_completed = 0;
    std::uint64_t cycles_straddled = 0;
    std::uint64_t cycles_abandoned = 0;
    std::uint64_t stale_followup = 0;
    std::uint64_t stale_delay_resp = 0;

    Duration converged_offset{};
    SimTime converge_end;
    Duration max_abs_offset{};
    Duration final_offset{};
    Duration spike_start{};
    Duration spike_end{};

    std::uint64_t bound_cycles = 0;
    std::uint64_t bound_violations = 0;
    std::uint64_t midpoint_violations = 0;
    std::uint64_t system_bound_violations = 0;
    std::uint64_t rejected_cycles = 0;
    std::uint64_t longest_starvation = 0;
    Duration observed_t_interval{};
    std::uint64_t suspicious_cycles = 0;

    std::string attack_plan;
    bool armed = false;
    double arm_confidence = 0.0;
    std::string arm_note;
    std::uint64_t delayed_packets = 0;
    std::uint64_t dropped_packets = 0;
    Duration max_injected{};
    std::uint64_t replay_rejected = 0;
    std::uint64_t replay_rejected_ptp = 0;
    // Largest attacker delay on a packet the replay window still accepted.
    Duration max_accepted_attack_delay{};
    // Largest gap between consecutive undelayed tunnel arrivals of one direction.
    Duration max_undelayed_gap{};
    // Accepted attacked packets delayed past their successor's undelayed arrival.
    std::uint64_t replay_cap_violations = 0;

    std::string detector_status = "skipped"; // skipped | ok | failed
    std::string detector_mode;
    double detector_confidence = 0.0;
    bool detector_matches_truth = false;
    std::string detector_note;

    std::uint64_t oracle_cycles = 0;
    std::uint64_t oracle_identity_violations = 0;
    std::uint64_t oracle_decomposition_violations = 0;

    // Invariant failures that make `simulate` exit with status 2.
    [[nodiscard]] std::uint64_t invariant_failures() const
    {
        return bound_violations + midpoint_violations + system_bound_violations + oracle_identity_violations +
               oracle_decomposition_violations;
    }

    // Ordered key=value pairs as written to summary.txt.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> fields() const;
};

struct TruthObservation
{
    net::Observation obs;
    std::optional<ptp::MessageKind> kind;
    std::uint64_t msg_seq = 0;
};

struct RunResult
{
    Scenario scenario;
    std::vector<SyncRecord> sync;
    std::vector<BoundRecord> bounds;
    std::vector<OracleRecord> oracle;
    // Real tunnel traffic at the tap, with ground truth.
    std::vector<TruthObservation> tapped;
    // Tapped traffic merged with observation noise: what the observer sees.
    std::vector<net::Observation> observations;
    std::vector<adversary::AttackRecord> attack;
    std::vector<Correction> corrections;
    std::optional<detect::DetectReport> detection;
    detect::PtpProfile truth_profile;
    RunSummary summary;
};

[[nodiscard]] RunResult run_scenario(const Scenario& s);

// Profile implied by the labelled tap records (modal bin distances).
[[nodiscard]] detect::PtpProfile truth_profile(std::span<const TruthObservation> tapped, const Scenario& s);

// Random small scenario for the bound soundness property: zero drift,
// d_min at or below the true minimum, random asymmetry, jitter and attack.
[[nodiscard]] Scenario random_soundness_scenario(std::uint64_t seed);

} // namespace ptpdelay::harness
