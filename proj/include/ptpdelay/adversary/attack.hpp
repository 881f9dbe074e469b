#pragma once

#include "ptpdelay/detect/detector.hpp"
#include "ptpdelay/net/types.hpp"
#include "ptpdelay/ptp/message.hpp"
#include "ptpdelay/sim/clock.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ptpdelay::adversary
{

/// Set of message kinds an attack targets.
class TargetSet
{
public:
    TargetSet() = default;
    TargetSet(std::initializer_list<ptp::MessageKind> kinds);

    // Comma separated kind names, e.g. "Sync,FollowUp".
    static TargetSet parse(const std::string& text);
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] bool contains(ptp::MessageKind k) const noexcept { return (bits_ >> static_cast<unsigned>(k)) & 1U; }
    [[nodiscard]] bool empty() const noexcept { return bits_ == 0; }

private:
    std::uint32_t bits_ = 0;
};

enum class RampBasis
{
    // Injected delay grows by `ramp` per unit of elapsed time.
    elapsed,
    // Twice as fast, so the slave offset (half the delay) drifts at `ramp`.
    offset_rate,
};

RampBasis parse_ramp_basis(const std::string& s);
std::string_view to_string(RampBasis b) noexcept;

namespace plan
{

struct None
{
};

struct Selective
{
    TargetSet targets;
    // May be Duration::infinite() to drop.
    Duration delay{};
};

struct Incremental
{
    TargetSet targets;
    DriftRate ramp{};
    RampBasis basis = RampBasis::elapsed;
};

struct AsymmetricLink
{
    net::Direction direction = net::Direction::master_to_slave;
    Duration delay{};
};

} // namespace plan

using PlanKind = std::variant<plan::None, plan::Selective, plan::Incremental, plan::AsymmetricLink>;

struct AttackPlan
{
    PlanKind kind = plan::None{};
    SimTime start{};
    SimTime end = SimTime::max();

    [[nodiscard]] bool active(SimTime now) const noexcept { return start <= now && now < end; }
    // Selective and incremental plans depend on message classification.
    [[nodiscard]] bool needs_classifier() const noexcept;
    void validate() const;
};

// ramp · (now − start), rounded toward zero; doubled under offset_rate.
[[nodiscard]] Duration incremental_schedule(DriftRate ramp, SimTime start, SimTime now, RampBasis basis = RampBasis::elapsed);

// Delay for one observed packet. Zero outside the active window.
[[nodiscard]] Duration decide_delay(const net::Observation& obs, const AttackPlan& plan, const detect::Label& label, SimTime now);

/// Source of message labels for the attack path. Only the profile classifier
/// is available to a real on-path attacker.
class Classifier
{
public:
    virtual ~Classifier() = default;
    virtual detect::Label label(const net::Observation& obs, net::EnvelopeHandle handle) = 0;
};

class ProfileClassifier final : public Classifier
{
public:
    explicit ProfileClassifier(detect::PtpProfile profile) : flow_(std::move(profile)) {}
    detect::Label label(const net::Observation& obs, net::EnvelopeHandle) override { return flow_.next(obs).label; }

private:
    detect::FlowClassifier flow_;
};

// Test-only: ground truth supplied by the harness.
class OracleClassifier final : public Classifier
{
public:
    using Lookup = std::function<std::optional<ptp::MessageKind>(net::EnvelopeHandle)>;
    explicit OracleClassifier(Lookup lookup) : lookup_(std::move(lookup)) {}
    detect::Label label(const net::Observation&, net::EnvelopeHandle handle) override { return {lookup_(handle)}; }

private:
    Lookup lookup_;
};

enum class ClassifierMode
{
    profile,
    oracle,
};

struct AttackRecord
{
    SimTime at;
    std::string label;
    Duration delay{};
};

// `# attack-trace v1`: true_time_ns,classified_kind,injected_delay_ns ("inf" for drops)
void write_attack_trace(std::ostream& out, std::span<const AttackRecord> rows);

struct AdversaryConfig
{
    AttackPlan plan;
    ClassifierMode classifier = ClassifierMode::profile;
    double arm_threshold = 0.9;
    detect::DetectOptions detect;
};

struct ArmResult
{
    bool armed = false;
    std::optional<detect::PtpProfile> profile;
    double confidence = 0.0;
    std::string note;
};

/// MITM at the bridge. Learns the flow from the traffic seen before the
/// attack starts, then delays packets per the plan. Payloads and timestamps
/// are never visible to it: it sees Observations and opaque handles only.
class Adversary
{
public:
    Adversary(AdversaryConfig config, OracleClassifier::Lookup oracle = {});

    // Fit the detector on everything observed so far. Plans that need a
    // classifier stay idle unless the fit reaches the arming threshold.
    const ArmResult& arm(std::span<const net::Observation> observed);

    Duration on_packet(const net::Observation& obs, net::EnvelopeHandle handle);

    [[nodiscard]] bool armed() const noexcept { return arm_.armed; }
    [[nodiscard]] const ArmResult& arm_result() const noexcept { return arm_; }
    [[nodiscard]] const AttackPlan& plan() const noexcept { return config_.plan; }
    [[nodiscard]] const std::vector<AttackRecord>& log() const noexcept { return log_; }
    [[nodiscard]] std::uint64_t delayed_packets() const noexcept { return delayed_; }
    [[nodiscard]] std::uint64_t dropped_packets() const noexcept { return dropped_; }
    [[nodiscard]] Duration max_injected() const noexcept { return max_injected_; }

private:
    AdversaryConfig config_;
    OracleClassifier::Lookup oracle_;
    std::unique_ptr<Classifier> classifier_;
    ArmResult arm_;
    bool arm_attempted_ = false;
    std::vector<AttackRecord> log_;
    std::uint64_t delayed_ = 0;
    std::uint64_t dropped_ = 0;
    Duration max_injected_{};
};

} // namespace ptpdelay::adversary
