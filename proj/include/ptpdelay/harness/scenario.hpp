#pragma once

#include "ptpdelay/adversary/attack.hpp"
#include "ptpdelay/guard/bounds.hpp"
#include "ptpdelay/guard/countermeasures.hpp"
#include "ptpdelay/net/link.hpp"
#include "ptpdelay/net/observe.hpp"
#include "ptpdelay/ptp/engine.hpp"
#include "ptpdelay/ptp/servo.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ptpdelay::harness
{

struct ClockConfig
{
    Duration offset{};
    DriftRate drift{};
    Duration noise_sigma{};
    Duration noise_step{};

    [[nodiscard]] ClockModel build(std::uint64_t seed) const;
};

struct JitterSpec
{
    std::string kind = "none"; // none | uniform | normal
    Duration lo{};
    Duration hi{};
    Duration mean{};
    Duration sigma{};

    [[nodiscard]] net::Jitter build() const;
};

struct AttackSpec
{
    std::string plan = "none"; // none | selective | incremental | asymmetric
    std::string targets;
    Duration delay{};
    DriftRate ramp{};
    adversary::RampBasis basis = adversary::RampBasis::elapsed;
    net::Direction direction = net::Direction::master_to_slave;
    Duration start{};
    std::optional<Duration> end;
    adversary::ClassifierMode classifier = adversary::ClassifierMode::profile;
    double arm_threshold = 0.9;

    [[nodiscard]] adversary::AttackPlan build() const;
};

enum class ServoInput
{
    offset,
    midpoint,
};

struct GuardConfig
{
    // Bounds are computed only when minimum OWDs are configured.
    std::optional<guard::OwdConstraints> owd;
    std::optional<Duration> rtd_max;
    Duration t_interval = Duration(1'000'000'000);
    DriftRate rho{};
    std::optional<guard::ReplayPolicy> replay;
    guard::PaddingPolicy padding;
    guard::TimingRandomization timing;
    double suspicion_factor = 3.0;
};

struct CoverConfig
{
    // Poisson rate per direction, packets per second.
    double rate_ms = 0.0;
    double rate_sm = 0.0;
    std::uint32_t len_lo = 40;
    std::uint32_t len_hi = 1500;
};

/// Everything that determines a run. Equal scenarios give byte-identical traces.
struct Scenario
{
    std::string name = "scenario";
    std::uint64_t seed = 1;
    Duration duration = Duration(10'000'000'000);
    ClockConfig master;
    ClockConfig slave;
    net::LinkProfile link;
    JitterSpec jitter;
    ptp::EngineConfig engine;
    ptp::ServoConfig servo;
    ServoInput servo_input = ServoInput::offset;
    std::string encryption = "identity";
    AttackSpec attack;
    GuardConfig guard;
    net::NoiseSource noise;
    net::NoiseMode noise_mode = net::NoiseMode::free_bins;
    CoverConfig cover;
    // Run the detector over the complete observation trace at the end.
    bool detect_at_end = true;
    bool write_obs_trace = true;
    // Averaging window for the converged offset, ending at the attack end (or run end).
    Duration converge_window = Duration(60'000'000'000);

    void validate() const;
};

// Sets one key. Throws ConfigError naming the key on unknown keys or bad values.
void apply_setting(Scenario& s, const std::string& key, const std::string& value);

// Every settable key, in documentation order.
[[nodiscard]] const std::vector<std::string>& scenario_keys();

// Flat `key=value` text, `#` comments. Errors carry `<origin>:<line>`.
[[nodiscard]] Scenario parse_scenario(std::istream& in, const std::string& origin = "<input>");
[[nodiscard]] Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<input>");

// A path, or `builtin:<name>` for a bundled scenario.
[[nodiscard]] Scenario load_scenario(const std::string& path_or_builtin);

[[nodiscard]] const std::vector<std::string>& bundled_scenario_names();
[[nodiscard]] const std::string& bundled_scenario_text(const std::string& name);
[[nodiscard]] Scenario bundled_scenario(const std::string& name);

} // namespace ptpdelay::harness
