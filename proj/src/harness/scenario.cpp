#include "ptpdelay/harness/scenario.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/net/encryption.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ptpdelay::harness
{

namespace
{

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
    {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_int(const std::string& key, const std::string& v)
{
    T out{};
    const auto* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc{} || r.ptr != end)
    {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    return out;
}

Duration parse_ns(const std::string& key, const std::string& v) { return Duration(parse_int<std::int64_t>(key, v)); }

Duration parse_ns_or_inf(const std::string& key, const std::string& v)
{
    return v == "inf" ? Duration::infinite() : parse_ns(key, v);
}

double parse_double(const std::string& key, const std::string& v)
{
    try
    {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
        {
            throw std::invalid_argument(v);
        }
        return d;
    }
    catch (const std::logic_error&)
    {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1")
    {
        return true;
    }
    if (v == "false" || v == "0")
    {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

DriftRate parse_ppm(const std::string& key, const std::string& v)
{
    try
    {
        return DriftRate::parse(v);
    }
    catch (const ConfigError& e)
    {
        throw ConfigError(key + ": " + e.what());
    }
}

guard::LagRange& range(std::optional<guard::LagRange>& r)
{
    if (!r)
    {
        r = guard::LagRange{};
    }
    return *r;
}

guard::OwdConstraints& owd(Scenario& s)
{
    if (!s.guard.owd)
    {
        s.guard.owd = guard::OwdConstraints{};
    }
    return *s.guard.owd;
}

using Setter = std::function<void(Scenario&, const std::string& key, const std::string& v)>;

const std::vector<std::pair<std::string, Setter>>& setters()
{
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"name", [](Scenario& s, const auto&, const auto& v) { s.name = v; }},
        {"seed", [](Scenario& s, const auto& k, const auto& v) { s.seed = parse_int<std::uint64_t>(k, v); }},
        {"duration_ns", [](Scenario& s, const auto& k, const auto& v) { s.duration = parse_ns(k, v); }},
        {"converge_window_ns", [](Scenario& s, const auto& k, const auto& v) { s.converge_window = parse_ns(k, v); }},
        {"detect_at_end", [](Scenario& s, const auto& k, const auto& v) { s.detect_at_end = parse_bool(k, v); }},
        {"write_obs_trace", [](Scenario& s, const auto& k, const auto& v) { s.write_obs_trace = parse_bool(k, v); }},

        {"master.offset_ns", [](Scenario& s, const auto& k, const auto& v) { s.master.offset = parse_ns(k, v); }},
        {"master.drift_ppm", [](Scenario& s, const auto& k, const auto& v) { s.master.drift = parse_ppm(k, v); }},
        {"master.noise_sigma_ns", [](Scenario& s, const auto& k, const auto& v) { s.master.noise_sigma = parse_ns(k, v); }},
        {"master.noise_step_ns", [](Scenario& s, const auto& k, const auto& v) { s.master.noise_step = parse_ns(k, v); }},
        {"slave.offset_ns", [](Scenario& s, const auto& k, const auto& v) { s.slave.offset = parse_ns(k, v); }},
        {"slave.drift_ppm", [](Scenario& s, const auto& k, const auto& v) { s.slave.drift = parse_ppm(k, v); }},
        {"slave.noise_sigma_ns", [](Scenario& s, const auto& k, const auto& v) { s.slave.noise_sigma = parse_ns(k, v); }},
        {"slave.noise_step_ns", [](Scenario& s, const auto& k, const auto& v) { s.slave.noise_step = parse_ns(k, v); }},

        {"link.d_common_ns", [](Scenario& s, const auto& k, const auto& v) { s.link.d_common = parse_ns(k, v); }},
        {"link.delta_ms_ns", [](Scenario& s, const auto& k, const auto& v) { s.link.delta_ms = parse_ns(k, v); }},
        {"link.delta_sm_ns", [](Scenario& s, const auto& k, const auto& v) { s.link.delta_sm = parse_ns(k, v); }},
        {"link.rate_Bps", [](Scenario& s, const auto& k, const auto& v) { s.link.rate = parse_int<std::uint64_t>(k, v); }},
        {"link.tap_offset_ms_ns", [](Scenario& s, const auto& k, const auto& v) { s.link.tap_offset_ms = parse_ns(k, v); }},
        {"link.tap_offset_sm_ns", [](Scenario& s, const auto& k, const auto& v) { s.link.tap_offset_sm = parse_ns(k, v); }},
        {"link.allow_overtake", [](Scenario& s, const auto& k, const auto& v) { s.link.allow_overtake = parse_bool(k, v); }},
        {"link.jitter",
         [](Scenario& s, const auto& k, const auto& v) {
             if (v != "none" && v != "uniform" && v != "normal")
             {
                 throw ConfigError(k + ": expected none, uniform or normal, got '" + v + "'");
             }
             s.jitter.kind = v;
         }},
        {"link.jitter_lo_ns", [](Scenario& s, const auto& k, const auto& v) { s.jitter.lo = parse_ns(k, v); }},
        {"link.jitter_hi_ns", [](Scenario& s, const auto& k, const auto& v) { s.jitter.hi = parse_ns(k, v); }},
        {"link.jitter_mean_ns", [](Scenario& s, const auto& k, const auto& v) { s.jitter.mean = parse_ns(k, v); }},
        {"link.jitter_sigma_ns", [](Scenario& s, const auto& k, const auto& v) { s.jitter.sigma = parse_ns(k, v); }},

        {"engine.sync_interval_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.sync_interval = parse_ns(k, v); }},
        {"engine.announce_interval_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.announce_interval = parse_ns(k, v); }},
        {"engine.announce_offset_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.announce_offset = parse_ns(k, v); }},
        {"engine.followup_lag_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.followup_lag = parse_ns(k, v); }},
        {"engine.delayreq_lag_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.delayreq_lag = parse_ns(k, v); }},
        {"engine.delayresp_lag_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.delayresp_lag = parse_ns(k, v); }},
        {"engine.first_sync_ns", [](Scenario& s, const auto& k, const auto& v) { s.engine.first_sync = parse_ns(k, v); }},

        {"servo.enabled", [](Scenario& s, const auto& k, const auto& v) { s.servo.enabled = parse_bool(k, v); }},
        {"servo.alpha", [](Scenario& s, const auto& k, const auto& v) { s.servo.alpha = parse_double(k, v); }},
        {"servo.step_threshold_ns", [](Scenario& s, const auto& k, const auto& v) { s.servo.step_threshold = parse_ns(k, v); }},
        {"servo.slew_window_ns", [](Scenario& s, const auto& k, const auto& v) { s.servo.slew_window = parse_ns(k, v); }},
        {"servo.input",
         [](Scenario& s, const auto& k, const auto& v) {
             if (v != "offset" && v != "midpoint")
             {
                 throw ConfigError(k + ": expected offset or midpoint, got '" + v + "'");
             }
             s.servo_input = v == "offset" ? ServoInput::offset : ServoInput::midpoint;
         }},

        {"encryption.scheme",
         [](Scenario& s, const auto& k, const auto& v) {
             try
             {
                 (void)net::EncryptionScheme::by_name(v);
             }
             catch (const ConfigError& e)
             {
                 throw ConfigError(k + ": " + e.what());
             }
             s.encryption = v;
         }},

        {"attack.plan",
         [](Scenario& s, const auto& k, const auto& v) {
             if (v != "none" && v != "selective" && v != "incremental" && v != "asymmetric")
             {
                 throw ConfigError(k + ": expected none, selective, incremental or asymmetric, got '" + v + "'");
             }
             s.attack.plan = v;
         }},
        {"attack.targets",
         [](Scenario& s, const auto& k, const auto& v) {
             try
             {
                 (void)adversary::TargetSet::parse(v);
             }
             catch (const ConfigError& e)
             {
                 throw ConfigError(k + ": " + e.what());
             }
             s.attack.targets = v;
         }},
        {"attack.delay_ns", [](Scenario& s, const auto& k, const auto& v) { s.attack.delay = parse_ns_or_inf(k, v); }},
        {"attack.ramp_ppm", [](Scenario& s, const auto& k, const auto& v) { s.attack.ramp = parse_ppm(k, v); }},
        {"attack.ramp_basis",
         [](Scenario& s, const auto& k, const auto& v) {
             try
             {
                 s.attack.basis = adversary::parse_ramp_basis(v);
             }
             catch (const ConfigError& e)
             {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"attack.direction",
         [](Scenario& s, const auto& k, const auto& v) {
             try
             {
                 s.attack.direction = net::parse_direction(v);
             }
             catch (const ConfigError& e)
             {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"attack.start_ns", [](Scenario& s, const auto& k, const auto& v) { s.attack.start = parse_ns(k, v); }},
        {"attack.end_ns", [](Scenario& s, const auto& k, const auto& v) { s.attack.end = parse_ns(k, v); }},
        {"attack.classifier",
         [](Scenario& s, const auto& k, const auto& v) {
             if (v != "profile" && v != "oracle")
             {
                 throw ConfigError(k + ": expected profile or oracle, got '" + v + "'");
             }
             s.attack.classifier = v == "profile" ? adversary::ClassifierMode::profile : adversary::ClassifierMode::oracle;
         }},
        {"attack.arm_confidence", [](Scenario& s, const auto& k, const auto& v) { s.attack.arm_threshold = parse_double(k, v); }},

        {"guard.d_min_ms_ns", [](Scenario& s, const auto& k, const auto& v) { owd(s).d_min_ms = parse_ns(k, v); }},
        {"guard.d_min_sm_ns", [](Scenario& s, const auto& k, const auto& v) { owd(s).d_min_sm = parse_ns(k, v); }},
        {"guard.rtd_max_ns", [](Scenario& s, const auto& k, const auto& v) { s.guard.rtd_max = parse_ns(k, v); }},
        {"guard.t_interval_ns", [](Scenario& s, const auto& k, const auto& v) { s.guard.t_interval = parse_ns(k, v); }},
        {"guard.rho_ppm", [](Scenario& s, const auto& k, const auto& v) { s.guard.rho = parse_ppm(k, v); }},
        {"guard.replay",
         [](Scenario& s, const auto& k, const auto& v) {
             if (parse_bool(k, v))
             {
                 if (!s.guard.replay)
                 {
                     s.guard.replay = guard::ReplayPolicy{};
                 }
             }
             else
             {
                 s.guard.replay.reset();
             }
         }},
        {"guard.replay_window",
         [](Scenario& s, const auto& k, const auto& v) {
             if (!s.guard.replay)
             {
                 s.guard.replay = guard::ReplayPolicy{};
             }
             s.guard.replay->window = parse_int<std::uint32_t>(k, v);
         }},
        {"guard.padding",
         [](Scenario& s, const auto& k, const auto& v) {
             try
             {
                 s.guard.padding = guard::PaddingPolicy::parse(v);
             }
             catch (const ConfigError& e)
             {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"guard.random_t0_lo_ns", [](Scenario& s, const auto& k, const auto& v) { range(s.guard.timing.followup_lag).lo = parse_ns(k, v); }},
        {"guard.random_t0_hi_ns", [](Scenario& s, const auto& k, const auto& v) { range(s.guard.timing.followup_lag).hi = parse_ns(k, v); }},
        {"guard.random_t1_lo_ns", [](Scenario& s, const auto& k, const auto& v) { range(s.guard.timing.delayreq_lag).lo = parse_ns(k, v); }},
        {"guard.random_t1_hi_ns", [](Scenario& s, const auto& k, const auto& v) { range(s.guard.timing.delayreq_lag).hi = parse_ns(k, v); }},
        {"guard.random_sync_lo_ns", [](Scenario& s, const auto& k, const auto& v) { range(s.guard.timing.sync_jitter).lo = parse_ns(k, v); }},
        {"guard.random_sync_hi_ns", [](Scenario& s, const auto& k, const auto& v) { range(s.guard.timing.sync_jitter).hi = parse_ns(k, v); }},
        {"guard.random_seed", [](Scenario& s, const auto& k, const auto& v) { s.guard.timing.seed = parse_int<std::uint64_t>(k, v); }},
        {"guard.suspicion_factor", [](Scenario& s, const auto& k, const auto& v) { s.guard.suspicion_factor = parse_double(k, v); }},

        {"noise.p_per_ms", [](Scenario& s, const auto& k, const auto& v) { s.noise.p_per_ms = parse_double(k, v); }},
        {"noise.len_lo", [](Scenario& s, const auto& k, const auto& v) { s.noise.len_lo = parse_int<std::uint32_t>(k, v); }},
        {"noise.len_hi", [](Scenario& s, const auto& k, const auto& v) { s.noise.len_hi = parse_int<std::uint32_t>(k, v); }},
        {"noise.mode",
         [](Scenario& s, const auto& k, const auto& v) {
             try
             {
                 s.noise_mode = net::parse_noise_mode(v);
             }
             catch (const ConfigError& e)
             {
                 throw ConfigError(k + ": " + e.what());
             }
         }},

        {"cover.rate_ms_per_s", [](Scenario& s, const auto& k, const auto& v) { s.cover.rate_ms = parse_double(k, v); }},
        {"cover.rate_sm_per_s", [](Scenario& s, const auto& k, const auto& v) { s.cover.rate_sm = parse_double(k, v); }},
        {"cover.len_lo", [](Scenario& s, const auto& k, const auto& v) { s.cover.len_lo = parse_int<std::uint32_t>(k, v); }},
        {"cover.len_hi", [](Scenario& s, const auto& k, const auto& v) { s.cover.len_hi = parse_int<std::uint32_t>(k, v); }},
    };
    return table;
}

} // namespace

ClockModel ClockConfig::build(std::uint64_t seed) const
{
    std::optional<ClockNoise> n;
    if (noise_sigma > Duration{})
    {
        n = ClockNoise{noise_sigma, noise_step > Duration{} ? noise_step : Duration(1'000'000'000), seed};
    }
    return ClockModel(offset, drift, n);
}

net::Jitter JitterSpec::build() const
{
    if (kind == "uniform")
    {
        return net::jitter::Uniform{lo, hi};
    }
    if (kind == "normal")
    {
        return net::jitter::TruncatedNormal{mean, sigma};
    }
    return net::jitter::None{};
}

adversary::AttackPlan AttackSpec::build() const
{
    adversary::AttackPlan p;
    p.start = SimTime::from_duration(start);
    p.end = end ? SimTime::from_duration(*end) : SimTime::max();
    if (plan == "selective")
    {
        p.kind = adversary::plan::Selective{adversary::TargetSet::parse(targets), delay};
    }
    else if (plan == "incremental")
    {
        p.kind = adversary::plan::Incremental{adversary::TargetSet::parse(targets), ramp, basis};
    }
    else if (plan == "asymmetric")
    {
        p.kind = adversary::plan::AsymmetricLink{direction, delay};
    }
    return p;
}

void Scenario::validate() const
{
    if (duration <= Duration{})
    {
        throw ConfigError("duration_ns must be positive");
    }
    if (converge_window <= Duration{})
    {
        throw ConfigError("converge_window_ns must be positive");
    }
    engine.validate();
    servo.validate();
    net::LinkProfile l = link;
    l.jitter = jitter.build();
    l.validate();
    if (jitter.kind == "uniform" && (jitter.lo < Duration{} || jitter.hi < jitter.lo))
    {
        throw ConfigError("link.jitter_lo_ns/link.jitter_hi_ns need 0 <= lo <= hi");
    }
    const auto scheme = net::EncryptionScheme::by_name(encryption);
    guard::validate_padding(guard.padding, scheme);
    if (guard.owd)
    {
        guard.owd->validate();
    }
    if (guard.rtd_max && guard.owd)
    {
        guard::SystemBoundParams{*guard.rtd_max, guard.t_interval, guard.rho}.validate(*guard.owd);
    }
    if (guard.replay)
    {
        guard.replay->validate();
    }
    if (guard.timing.active())
    {
        guard.timing.validate(engine);
    }
    if (guard.suspicion_factor <= 1.0)
    {
        throw ConfigError("guard.suspicion_factor must exceed 1");
    }
    if (servo_input == ServoInput::midpoint && !guard.owd)
    {
        throw ConfigError("servo.input=midpoint needs guard.d_min_ms_ns / guard.d_min_sm_ns");
    }
    noise.validate();
    if (cover.rate_ms < 0 || cover.rate_sm < 0)
    {
        throw ConfigError("cover rates must be >= 0");
    }
    if (cover.len_lo == 0 || cover.len_hi < cover.len_lo)
    {
        throw ConfigError("cover length range must satisfy 0 < len_lo <= len_hi");
    }
    attack.build().validate();
    if (!(attack.arm_threshold >= 0.0 && attack.arm_threshold <= 1.0))
    {
        throw ConfigError("attack.arm_confidence must lie in [0, 1]");
    }
}

void apply_setting(Scenario& s, const std::string& key, const std::string& value)
{
    for (const auto& [k, set] : setters())
    {
        if (k == key)
        {
            set(s, key, value);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

const std::vector<std::string>& scenario_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> v;
        for (const auto& [k, set] : setters())
        {
            (void)set;
            v.push_back(k);
        }
        return v;
    }();
    return keys;
}

Scenario parse_scenario(std::istream& in, const std::string& origin)
{
    Scenario s;
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
        {
            continue;
        }
        const auto where = origin + ":" + std::to_string(line_no) + ": ";
        const auto eq = t.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError(where + "expected key=value, got '" + t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (auto it = seen.find(key); it != seen.end())
        {
            throw ConfigError(where + "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
        }
        seen.emplace(key, line_no);
        try
        {
            apply_setting(s, key, value);
        }
        catch (const ConfigError& e)
        {
            throw ConfigError(where + e.what());
        }
    }
    try
    {
        s.validate();
    }
    catch (const ConfigError& e)
    {
        throw ConfigError(origin + ": " + e.what());
    }
    return s;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin)
{
    std::istringstream in(text);
    return parse_scenario(in, origin);
}

Scenario load_scenario(const std::string& path_or_builtin)
{
    static const std::string prefix = "builtin:";
    if (path_or_builtin.rfind(prefix, 0) == 0)
    {
        return bundled_scenario(path_or_builtin.substr(prefix.size()));
    }
    std::ifstream in(path_or_builtin);
    if (!in)
    {
        throw ConfigError("cannot open scenario file " + path_or_builtin);
    }
    return parse_scenario(in, path_or_builtin);
}

} // namespace ptpdelay::harness
