#include "ptpdelay/adversary/attack.hpp"

#include "ptpdelay/error.hpp"

#include <ostream>
#include <sstream>

namespace ptpdelay::adversary
{

TargetSet::TargetSet(std::initializer_list<ptp::MessageKind> kinds)
{
    for (const auto k : kinds)
    {
        bits_ |= 1U << static_cast<unsigned>(k);
    }
}

TargetSet TargetSet::parse(const std::string& text)
{
    TargetSet t;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        const auto k = ptp::parse_kind(item);
        if (!k)
        {
            throw ConfigError("unknown message kind '" + item + "' in target list");
        }
        t.bits_ |= 1U << static_cast<unsigned>(*k);
    }
    return t;
}

std::string TargetSet::to_string() const
{
    std::string out;
    for (const auto k : ptp::kAllKinds)
    {
        if (contains(k))
        {
            if (!out.empty())
            {
                out += ',';
            }
            out += ptp::to_string(k);
        }
    }
    return out;
}

RampBasis parse_ramp_basis(const std::string& s)
{
    if (s == "elapsed")
    {
        return RampBasis::elapsed;
    }
    if (s == "offset_rate")
    {
        return RampBasis::offset_rate;
    }
    throw ConfigError("bad ramp basis '" + s + "' (expected elapsed or offset_rate)");
}

std::string_view to_string(RampBasis b) noexcept
{
    return b == RampBasis::elapsed ? "elapsed" : "offset_rate";
}

bool AttackPlan::needs_classifier() const noexcept
{
    return std::holds_alternative<plan::Selective>(kind) || std::holds_alternative<plan::Incremental>(kind);
}

void AttackPlan::validate() const
{
    if (end < start)
    {
        throw ConfigError("attack.end_ns precedes attack.start_ns");
    }
    if (const auto* s = std::get_if<plan::Selective>(&kind))
    {
        if (s->delay < Duration{})
        {
            throw ConfigError("attack.delay_ns must be >= 0: the attacker cannot accelerate packets");
        }
        if (s->targets.empty())
        {
            throw ConfigError("selective attack needs attack.targets");
        }
    }
    if (const auto* i = std::get_if<plan::Incremental>(&kind))
    {
        if (i->ramp.num < 0)
        {
            throw ConfigError("attack.ramp_ppm must be >= 0");
        }
        if (i->targets.empty())
        {
            throw ConfigError("incremental attack needs attack.targets");
        }
    }
    if (const auto* a = std::get_if<plan::AsymmetricLink>(&kind))
    {
        if (a->delay < Duration{})
        {
            throw ConfigError("attack.delay_ns must be >= 0");
        }
    }
}

Duration incremental_schedule(DriftRate ramp, SimTime start, SimTime now, RampBasis basis)
{
    if (now < start)
    {
        return Duration{};
    }
    const Duration d = ramp.apply(now - start);
    return basis == RampBasis::offset_rate ? d * 2 : d;
}

Duration decide_delay(const net::Observation& obs, const AttackPlan& plan, const detect::Label& label, SimTime now)
{
    if (!plan.active(now))
    {
        return Duration{};
    }
    return std::visit(
        [&](const auto& p) -> Duration {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, plan::None>)
            {
                return Duration{};
            }
            else if constexpr (std::is_same_v<T, plan::Selective>)
            {
                return label.kind && p.targets.contains(*label.kind) ? p.delay : Duration{};
            }
            else if constexpr (std::is_same_v<T, plan::Incremental>)
            {
                return label.kind && p.targets.contains(*label.kind) ? incremental_schedule(p.ramp, plan.start, now, p.basis)
                                                                     : Duration{};
            }
            else
            {
                return obs.direction == p.direction ? p.delay : Duration{};
            }
        },
        plan.kind);
}

void write_attack_trace(std::ostream& out, std::span<const AttackRecord> rows)
{
    out << "# attack-trace v1\n";
    for (const auto& r : rows)
    {
        out << r.at.ns() << ',' << r.label << ',';
        if (r.delay.is_infinite())
        {
            out << "inf";
        }
        else
        {
            out << r.delay.ns();
        }
        out << '\n';
    }
}

Adversary::Adversary(AdversaryConfig config, OracleClassifier::Lookup oracle)
    : config_(std::move(config)), oracle_(std::move(oracle))
{
    config_.plan.validate();
    if (config_.classifier == ClassifierMode::oracle)
    {
        if (!oracle_)
        {
            throw ConfigError("oracle classifier requested without ground truth");
        }
        classifier_ = std::make_unique<OracleClassifier>(oracle_);
        arm_.armed = true;
        arm_.confidence = 1.0;
        arm_.note = "oracle classifier";
    }
    else if (!config_.plan.needs_classifier())
    {
        arm_.armed = true;
        arm_.note = "plan needs no classification";
    }
}

const ArmResult& Adversary::arm(std::span<const net::Observation> observed)
{
    if (arm_attempted_ || config_.classifier == ClassifierMode::oracle || !config_.plan.needs_classifier())
    {
        return arm_;
    }
    arm_attempted_ = true;
    try
    {
        auto opts = config_.detect;
        opts.arm_threshold = config_.arm_threshold;
        const auto report = detect::detect(observed, opts);
        arm_.profile = report.profile;
        arm_.confidence = report.profile.confidence;
        arm_.armed = report.profile.confidence >= config_.arm_threshold;
        arm_.note = arm_.armed ? "armed" : "confidence below arming threshold";
        if (arm_.armed)
        {
            classifier_ = std::make_unique<ProfileClassifier>(report.profile);
        }
    }
    catch (const DetectError& e)
    {
        arm_.armed = false;
        arm_.confidence = 0.0;
        arm_.note = std::string("detector failed: ") + e.what();
    }
    return arm_;
}

Duration Adversary::on_packet(const net::Observation& obs, net::EnvelopeHandle handle)
{
    const SimTime now = obs.seen_at;
    detect::Label label;
    // The online classifier tracks message order, so it sees every packet.
    if (classifier_)
    {
        label = classifier_->label(obs, handle);
    }
    if (!config_.plan.active(now))
    {
        return Duration{};
    }
    const Duration delay = arm_.armed ? decide_delay(obs, config_.plan, label, now) : Duration{};
    const std::string name = classifier_ ? std::string(label.name()) : std::string("Unclassified");
    log_.push_back({now, name, delay});
    if (delay.is_infinite())
    {
        ++dropped_;
    }
    else if (delay > Duration{})
    {
        ++delayed_;
        max_injected_ = std::max(max_injected_, delay);
    }
    return delay;
}

} // namespace ptpdelay::adversary
