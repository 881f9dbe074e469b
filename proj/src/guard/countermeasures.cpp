#include "ptpdelay/guard/countermeasures.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/ptp/message.hpp"
#include "ptpdelay/sim/random.hpp"

#include <algorithm>

namespace ptpdelay::guard
{

void ReplayPolicy::validate() const
{
    if (window < 1 || window > 64)
    {
        throw ConfigError("guard.replay_window must lie in [1, 64]");
    }
}

ReplayWindow::ReplayWindow(ReplayPolicy policy) : policy_(policy)
{
    policy_.validate();
}

bool ReplayWindow::accept(std::uint64_t seq)
{
    if (!highest_ || seq > *highest_)
    {
        const std::uint64_t shift = highest_ ? seq - *highest_ : 64;
        seen_ = shift >= 64 ? 0 : seen_ << shift;
        seen_ |= 1;
        highest_ = seq;
        return true;
    }
    const std::uint64_t diff = *highest_ - seq;
    if (diff >= policy_.window || (seen_ >> diff) & 1U)
    {
        ++rejected_;
        return false;
    }
    seen_ |= std::uint64_t{1} << diff;
    return true;
}

PaddingPolicy PaddingPolicy::parse(const std::string& text)
{
    if (text == "none")
    {
        return {};
    }
    if (text == "max")
    {
        return {Kind::per_scheme_max, 0};
    }
    if (text.rfind("fixed:", 0) == 0)
    {
        try
        {
            std::size_t used = 0;
            const unsigned long v = std::stoul(text.substr(6), &used);
            if (used == text.size() - 6 && v > 0 && v <= 65535)
            {
                return {Kind::fixed, static_cast<std::uint32_t>(v)};
            }
        }
        catch (const std::exception&)
        {
        }
    }
    throw ConfigError("bad padding policy '" + text + "' (expected none, max or fixed:<bytes>)");
}

std::string PaddingPolicy::to_string() const
{
    switch (kind)
    {
    case Kind::none:
        return "none";
    case Kind::per_scheme_max:
        return "max";
    case Kind::fixed:
        return "fixed:" + std::to_string(target);
    }
    return "none";
}

std::uint32_t max_ptp_wire_length(const net::EncryptionScheme& scheme)
{
    std::uint32_t m = 0;
    for (const auto k : ptp::kAllKinds)
    {
        m = std::max(m, scheme.encrypt_wrap(ptp::plain_length(k)));
    }
    return m;
}

void validate_padding(const PaddingPolicy& policy, const net::EncryptionScheme& scheme)
{
    if (policy.kind == PaddingPolicy::Kind::fixed && policy.target < max_ptp_wire_length(scheme))
    {
        throw ConfigError("padding target " + std::to_string(policy.target) + " B is below the largest wrapped PTP length " +
                          std::to_string(max_ptp_wire_length(scheme)) + " B");
    }
}

std::uint32_t apply_padding(std::uint32_t plain_length, const PaddingPolicy& policy, const net::EncryptionScheme& scheme)
{
    validate_padding(policy, scheme);
    const std::uint32_t wrapped = scheme.encrypt_wrap(plain_length);
    switch (policy.kind)
    {
    case PaddingPolicy::Kind::none:
        return wrapped;
    case PaddingPolicy::Kind::fixed:
        return std::max(wrapped, policy.target);
    case PaddingPolicy::Kind::per_scheme_max:
        return std::max(wrapped, max_ptp_wire_length(scheme));
    }
    return wrapped;
}

void TimingRandomization::validate(const ptp::EngineConfig& config) const
{
    for (const auto* r : {&followup_lag, &delayreq_lag, &sync_jitter})
    {
        if (*r && ((*r)->lo < Duration{} || (*r)->hi < (*r)->lo))
        {
            throw ConfigError("timing randomization ranges need 0 <= lo <= hi");
        }
    }
    if (followup_lag && followup_lag->lo <= Duration{})
    {
        throw ConfigError("guard.random_t0 range must stay positive");
    }
    const Duration t0_max = followup_lag ? followup_lag->hi : config.followup_lag;
    const Duration t1_max = delayreq_lag ? delayreq_lag->hi : config.delayreq_lag;
    const Duration jitter_max = sync_jitter ? sync_jitter->hi : Duration{};
    if (jitter_max + t0_max + t1_max >= config.sync_interval)
    {
        throw ConfigError("randomized lags must fit inside one sync interval");
    }
}

ptp::LagSource randomize_timing(const ptp::EngineConfig& config, const TimingRandomization& r)
{
    r.validate(config);
    return [config, r](std::uint64_t seq) {
        const auto draw = [&](const std::optional<LagRange>& range, Duration fixed, std::uint64_t stream) {
            if (!range)
            {
                return fixed;
            }
            const auto span = static_cast<std::uint64_t>((range->hi - range->lo).ns()) + 1;
            const std::uint64_t bits = mix_seed(r.seed, seq * 4 + stream);
            return range->lo + Duration(static_cast<std::int64_t>(bits % span));
        };
        return ptp::CycleLags{draw(r.sync_jitter, Duration{}, 0), draw(r.followup_lag, config.followup_lag, 1),
                              draw(r.delayreq_lag, config.delayreq_lag, 2)};
    };
}

} // namespace ptpdelay::guard
