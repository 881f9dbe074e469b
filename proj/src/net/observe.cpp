#include "ptpdelay/net/observe.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/sim/random.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ptpdelay::net
{

std::optional<Observation> NoiseSource::at_bin(std::int64_t bin) const
{
    if (p_per_ms <= 0.0)
    {
        return std::nullopt;
    }
    std::uint64_t h = mix_seed(seed, static_cast<std::uint64_t>(bin));
    if (p_per_ms < 1.0 && unit_interval(h) >= p_per_ms)
    {
        return std::nullopt;
    }
    h = splitmix64(h);
    const std::uint64_t span = static_cast<std::uint64_t>(len_hi - len_lo) + 1;
    const auto length = len_lo + static_cast<std::uint32_t>(h % span);
    h = splitmix64(h);
    const Direction dir = (h & 1U) != 0 ? Direction::slave_to_master : Direction::master_to_slave;
    h = splitmix64(h);
    const auto within = static_cast<std::int64_t>(h % static_cast<std::uint64_t>(kBinNs));
    return Observation{SimTime(bin * kBinNs + within), length, dir};
}

std::vector<Observation> NoiseSource::observations(std::int64_t begin_bin, std::int64_t end_bin) const
{
    std::vector<Observation> out;
    if (p_per_ms <= 0.0)
    {
        return out;
    }
    out.reserve(static_cast<std::size_t>(static_cast<double>(std::max<std::int64_t>(0, end_bin - begin_bin)) * p_per_ms * 1.01) + 16);
    for (std::int64_t b = begin_bin; b < end_bin; ++b)
    {
        if (auto o = at_bin(b))
        {
            out.push_back(*o);
        }
    }
    return out;
}

std::vector<Observation> NoiseSource::observations_in_free_bins(std::int64_t begin_bin, std::int64_t end_bin,
                                                                const std::unordered_set<std::int64_t>& occupied) const
{
    std::vector<Observation> out;
    if (p_per_ms <= 0.0)
    {
        return out;
    }
    for (std::int64_t b = begin_bin; b < end_bin; ++b)
    {
        if (occupied.contains(b))
        {
            continue;
        }
        if (auto o = at_bin(b))
        {
            out.push_back(*o);
        }
    }
    return out;
}

void NoiseSource::validate() const
{
    if (!(p_per_ms >= 0.0 && p_per_ms <= 1.0))
    {
        throw ConfigError("noise.p_per_ms must lie in [0, 1]");
    }
    if (len_lo == 0 || len_hi < len_lo)
    {
        throw ConfigError("noise length range must satisfy 0 < len_lo <= len_hi");
    }
}

NoiseMode parse_noise_mode(const std::string& s)
{
    if (s == "independent")
    {
        return NoiseMode::independent;
    }
    if (s == "free_bins")
    {
        return NoiseMode::free_bins;
    }
    throw ConfigError("bad noise mode '" + s + "' (expected independent or free_bins)");
}

std::string_view to_string(NoiseMode m) noexcept
{
    return m == NoiseMode::independent ? "independent" : "free_bins";
}

std::vector<Observation> with_noise(std::span<const Observation> real, const NoiseSource& noise, NoiseMode mode,
                                    std::int64_t begin_bin, std::int64_t end_bin)
{
    if (noise.p_per_ms <= 0.0)
    {
        return {real.begin(), real.end()};
    }
    std::vector<Observation> extra;
    if (mode == NoiseMode::independent)
    {
        extra = noise.observations(begin_bin, end_bin);
    }
    else
    {
        std::unordered_set<std::int64_t> occupied;
        occupied.reserve(real.size() * 2);
        for (const auto& o : real)
        {
            occupied.insert(bin_of(o.seen_at));
        }
        extra = noise.observations_in_free_bins(begin_bin, end_bin, occupied);
    }
    return merge_by_time(real, extra);
}

std::vector<Observation> tap(std::span<const Envelope> envelopes, const LinkProfile& link)
{
    std::vector<Observation> out;
    out.reserve(envelopes.size());
    for (const auto& env : envelopes)
    {
        out.push_back({env.send_time + link.tap_offset(env.direction), env.wire_length, env.direction});
    }
    std::stable_sort(out.begin(), out.end(), [](const Observation& a, const Observation& b) { return a.seen_at < b.seen_at; });
    return out;
}

std::vector<Observation> merge_by_time(std::span<const Observation> a, std::span<const Observation> b)
{
    std::vector<Observation> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
               [](const Observation& x, const Observation& y) { return x.seen_at < y.seen_at; });
    return out;
}

void write_obs_trace(std::ostream& out, std::span<const Observation> obs)
{
    out << "# obs-trace v1\n";
    for (const auto& o : obs)
    {
        out << o.seen_at.ns() << ',' << o.wire_length << ',' << to_string(o.direction) << '\n';
    }
}

std::vector<Observation> read_obs_trace(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "# obs-trace v1")
    {
        throw ConfigError("not an obs-trace v1 file (missing '# obs-trace v1' header)");
    }
    std::vector<Observation> out;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line.front() == '#')
        {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
        {
            throw ConfigError("obs-trace line " + std::to_string(line_no) + ": expected 3 fields");
        }
        std::int64_t t = 0;
        std::uint32_t len = 0;
        const char* b = line.data();
        if (std::from_chars(b, b + c1, t).ec != std::errc{} ||
            std::from_chars(b + c1 + 1, b + c2, len).ec != std::errc{} || t < 0)
        {
            throw ConfigError("obs-trace line " + std::to_string(line_no) + ": bad number");
        }
        out.push_back({SimTime(t), len, parse_direction(std::string_view(line).substr(c2 + 1))});
    }
    if (!std::is_sorted(out.begin(), out.end(), [](const Observation& x, const Observation& y) { return x.seen_at < y.seen_at; }))
    {
        throw ConfigError("obs-trace records are not sorted by time");
    }
    return out;
}

void write_obs_trace_file(const std::string& path, std::span<const Observation> obs)
{
    std::ofstream f(path);
    if (!f)
    {
        throw ConfigError("cannot write " + path);
    }
    write_obs_trace(f, obs);
}

std::vector<Observation> read_obs_trace_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
    {
        throw ConfigError("cannot open " + path);
    }
    return read_obs_trace(f);
}

} // namespace ptpdelay::net
