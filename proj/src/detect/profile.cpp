#include "ptpdelay/detect/profile.hpp"

#include "ptpdelay/error.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace ptpdelay::detect
{

std::string_view to_string(PtpProfile::Mode m) noexcept
{
    return m == PtpProfile::Mode::periodic ? "periodic" : "sequence";
}

bool PtpProfile::matches(const PtpProfile& truth, Duration tolerance) const
{
    const auto near = [&](Duration a, Duration b) { return abs(a - b) <= tolerance; };
    return near(t0, truth.t0) && near(t1, truth.t1) && near(t2, truth.t2) && near(t3, truth.t3) && x == truth.x &&
           x_req == truth.x_req && y == truth.y;
}

void write_profile(std::ostream& out, const PtpProfile& p)
{
    out << "# ptp-profile v1\n";
    out << "mode=" << to_string(p.mode) << '\n';
    out << "t0_ns=" << p.t0.ns() << '\n';
    out << "t1_ns=" << p.t1.ns() << '\n';
    out << "t2_ns=" << p.t2.ns() << '\n';
    out << "t3_ns=" << p.t3.ns() << '\n';
    out << "x=" << p.x << '\n';
    out << "x_req=" << p.x_req << '\n';
    out << "y=" << p.y << '\n';
    out << "announce_period_ns=" << p.announce_period.ns() << '\n';
    out << "sync_phase_ns=" << p.sync_phase.ns() << '\n';
    out << "announce_phase_ns=" << p.announce_phase.ns() << '\n';
    out << "use_direction=" << (p.use_direction ? 1 : 0) << '\n';
    out.precision(6);
    out << "confidence=" << std::fixed << p.confidence << '\n';
    out.unsetf(std::ios::floatfield);
}

PtpProfile read_profile(std::istream& in)
{
    std::string line;
    std::map<std::string, std::string> kv;
    bool header = false;
    while (std::getline(in, line))
    {
        if (line.empty())
        {
            continue;
        }
        if (line[0] == '#')
        {
            header = header || line == "# ptp-profile v1";
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("profile line without '=': " + line);
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (!header)
    {
        throw ConfigError("missing '# ptp-profile v1' header");
    }
    const auto get = [&](const std::string& k) -> const std::string& {
        const auto it = kv.find(k);
        if (it == kv.end())
        {
            throw ConfigError("profile is missing key " + k);
        }
        return it->second;
    };
    const auto ns = [&](const std::string& k) { return Duration(std::stoll(get(k))); };
    const auto len = [&](const std::string& k) { return static_cast<std::uint32_t>(std::stoul(get(k))); };
    PtpProfile p;
    try
    {
        const std::string& mode = get("mode");
        if (mode != "periodic" && mode != "sequence")
        {
            throw ConfigError("bad profile mode " + mode);
        }
        p.mode = mode == "periodic" ? PtpProfile::Mode::periodic : PtpProfile::Mode::sequence;
        p.t0 = ns("t0_ns");
        p.t1 = ns("t1_ns");
        p.t2 = ns("t2_ns");
        p.t3 = ns("t3_ns");
        p.x = len("x");
        p.x_req = len("x_req");
        p.y = len("y");
        p.announce_period = ns("announce_period_ns");
        p.sync_phase = ns("sync_phase_ns");
        p.announce_phase = ns("announce_phase_ns");
        p.use_direction = get("use_direction") != "0";
        p.confidence = std::stod(get("confidence"));
    }
    catch (const std::logic_error& e)
    {
        throw ConfigError(std::string("malformed profile value: ") + e.what());
    }
    return p;
}

void write_profile_file(const std::string& path, const PtpProfile& p)
{
    std::ofstream out(path);
    if (!out)
    {
        throw ConfigError("cannot write " + path);
    }
    write_profile(out, p);
}

PtpProfile read_profile_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot read " + path);
    }
    return read_profile(in);
}

void write_classified_trace(std::ostream& out, std::span<const ClassifiedObservation> rows)
{
    out << "# classified-trace v1\n";
    for (const auto& r : rows)
    {
        out << r.obs.seen_at.ns() << ',' << r.obs.wire_length << ',' << net::to_string(r.obs.direction) << ','
            << r.label.name() << '\n';
    }
}

} // namespace ptpdelay::detect
