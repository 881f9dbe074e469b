#include "ptpdelay/harness/traces.hpp"

#include "ptpdelay/adversary/attack.hpp"
#include "ptpdelay/detect/profile.hpp"
#include "ptpdelay/error.hpp"
#include "ptpdelay/net/observe.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace ptpdelay::harness
{

namespace
{

class CsvReader
{
public:
    CsvReader(std::istream& in, std::string header, std::size_t fields)
        : in_(in), header_(std::move(header)), fields_(fields)
    {
        std::string line;
        if (!std::getline(in_, line) || line != "# " + header_)
        {
            throw ConfigError("not a " + header_ + " file (missing '# " + header_ + "' header)");
        }
        line_no_ = 1;
    }

    // Next record split on commas; false at end of input.
    bool next(std::vector<std::string_view>& out)
    {
        while (std::getline(in_, line_))
        {
            ++line_no_;
            if (line_.empty() || line_.front() == '#')
            {
                continue;
            }
            out.clear();
            std::string_view rest(line_);
            for (;;)
            {
                const auto c = rest.find(',');
                out.push_back(rest.substr(0, c));
                if (c == std::string_view::npos)
                {
                    break;
                }
                rest.remove_prefix(c + 1);
            }
            if (out.size() != fields_)
            {
                fail("expected " + std::to_string(fields_) + " fields, got " + std::to_string(out.size()));
            }
            return true;
        }
        return false;
    }

    std::int64_t int_at(std::string_view v) const
    {
        std::int64_t x = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
        if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        {
            fail("bad number '" + std::string(v) + "'");
        }
        return x;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError(header_ + " line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& in_;
    std::string header_;
    std::size_t fields_;
    std::string line_;
    std::size_t line_no_ = 0;
};

std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream f(p);
    if (!f)
    {
        throw ConfigError("cannot write " + p.string());
    }
    return f;
}

std::ifstream open_in(const std::filesystem::path& p)
{
    std::ifstream f(p);
    if (!f)
    {
        throw ConfigError("cannot open " + p.string());
    }
    return f;
}

} // namespace

void write_sync_trace(std::ostream& out, std::span<const SyncRecord> rows)
{
    out << "# sync-trace v1\n";
    for (const auto& r : rows)
    {
        out << r.at.ns() << ',' << r.seq << ',' << r.rtd.ns() << ',' << r.measured.ns() << ',' << r.true_offset.ns() << ','
            << r.correction.ns() << '\n';
    }
}

std::vector<SyncRecord> read_sync_trace(std::istream& in)
{
    CsvReader csv(in, "sync-trace v1", 6);
    std::vector<SyncRecord> rows;
    std::vector<std::string_view> f;
    while (csv.next(f))
    {
        SyncRecord r;
        r.at = SimTime(csv.int_at(f[0]));
        r.seq = static_cast<std::uint64_t>(csv.int_at(f[1]));
        r.rtd = Duration(csv.int_at(f[2]));
        r.measured = Duration(csv.int_at(f[3]));
        r.true_offset = Duration(csv.int_at(f[4]));
        r.correction = Duration(csv.int_at(f[5]));
        rows.push_back(r);
    }
    return rows;
}

void write_bound_trace(std::ostream& out, std::span<const BoundRecord> rows)
{
    out << "# bound-trace v1\n";
    for (const auto& r : rows)
    {
        out << r.at.ns() << ',' << r.seq << ',' << r.bound.low.ns() << ',' << r.bound.high.ns() << ',' << r.midpoint.ns() << ','
            << r.true_offset.ns() << ',' << (r.accepted ? 1 : 0) << '\n';
    }
}

std::vector<BoundRecord> read_bound_trace(std::istream& in)
{
    CsvReader csv(in, "bound-trace v1", 7);
    std::vector<BoundRecord> rows;
    std::vector<std::string_view> f;
    while (csv.next(f))
    {
        BoundRecord r;
        r.at = SimTime(csv.int_at(f[0]));
        r.seq = static_cast<std::uint64_t>(csv.int_at(f[1]));
        r.bound = {Duration(csv.int_at(f[2])), Duration(csv.int_at(f[3]))};
        r.midpoint = Duration(csv.int_at(f[4]));
        r.true_offset = Duration(csv.int_at(f[5]));
        const auto acc = csv.int_at(f[6]);
        if (acc != 0 && acc != 1)
        {
            csv.fail("accepted must be 0 or 1");
        }
        r.accepted = acc == 1;
        if (r.bound.high < r.bound.low)
        {
            csv.fail("low exceeds high");
        }
        const auto w = r.bound.width().ns();
        r.residual = Duration(w / 2 + w % 2);
        rows.push_back(r);
    }
    return rows;
}

void write_oracle_trace(std::ostream& out, std::span<const OracleRecord> rows)
{
    out << "# oracle-trace v1\n";
    for (const auto& r : rows)
    {
        out << r.at.ns() << ',' << r.seq << ',' << r.measured_2x.ns() << ',' << r.real_2x.ns() << ',' << r.intrinsic_2x.ns() << ','
            << r.asymmetry_2x.ns() << ',' << r.envelope_2x.ns() << ',' << r.owd_ms.ns() << ',' << r.owd_sm.ns() << ','
            << (r.parts_ms.attack + r.parts_ms.queueing).ns() << ',' << (r.parts_sm.attack + r.parts_sm.queueing).ns() << ','
            << r.parts_ms.jitter.ns() << ',' << r.parts_sm.jitter.ns() << ',' << (r.identity_ok ? 1 : 0) << ','
            << (r.decomposition_ok ? 1 : 0) << '\n';
    }
}

void write_summary(std::ostream& out, const RunSummary& s)
{
    out << "# summary v1\n";
    for (const auto& [k, v] : s.fields())
    {
        out << k << '=' << v << '\n';
    }
}

std::map<std::string, std::string> read_summary(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "# summary v1")
    {
        throw ConfigError("not a summary v1 file");
    }
    std::map<std::string, std::string> kv;
    while (std::getline(in, line))
    {
        if (line.empty() || line.front() == '#')
        {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("summary line without '=': " + line);
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

void write_run(const RunResult& r, const std::string& dir)
{
    namespace fs = std::filesystem;
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec)
    {
        throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    }
    {
        auto f = open_out(root / files::sync);
        write_sync_trace(f, r.sync);
    }
    if (r.scenario.guard.owd)
    {
        auto f = open_out(root / files::bound);
        write_bound_trace(f, r.bounds);
    }
    if (r.scenario.write_obs_trace)
    {
        auto f = open_out(root / files::obs);
        net::write_obs_trace(f, r.observations);
    }
    {
        auto f = open_out(root / files::attack);
        adversary::write_attack_trace(f, r.attack);
    }
    {
        auto f = open_out(root / files::oracle);
        write_oracle_trace(f, r.oracle);
    }
    if (r.detection)
    {
        auto f = open_out(root / files::profile);
        detect::write_profile(f, r.detection->profile);
    }
    auto f = open_out(root / files::summary);
    write_summary(f, r.summary);
}

VerifyReport verify_bounds(const std::string& dir)
{
    namespace fs = std::filesystem;
    const fs::path root(dir);
    auto bf = open_in(root / files::bound);
    auto sf = open_in(root / files::sync);
    const auto bounds = read_bound_trace(bf);
    const auto sync = read_sync_trace(sf);

    std::unordered_map<std::uint64_t, const SyncRecord*> by_seq;
    for (const auto& s : sync)
    {
        by_seq[s.seq] = &s;
    }

    VerifyReport rep;
    const auto note = [&](const std::string& m) {
        if (rep.messages.size() < 20)
        {
            rep.messages.push_back(m);
        }
    };
    for (const auto& b : bounds)
    {
        ++rep.rows;
        const auto it = by_seq.find(b.seq);
        if (it == by_seq.end() || it->second->true_offset != b.true_offset || it->second->at != b.at)
        {
            ++rep.consistency_errors;
            note("seq " + std::to_string(b.seq) + ": no matching sync-trace row");
        }
        if (!b.accepted)
        {
            continue;
        }
        ++rep.accepted;
        if (!b.bound.contains(b.true_offset))
        {
            ++rep.bound_violations;
            note("seq " + std::to_string(b.seq) + ": true offset " + std::to_string(b.true_offset.ns()) + " outside [" +
                 std::to_string(b.bound.low.ns()) + ", " + std::to_string(b.bound.high.ns()) + "]");
        }
        if (abs(b.true_offset - b.midpoint) > b.residual)
        {
            ++rep.midpoint_violations;
            note("seq " + std::to_string(b.seq) + ": |true - midpoint| exceeds residual " + std::to_string(b.residual.ns()));
        }
    }
    return rep;
}

} // namespace ptpdelay::harness
