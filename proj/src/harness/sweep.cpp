#include "ptpdelay/harness/sweep.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/harness/simulation.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
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
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Tabs and newlines would break the table.
std::string cell(std::string v)
{
    for (auto& c : v)
    {
        if (c == '\t' || c == '\n' || c == '\r')
        {
            c = ' ';
        }
    }
    return v;
}

} // namespace

std::size_t Grid::points() const
{
    if (axes.empty())
    {
        return 0;
    }
    std::size_t n = 1;
    for (const auto& [k, vs] : axes)
    {
        (void)k;
        n *= vs.size();
    }
    return n;
}

std::vector<std::pair<std::string, std::string>> Grid::point(std::size_t i) const
{
    std::vector<std::pair<std::string, std::string>> out(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;)
    {
        const auto& [key, values] = axes[a];
        out[a] = {key, values[i % values.size()]};
        i /= values.size();
    }
    return out;
}

Grid parse_grid(std::istream& in, const std::string& origin)
{
    Grid g;
    std::set<std::string> seen;
    const auto& known = scenario_keys();
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
    {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
        {
            continue;
        }
        const auto where = origin + ":" + std::to_string(n) + ": ";
        const auto eq = t.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError(where + "expected key=v1,v2,...");
        }
        const auto key = trim(t.substr(0, eq));
        if (std::find(known.begin(), known.end(), key) == known.end())
        {
            throw ConfigError(where + "unknown key '" + key + "'");
        }
        if (!seen.insert(key).second)
        {
            throw ConfigError(where + "duplicate axis '" + key + "'");
        }
        std::vector<std::string> values;
        std::stringstream ss(t.substr(eq + 1));
        std::string v;
        while (std::getline(ss, v, ','))
        {
            v = trim(v);
            if (v.empty())
            {
                throw ConfigError(where + "empty value in axis '" + key + "'");
            }
            values.push_back(v);
        }
        if (values.empty())
        {
            throw ConfigError(where + "axis '" + key + "' has no values");
        }
        g.axes.emplace_back(key, std::move(values));
    }
    if (g.axes.empty())
    {
        throw ConfigError(origin + ": grid is empty");
    }
    return g;
}

Grid load_grid(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
    {
        throw ConfigError("cannot open grid file " + path);
    }
    return parse_grid(f, path);
}

std::vector<SweepRow> run_sweep(const Scenario& base, const Grid& grid)
{
    const auto n = static_cast<std::int64_t>(grid.points());
    if (n == 0)
    {
        throw ConfigError("grid is empty");
    }
    std::vector<SweepRow> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i)
    {
        auto& row = rows[static_cast<std::size_t>(i)];
        row.settings = grid.point(static_cast<std::size_t>(i));
        try
        {
            Scenario s = base;
            for (const auto& [k, v] : row.settings)
            {
                apply_setting(s, k, v);
            }
            const auto r = run_scenario(s);
            row.summary = r.summary.fields();
            row.status = r.summary.invariant_failures() == 0 ? "ok" : "invariant-violation";
        }
        catch (const ConfigError& e)
        {
            row.status = "config-error";
            row.error = e.what();
        }
        catch (const InvariantViolation& e)
        {
            row.status = "invariant-violation";
            row.error = e.what();
        }
        catch (const Error& e)
        {
            row.status = "error";
            row.error = e.what();
        }
    }
    return rows;
}

void write_sweep_table(std::ostream& out, const Grid& grid, const std::vector<SweepRow>& rows)
{
    std::vector<std::string> summary_keys;
    for (const auto& [k, v] : RunSummary{}.fields())
    {
        (void)v;
        summary_keys.push_back(k);
    }
    out << "point";
    for (const auto& [k, vs] : grid.axes)
    {
        (void)vs;
        out << '\t' << k;
    }
    out << "\tstatus\terror";
    for (const auto& k : summary_keys)
    {
        out << '\t' << k;
    }
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto& r = rows[i];
        out << i;
        for (const auto& [k, v] : r.settings)
        {
            (void)k;
            out << '\t' << cell(v);
        }
        out << '\t' << r.status << '\t' << cell(r.error);
        for (std::size_t j = 0; j < summary_keys.size(); ++j)
        {
            out << '\t' << (j < r.summary.size() ? cell(r.summary[j].second) : std::string());
        }
        out << '\n';
    }
}

} // namespace ptpdelay::harness
