#pragma once

#include "ptpdelay/harness/scenario.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ptpdelay::harness
{

/// Parameter grid: one `key=v1,v2,...` line per axis, `#` comments.
struct Grid
{
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;

    [[nodiscard]] std::size_t points() const;
    // Settings of point i; the first axis varies slowest.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> point(std::size_t i) const;
};

// Throws ConfigError on an empty grid, an empty axis or an unknown key.
[[nodiscard]] Grid parse_grid(std::istream& in, const std::string& origin = "<grid>");
[[nodiscard]] Grid load_grid(const std::string& path);

struct SweepRow
{
    std::vector<std::pair<std::string, std::string>> settings;
    // "ok", "config-error" or "invariant-violation"; other columns are empty unless ok.
    std::string status;
    std::string error;
    std::vector<std::pair<std::string, std::string>> summary;
};

// Runs every point, in parallel when OpenMP is available. A failing point
// is reported in its row and does not stop the others.
[[nodiscard]] std::vector<SweepRow> run_sweep(const Scenario& base, const Grid& grid);

// sweep.tsv: tab-separated, header row `point`, axis keys, `status`, `error`, summary keys.
void write_sweep_table(std::ostream& out, const Grid& grid, const std::vector<SweepRow>& rows);

} // namespace ptpdelay::harness
