#pragma once

#include "ptpdelay/harness/simulation.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ptpdelay::harness
{

// `# sync-trace v1`: true_time_ns,seq,rtd_ns,measured_offset_ns,true_offset_ns,applied_correction_ns
void write_sync_trace(std::ostream& out, std::span<const SyncRecord> rows);
[[nodiscard]] std::vector<SyncRecord> read_sync_trace(std::istream& in);

// `# bound-trace v1`: true_time_ns,seq,low_ns,high_ns,midpoint_ns,true_offset_ns,accepted
// The residual is not stored; readers recompute it as ceil((high − low) / 2).
void write_bound_trace(std::ostream& out, std::span<const BoundRecord> rows);
[[nodiscard]] std::vector<BoundRecord> read_bound_trace(std::istream& in);

// `# oracle-trace v1`: true_time_ns,seq,measured_2x_ns,real_2x_ns,intrinsic_2x_ns,asymmetry_2x_ns,
// envelope_2x_ns,owd_ms_ns,owd_sm_ns,attack_ms_ns,attack_sm_ns,jitter_ms_ns,jitter_sm_ns,identity_ok,decomposition_ok
void write_oracle_trace(std::ostream& out, std::span<const OracleRecord> rows);

// `# summary v1` followed by key=value lines.
void write_summary(std::ostream& out, const RunSummary& s);
[[nodiscard]] std::map<std::string, std::string> read_summary(std::istream& in);

/// File names inside a run directory.
namespace files
{
inline constexpr const char* sync = "sync-trace.csv";
inline constexpr const char* bound = "bound-trace.csv";
inline constexpr const char* obs = "obs-trace.csv";
inline constexpr const char* attack = "attack-trace.csv";
inline constexpr const char* oracle = "oracle-trace.csv";
inline constexpr const char* summary = "summary.txt";
inline constexpr const char* profile = "profile.txt";
} // namespace files

// Creates `dir` and writes every trace of the run into it.
void write_run(const RunResult& r, const std::string& dir);

struct VerifyReport
{
    std::uint64_t rows = 0;
    std::uint64_t accepted = 0;
    std::uint64_t bound_violations = 0;
    std::uint64_t midpoint_violations = 0;
    // Bound rows with no matching sync row, or a different true offset there.
    std::uint64_t consistency_errors = 0;
    std::vector<std::string> messages; // first few problems, for the CLI

    [[nodiscard]] bool ok() const noexcept { return bound_violations + midpoint_violations + consistency_errors == 0; }
};

// Re-checks a run directory from its traces alone. Throws ConfigError when a
// trace is missing or malformed.
[[nodiscard]] VerifyReport verify_bounds(const std::string& dir);

} // namespace ptpdelay::harness
