#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ptpdelay::detect
{

/// Per-candidate successor counts for one traffic class.
///
/// For each T in [t_min, t_max], over occurrences p with p + T + 1 < end_bin:
/// `eligible` counts them, `tolerant` those with an occurrence in
/// [p+T−1, p+T+1], `exact` those with an occurrence at exactly p+T.
struct SuccessorHits
{
    std::int64_t t_min = 0;
    std::vector<std::uint32_t> eligible;
    std::vector<std::uint32_t> tolerant;
    std::vector<std::uint32_t> exact;
};

// Reference kernel.
[[nodiscard]] SuccessorHits successor_hits_serial(std::span<const std::int64_t> positions, std::int64_t end_bin,
                                                  std::int64_t t_min, std::int64_t t_max);

// OpenMP kernel over candidate periods; results equal the serial kernel exactly.
[[nodiscard]] SuccessorHits successor_hits_parallel(std::span<const std::int64_t> positions, std::int64_t end_bin,
                                                    std::int64_t t_min, std::int64_t t_max);

struct PeriodCandidate
{
    std::int64_t period = 0; // bins
    double score = 0.0;      // tolerant / eligible
    double exact_score = 0.0;
};

struct PeriodOptions
{
    std::int64_t t_min = 2;
    std::int64_t t_max = 4000;
    // Scores closer than this count as tied.
    double epsilon = 0.01;
    bool parallel = true;
};

// Every candidate, best first: score bucket (width epsilon) descending, then
// exact_score descending, then smaller period. Throws DetectError
// (insufficient_occurrences) below 3 occurrences.
[[nodiscard]] std::vector<PeriodCandidate> estimate_period(std::span<const std::int64_t> positions, std::int64_t end_bin,
                                                           const PeriodOptions& options = {});

// Top candidate folded back onto its smallest divisor that scores within
// `harmonic_slack` of it.
[[nodiscard]] PeriodCandidate select_period(const std::vector<PeriodCandidate>& ranked, double harmonic_slack = 0.05);

} // namespace ptpdelay::detect
