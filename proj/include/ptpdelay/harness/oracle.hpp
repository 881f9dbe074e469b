#pragma once

#include "ptpdelay/harness/simulation.hpp"

#include <optional>
#include <span>

namespace ptpdelay::harness
{

struct Decomposition
{
    // Halves of the doubled oracle values, rounded toward zero.
    Duration offset_real{};
    Duration asymmetry_term{};
    // measured − real − asymmetry, doubled. Zero without jitter and drift.
    Duration residual_2x{};
};

[[nodiscard]] Decomposition oracle_decompose(const OracleRecord& r);

struct KsResult
{
    double d = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;

    [[nodiscard]] bool rejects(double alpha = 0.05) const noexcept { return p_value < alpha; }
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
[[nodiscard]] KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Asymptotic Kolmogorov distribution tail, Q(λ) = 2 Σ (−1)^(k−1) exp(−2k²λ²).
[[nodiscard]] double kolmogorov_q(double lambda);

/// Per-cycle changes of the measured offset split into the part caused by
/// the real clocks (drift, noise) and the part caused by path asymmetry
/// (link, jitter, attack). Servo corrections are removed from both.
struct IndistinguishabilityReport
{
    std::size_t deltas = 0;
    double mean_abs_drift_ns = 0.0;
    double mean_abs_asymmetry_ns = 0.0;
    // mean_abs_asymmetry / mean_abs_drift; infinite when the clocks do not drift.
    double ratio = 0.0;
    // Asymmetry deltas before `split` against those after it.
    std::optional<KsResult> split_test;
};

[[nodiscard]] IndistinguishabilityReport indistinguishability_report(std::span<const OracleRecord> rows,
                                                                     std::optional<SimTime> split = std::nullopt);

} // namespace ptpdelay::harness
