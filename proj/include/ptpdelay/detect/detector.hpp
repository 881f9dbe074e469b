#pragma once

#include "ptpdelay/detect/binned.hpp"
#include "ptpdelay/detect/period.hpp"
#include "ptpdelay/detect/profile.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptpdelay::detect
{

struct DetectOptions
{
    PeriodOptions period;
    // A class is periodic when its best candidate scores at least this.
    double score_threshold = 0.5;
    std::size_t min_occurrences = 5;
    // Most populous classes per direction that get a period search.
    std::size_t top_classes = 4;
    // A phase cluster must be hit in at least this fraction of cycles.
    double min_cluster_fraction = 0.5;
    bool use_direction = true;
    // Try the order-only model when the periodic fit fails or scores low.
    bool allow_sequence = true;
    double arm_threshold = 0.9;
};

struct DetectReport
{
    PtpProfile profile;
    std::vector<PeriodCandidate> cycle_candidates; // best few, for diagnostics
    std::uint64_t collisions = 0;
    std::string periodic_note; // why the periodic model was not used, if it was not
};

// Folds the cycle class modulo t3 and names the four motif slots. With
// direction withheld and a single length for all four, the DelayReq slot
// cannot be told apart and DetectError(ambiguous) is thrown.
[[nodiscard]] PtpProfile fit_motif(const BinnedStream& stream, ClassKey cycle_class, std::int64_t t3_bins,
                                   const DetectOptions& options = {});

// Order-only model: repeated MS x, MS x, SM x_req, MS x.
[[nodiscard]] PtpProfile fit_sequence(const BinnedStream& stream, const DetectOptions& options = {});

// Chance-corrected fraction of predicted slots filled within ±1 bin (periodic mode).
[[nodiscard]] double periodic_confidence(const BinnedStream& stream, const PtpProfile& profile);

// Full pipeline. Throws DetectError when no model fits.
[[nodiscard]] DetectReport detect(std::span<const net::Observation> observations, const DetectOptions& options = {});

// Stateless slot match for a periodic profile.
[[nodiscard]] ClassifiedObservation classify(const net::Observation& obs, const PtpProfile& profile);

/// Online classifier for either profile mode. Sequence mode keeps the
/// position within the four-message pattern, so observations must be fed in
/// time order.
class FlowClassifier
{
public:
    explicit FlowClassifier(PtpProfile profile) : profile_(std::move(profile)) {}

    ClassifiedObservation next(const net::Observation& obs);

    [[nodiscard]] const PtpProfile& profile() const noexcept { return profile_; }

private:
    enum class Expect
    {
        unknown,
        delay_resp,
        sync,
        follow_up,
        delay_req,
    };

    PtpProfile profile_;
    Expect expect_ = Expect::unknown;
};

[[nodiscard]] std::vector<ClassifiedObservation> classify_all(std::span<const net::Observation> observations,
                                                              const PtpProfile& profile);

} // namespace ptpdelay::detect
