#pragma once

#include "ptpdelay/net/link.hpp"
#include "ptpdelay/net/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace ptpdelay::net
{

inline constexpr std::int64_t kBinNs = 1'000'000;

[[nodiscard]] constexpr std::int64_t bin_of(SimTime t) noexcept { return t.ns() / kBinNs; }

/// Background traffic seen by the observer but never delivered anywhere.
///
/// Each 1 ms bin independently holds one packet with probability p, of uniform
/// length in [len_lo, len_hi], uniform direction, and uniform position inside
/// the bin. Draws are counter-based on (seed, bin) so any bin range can be
/// generated on demand with identical results.
struct NoiseSource
{
    double p_per_ms = 0.0;
    std::uint32_t len_lo = 40;
    std::uint32_t len_hi = 1500;
    std::uint64_t seed = 0;

    [[nodiscard]] std::optional<Observation> at_bin(std::int64_t bin) const;

    // All noise observations with bin in [begin, end).
    [[nodiscard]] std::vector<Observation> observations(std::int64_t begin_bin, std::int64_t end_bin) const;

    // Same, skipping bins already occupied by real traffic (one packet per bin).
    [[nodiscard]] std::vector<Observation> observations_in_free_bins(std::int64_t begin_bin, std::int64_t end_bin,
                                                                     const std::unordered_set<std::int64_t>& occupied) const;

    void validate() const;
};

[[nodiscard]] inline std::vector<Observation> noise_source(const NoiseSource& src, Duration duration)
{
    return src.observations(0, (duration.ns() + kBinNs - 1) / kBinNs);
}

enum class NoiseMode
{
    // Noise bins are drawn regardless of real traffic; collisions are left to the discretizer.
    independent,
    // Noise only fills bins without real traffic (one packet per bin).
    free_bins,
};

NoiseMode parse_noise_mode(const std::string& s);
std::string_view to_string(NoiseMode m) noexcept;

// `real` (sorted) merged with the noise of bins [begin_bin, end_bin).
[[nodiscard]] std::vector<Observation> with_noise(std::span<const Observation> real, const NoiseSource& noise, NoiseMode mode,
                                                  std::int64_t begin_bin, std::int64_t end_bin);

/// Records what passes the observer position, in passage order.
class Tap
{
public:
    void record(const Observation& obs) { seen_.push_back(obs); }
    [[nodiscard]] const std::vector<Observation>& seen() const noexcept { return seen_; }
    [[nodiscard]] std::size_t size() const noexcept { return seen_.size(); }

private:
    std::vector<Observation> seen_;
};

// Observations for a batch of transmissions: one per envelope at
// send_time + tap_offset(direction), sorted by seen_at (stable).
[[nodiscard]] std::vector<Observation> tap(std::span<const Envelope> envelopes, const LinkProfile& link);

// Stable merge by seen_at, ties keep `a` first.
[[nodiscard]] std::vector<Observation> merge_by_time(std::span<const Observation> a, std::span<const Observation> b);

/// `# obs-trace v1` files: `seen_at_ns,length_bytes,direction` per line.
void write_obs_trace(std::ostream& out, std::span<const Observation> obs);
[[nodiscard]] std::vector<Observation> read_obs_trace(std::istream& in);
void write_obs_trace_file(const std::string& path, std::span<const Observation> obs);
[[nodiscard]] std::vector<Observation> read_obs_trace_file(const std::string& path);

} // namespace ptpdelay::net
