#pragma once

#include "ptpdelay/detect/profile.hpp"
#include "ptpdelay/net/observe.hpp"
#include "ptpdelay/sim/random.hpp"

#include <vector>

namespace ptpdelay::detect
{

/// Labelled observation stream generated straight from a profile, without
/// running the protocol. Used for detector round-trip tests.
struct SyntheticSpec
{
    PtpProfile truth;
    Duration duration = Duration(60'000'000'000);
    net::NoiseSource noise;
    net::NoiseMode noise_mode = net::NoiseMode::free_bins;
    // Position of every PTP packet inside its bin.
    Duration within_bin = Duration(500'000);
};

struct SyntheticStream
{
    std::vector<net::Observation> observations;
    // Ground-truth label per observation (nullopt for noise).
    std::vector<Label> labels;
};

[[nodiscard]] SyntheticStream generate(const SyntheticSpec& spec);

/// Random profile: t3 ∈ {125,250,500,1000} ms, t0 ∈ [2,10] ms,
/// t1, t2 ∈ [2,20] ms, one cycle length for all four slots, a distinct
/// Announce length every 2 s, random phases with the Announce off the cycle bins.
[[nodiscard]] PtpProfile random_profile(Rng& rng);

} // namespace ptpdelay::detect
