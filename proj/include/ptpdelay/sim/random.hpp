#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace ptpdelay
{

/// Stateless 64-bit mixer (SplitMix64 finalizer). Used for counter-based draws
/// where a value must be reproducible from (seed, index) alone.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Maps 64 random bits to [0, 1) with 53-bit resolution.
constexpr double unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seeded generator with draw helpers whose results do not depend on the
/// standard library's distribution implementations (golden traces must be
/// byte-identical across toolchains).
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform01() { return unit_interval(engine_()); }

    // Uniform integer in the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
    {
        if (hi <= lo)
        {
            return lo;
        }
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0)
        {
            return static_cast<std::int64_t>(engine_());
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t v = 0;
        do
        {
            v = engine_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; one value per call.
    double normal(double mean, double sigma)
    {
        double u1 = 0.0;
        do
        {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Exponential inter-arrival with the given rate (events per unit).
    double exponential(double rate)
    {
        double u = 0.0;
        do
        {
            u = uniform01();
        } while (u <= 0.0);
        return -std::log(u) / rate;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ptpdelay
