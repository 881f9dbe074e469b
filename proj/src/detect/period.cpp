#include "ptpdelay/detect/period.hpp"

#include "ptpdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ptpdelay::detect
{

namespace
{

std::vector<std::uint8_t> occupancy(std::span<const std::int64_t> positions, std::int64_t end_bin)
{
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(std::max<std::int64_t>(end_bin, 0)) + 2, 0);
    for (const auto p : positions)
    {
        occ[static_cast<std::size_t>(p)] = 1;
    }
    return occ;
}

SuccessorHits make_hits(std::int64_t t_min, std::int64_t t_max)
{
    SuccessorHits h;
    h.t_min = t_min;
    const auto n = static_cast<std::size_t>(std::max<std::int64_t>(t_max - t_min + 1, 0));
    h.eligible.assign(n, 0);
    h.tolerant.assign(n, 0);
    h.exact.assign(n, 0);
    return h;
}

// Counts for one candidate period; positions are sorted.
inline void count_one(std::span<const std::int64_t> positions, const std::vector<std::uint8_t>& occ, std::int64_t end_bin,
                      std::int64_t t, std::uint32_t& eligible, std::uint32_t& tolerant, std::uint32_t& exact)
{
    const std::int64_t limit = end_bin - t - 1;
    const auto stop = std::lower_bound(positions.begin(), positions.end(), limit);
    std::uint32_t e = 0;
    std::uint32_t tol = 0;
    std::uint32_t ex = 0;
    for (auto it = positions.begin(); it != stop; ++it)
    {
        const auto q = static_cast<std::size_t>(*it + t);
        ++e;
        ex += occ[q];
        tol += (occ[q - 1] | occ[q] | occ[q + 1]);
    }
    eligible = e;
    tolerant = tol;
    exact = ex;
}

} // namespace

SuccessorHits successor_hits_serial(std::span<const std::int64_t> positions, std::int64_t end_bin, std::int64_t t_min,
                                    std::int64_t t_max)
{
    SuccessorHits h = make_hits(t_min, t_max);
    const auto occ = occupancy(positions, end_bin);
    for (std::size_t i = 0; i < h.eligible.size(); ++i)
    {
        count_one(positions, occ, end_bin, t_min + static_cast<std::int64_t>(i), h.eligible[i], h.tolerant[i], h.exact[i]);
    }
    return h;
}

SuccessorHits successor_hits_parallel(std::span<const std::int64_t> positions, std::int64_t end_bin, std::int64_t t_min,
                                      std::int64_t t_max)
{
    SuccessorHits h = make_hits(t_min, t_max);
    const auto occ = occupancy(positions, end_bin);
    const auto n = static_cast<std::int64_t>(h.eligible.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < n; ++i)
    {
        const auto k = static_cast<std::size_t>(i);
        count_one(positions, occ, end_bin, t_min + i, h.eligible[k], h.tolerant[k], h.exact[k]);
    }
    return h;
}

std::vector<PeriodCandidate> estimate_period(std::span<const std::int64_t> positions, std::int64_t end_bin,
                                             const PeriodOptions& options)
{
    if (positions.size() < 3)
    {
        throw DetectError(DetectError::Reason::insufficient_occurrences,
                          "period estimation needs at least 3 occurrences, got " + std::to_string(positions.size()));
    }
    if (options.t_min < 2 || options.t_max < options.t_min)
    {
        throw ConfigError("period search range must satisfy 2 <= t_min <= t_max");
    }
    const SuccessorHits h = options.parallel ? successor_hits_parallel(positions, end_bin, options.t_min, options.t_max)
                                             : successor_hits_serial(positions, end_bin, options.t_min, options.t_max);
    std::vector<PeriodCandidate> out;
    out.reserve(h.eligible.size());
    for (std::size_t i = 0; i < h.eligible.size(); ++i)
    {
        // Two successor pairs are the least that can show repetition.
        if (h.eligible[i] < 2)
        {
            continue;
        }
        const double e = h.eligible[i];
        out.push_back({h.t_min + static_cast<std::int64_t>(i), h.tolerant[i] / e, h.exact[i] / e});
    }
    const double eps = options.epsilon > 0 ? options.epsilon : 1e-9;
    const auto bucket = [eps](double s) { return static_cast<std::int64_t>(std::floor(s / eps + 1e-9)); };
    std::stable_sort(out.begin(), out.end(), [&](const PeriodCandidate& a, const PeriodCandidate& b) {
        const auto ba = bucket(a.score);
        const auto bb = bucket(b.score);
        if (ba != bb)
        {
            return ba > bb;
        }
        if (a.exact_score != b.exact_score)
        {
            return a.exact_score > b.exact_score;
        }
        return a.period < b.period;
    });
    return out;
}

PeriodCandidate select_period(const std::vector<PeriodCandidate>& ranked, double harmonic_slack)
{
    if (ranked.empty())
    {
        throw DetectError(DetectError::Reason::insufficient_occurrences, "no period candidate could be scored");
    }
    const PeriodCandidate top = ranked.front();
    std::map<std::int64_t, const PeriodCandidate*> by_period;
    for (const auto& c : ranked)
    {
        by_period.emplace(c.period, &c);
    }
    // Largest k first, so the smallest acceptable divisor wins.
    for (std::int64_t k = top.period / 2; k >= 2; --k)
    {
        const std::int64_t guess = (top.period + k / 2) / k;
        const PeriodCandidate* pick = nullptr;
        for (std::int64_t p = guess - 1; p <= guess + 1; ++p)
        {
            const auto it = by_period.find(p);
            if (it == by_period.end() || std::llabs(p * k - top.period) > k)
            {
                continue;
            }
            const PeriodCandidate& c = *it->second;
            if (c.score >= top.score - harmonic_slack && (!pick || c.exact_score > pick->exact_score))
            {
                pick = &c;
            }
        }
        if (pick)
        {
            return *pick;
        }
    }
    return top;
}

} // namespace ptpdelay::detect
