#include "ptpdelay/harness/oracle.hpp"

#include "ptpdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ptpdelay::harness
{

Decomposition oracle_decompose(const OracleRecord& r)
{
    return {r.real_2x / 2, r.asymmetry_2x / 2, r.measured_2x - r.real_2x - r.asymmetry_2x};
}

double kolmogorov_q(double lambda)
{
    if (lambda < 1e-3)
    {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k)
    {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16)
        {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
    {
        throw ConfigError("two-sample test needs both samples non-empty");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    KsResult r;
    r.n1 = x.size();
    r.n2 = y.size();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() && j < y.size())
    {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v)
        {
            ++i;
        }
        while (j < y.size() && y[j] <= v)
        {
            ++j;
        }
        const double fx = static_cast<double>(i) / static_cast<double>(x.size());
        const double fy = static_cast<double>(j) / static_cast<double>(y.size());
        r.d = std::max(r.d, std::abs(fx - fy));
    }
    const double ne = static_cast<double>(r.n1) * static_cast<double>(r.n2) / static_cast<double>(r.n1 + r.n2);
    const double sq = std::sqrt(ne);
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * r.d);
    return r;
}

IndistinguishabilityReport indistinguishability_report(std::span<const OracleRecord> rows, std::optional<SimTime> split)
{
    if (rows.size() < 2)
    {
        throw ConfigError("indistinguishability report needs at least 2 cycles");
    }
    IndistinguishabilityReport rep;
    std::vector<double> before;
    std::vector<double> after;
    double drift_sum = 0.0;
    double asym_sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        // Doubled values, so halve for the offset scale.
        const double drift = 0.5 * static_cast<double>((rows[i].intrinsic_2x - rows[i - 1].intrinsic_2x).ns());
        const double asym = 0.5 * static_cast<double>((rows[i].measured_2x - rows[i].real_2x).ns() -
                                                      (rows[i - 1].measured_2x - rows[i - 1].real_2x).ns());
        drift_sum += std::abs(drift);
        asym_sum += std::abs(asym);
        if (split)
        {
            (rows[i - 1].at >= *split ? after : before).push_back(asym);
        }
    }
    rep.deltas = rows.size() - 1;
    rep.mean_abs_drift_ns = drift_sum / static_cast<double>(rep.deltas);
    rep.mean_abs_asymmetry_ns = asym_sum / static_cast<double>(rep.deltas);
    rep.ratio = rep.mean_abs_drift_ns > 0 ? rep.mean_abs_asymmetry_ns / rep.mean_abs_drift_ns
                                          : std::numeric_limits<double>::infinity();
    if (split && !before.empty() && !after.empty())
    {
        rep.split_test = ks_two_sample(before, after);
    }
    return rep;
}

} // namespace ptpdelay::harness
