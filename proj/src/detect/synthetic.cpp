#include "ptpdelay/detect/synthetic.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace ptpdelay::detect
{

SyntheticStream generate(const SyntheticSpec& spec)
{
    const PtpProfile& t = spec.truth;
    struct Row
    {
        net::Observation obs;
        Label label;
    };
    std::vector<Row> rows;
    const std::int64_t end = spec.duration.ns();
    const auto emit = [&](Duration at, std::uint32_t len, net::Direction dir, ptp::MessageKind kind) {
        const std::int64_t ns = at.ns() + spec.within_bin.ns();
        if (ns < end)
        {
            rows.push_back({{SimTime(ns), len, dir}, {kind}});
        }
    };
    using K = ptp::MessageKind;
    for (Duration base = t.sync_phase; base.ns() < end; base += t.t3)
    {
        emit(base, t.x, net::Direction::master_to_slave, K::sync);
        emit(base + t.t0, t.x, net::Direction::master_to_slave, K::follow_up);
        emit(base + t.t0 + t.t1, t.x_req, net::Direction::slave_to_master, K::delay_req);
        emit(base + t.t0 + t.t1 + t.t2, t.x, net::Direction::master_to_slave, K::delay_resp);
    }
    if (t.y != 0 && t.announce_period > Duration{})
    {
        for (Duration a = t.announce_phase; a.ns() < end; a += t.announce_period)
        {
            emit(a, t.y, net::Direction::master_to_slave, K::announce);
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.obs.seen_at < b.obs.seen_at; });

    std::vector<net::Observation> real;
    real.reserve(rows.size());
    for (const auto& r : rows)
    {
        real.push_back(r.obs);
    }
    const std::int64_t end_bin = (end + net::kBinNs - 1) / net::kBinNs;
    SyntheticStream out;
    out.observations = net::with_noise(real, spec.noise, spec.noise_mode, 0, end_bin);

    // Re-attach labels: real rows appear in order, and noise never equals a
    // real row because both come out of the same stable merge.
    out.labels.reserve(out.observations.size());
    std::size_t next_real = 0;
    for (const auto& o : out.observations)
    {
        if (next_real < rows.size() && o == rows[next_real].obs)
        {
            out.labels.push_back(rows[next_real].label);
            ++next_real;
        }
        else
        {
            out.labels.push_back({});
        }
    }
    return out;
}

PtpProfile random_profile(Rng& rng)
{
    static constexpr std::array<std::int64_t, 4> periods{125, 250, 500, 1000};
    const auto ms = [](std::int64_t v) { return Duration(v * 1'000'000); };
    PtpProfile p;
    p.mode = PtpProfile::Mode::periodic;
    p.t3 = ms(periods[static_cast<std::size_t>(rng.uniform_int(0, 3))]);
    p.t0 = ms(rng.uniform_int(2, 10));
    p.t1 = ms(rng.uniform_int(2, 20));
    p.t2 = ms(rng.uniform_int(2, 20));
    p.x = static_cast<std::uint32_t>(rng.uniform_int(60, 1400));
    p.x_req = p.x;
    do
    {
        p.y = static_cast<std::uint32_t>(rng.uniform_int(60, 1400));
    } while (p.y == p.x);
    p.announce_period = ms(2000);
    p.sync_phase = ms(rng.uniform_int(0, p.t3.ns() / 1'000'000 - 1));
    // One packet per bin: an Announce sharing a bin with a cycle slot would never be observed.
    const std::int64_t t3 = p.t3.ns() / 1'000'000;
    const std::int64_t s0 = p.sync_phase.ns() / 1'000'000;
    const std::int64_t t0 = p.t0.ns() / 1'000'000;
    const std::int64_t t1 = p.t1.ns() / 1'000'000;
    const std::int64_t t2 = p.t2.ns() / 1'000'000;
    const auto collides = [&](std::int64_t a) {
        const std::int64_t r = ((a - s0) % t3 + t3) % t3;
        return r == 0 || r == t0 || r == t0 + t1 || r == t0 + t1 + t2;
    };
    std::int64_t phase = 0;
    do
    {
        phase = rng.uniform_int(0, 1999);
    } while (collides(phase));
    p.announce_phase = ms(phase);
    p.confidence = 1.0;
    return p;
}

} // namespace ptpdelay::detect
