#include "ptpdelay/detect/detector.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/net/observe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace ptpdelay::detect
{

namespace
{

using net::Direction;

constexpr std::int64_t kBin = net::kBinNs;

Duration bins(std::int64_t n) { return Duration(n * kBin); }

std::int64_t to_bins(Duration d) { return d.ns() / kBin; }

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

// Signed circular distance a − b on a ring of size m, in (−m/2, m/2].
std::int64_t ring_diff(std::int64_t a, std::int64_t b, std::int64_t m)
{
    std::int64_t d = mod(a - b, m);
    if (d > m / 2)
    {
        d -= m;
    }
    return d;
}

struct Cluster
{
    std::int64_t phase = 0;
    std::uint64_t mass = 0;
};

// Greedy peak picking on the folded histogram; each pick absorbs its two neighbours.
std::vector<Cluster> phase_clusters(std::span<const std::int64_t> positions, std::int64_t period, std::size_t max_count,
                                    double min_mass)
{
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(period), 0);
    for (const auto p : positions)
    {
        ++hist[static_cast<std::size_t>(mod(p, period))];
    }
    std::vector<Cluster> out;
    while (out.size() < max_count)
    {
        const auto peak = std::max_element(hist.begin(), hist.end());
        if (peak == hist.end() || *peak == 0)
        {
            break;
        }
        const auto p = static_cast<std::int64_t>(peak - hist.begin());
        std::uint64_t mass = 0;
        for (std::int64_t d = -1; d <= 1; ++d)
        {
            if (period < 3 && d != 0)
            {
                continue;
            }
            auto& h = hist[static_cast<std::size_t>(mod(p + d, period))];
            mass += h;
            h = 0;
        }
        if (static_cast<double>(mass) < min_mass)
        {
            break;
        }
        out.push_back({p, mass});
    }
    return out;
}

std::map<ClassKey, std::size_t> class_counts(const BinnedStream& s, bool use_direction)
{
    std::map<ClassKey, std::size_t> counts;
    for (const auto& p : s.packets)
    {
        ++counts[class_of(p, use_direction)];
    }
    return counts;
}

// Most populous classes of one direction, count descending then key ascending.
std::vector<std::pair<ClassKey, std::size_t>> top_classes(const std::map<ClassKey, std::size_t>& counts, Direction dir,
                                                          std::size_t k, std::size_t min_count)
{
    std::vector<std::pair<ClassKey, std::size_t>> v;
    for (const auto& [key, n] : counts)
    {
        if (key.direction == dir && n >= min_count)
        {
            v.emplace_back(key, n);
        }
    }
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (v.size() > k)
    {
        v.resize(k);
    }
    return v;
}

std::int64_t first_bin(const BinnedStream& s) { return s.packets.empty() ? 0 : s.packets.front().bin; }

double cycles_in_window(const BinnedStream& s, std::int64_t t3)
{
    return static_cast<double>(s.end_bin - first_bin(s)) / static_cast<double>(t3);
}

std::int64_t median(std::vector<std::int64_t> v)
{
    if (v.empty())
    {
        return 0;
    }
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

} // namespace

PtpProfile fit_motif(const BinnedStream& stream, ClassKey cycle_class, std::int64_t t3, const DetectOptions& options)
{
    if (t3 < 3)
    {
        throw DetectError(DetectError::Reason::motif_not_found, "cycle period too short for a four-slot motif");
    }
    const double min_mass = options.min_cluster_fraction * cycles_in_window(stream, t3);
    const auto positions = class_positions(stream, cycle_class, options.use_direction);
    auto ms = phase_clusters(positions, t3, 4, min_mass);

    std::optional<Cluster> req;
    std::uint32_t x_req = 0;
    if (!options.use_direction && ms.size() >= 4)
    {
        throw DetectError(DetectError::Reason::ambiguous,
                          "four equal-length slots and no direction: the DelayReq slot cannot be identified");
    }
    if (ms.size() > 3)
    {
        ms.resize(3);
    }
    if (ms.size() < 3)
    {
        throw DetectError(DetectError::Reason::motif_not_found,
                          "found " + std::to_string(ms.size()) + " of 3 master-to-slave phase clusters");
    }

    // The DelayReq slot: the strongest single phase of any other class (the
    // opposite direction when direction is known).
    const auto counts = class_counts(stream, options.use_direction);
    for (const auto& [key, n] : counts)
    {
        if (n < options.min_occurrences || key == cycle_class)
        {
            continue;
        }
        if (options.use_direction && key.direction != Direction::slave_to_master)
        {
            continue;
        }
        const auto c = phase_clusters(class_positions(stream, key, options.use_direction), t3, 1, min_mass);
        if (!c.empty() && (!req || c.front().mass > req->mass))
        {
            req = c.front();
            x_req = key.length;
        }
    }
    if (!req)
    {
        throw DetectError(options.use_direction ? DetectError::Reason::motif_not_found : DetectError::Reason::ambiguous,
                          "no phase cluster for the DelayReq slot");
    }

    // Circular order after DelayReq: DelayResp, Sync, FollowUp.
    std::sort(ms.begin(), ms.end(),
              [&](const Cluster& a, const Cluster& b) { return mod(a.phase - req->phase, t3) < mod(b.phase - req->phase, t3); });
    const Cluster& resp = ms[0];
    const Cluster& sync = ms[1];
    const Cluster& fup = ms[2];

    PtpProfile p;
    p.mode = PtpProfile::Mode::periodic;
    p.use_direction = options.use_direction;
    p.t3 = bins(t3);
    p.t0 = bins(mod(fup.phase - sync.phase, t3));
    p.t1 = bins(mod(req->phase - fup.phase, t3));
    p.t2 = bins(mod(resp.phase - req->phase, t3));
    p.x = cycle_class.length;
    p.x_req = x_req;
    p.sync_phase = bins(sync.phase);
    if (p.t0 + p.t1 + p.t2 >= p.t3 || p.t0 == Duration{} || p.t1 == Duration{} || p.t2 == Duration{})
    {
        throw DetectError(DetectError::Reason::motif_not_found, "phase clusters do not form a Sync/FollowUp/DelayReq/DelayResp motif");
    }
    return p;
}

double periodic_confidence(const BinnedStream& stream, const PtpProfile& profile)
{
    const std::int64_t t3 = to_bins(profile.t3);
    if (stream.empty() || t3 <= 0)
    {
        return 0.0;
    }
    const std::int64_t begin = first_bin(stream);
    const std::int64_t end = stream.end_bin;
    const Direction ms = Direction::master_to_slave;
    const Direction sm = profile.use_direction ? Direction::slave_to_master : Direction::master_to_slave;
    const std::int64_t t0 = to_bins(profile.t0);
    const std::int64_t t1 = to_bins(profile.t1);
    const std::int64_t t2 = to_bins(profile.t2);
    const std::array<std::pair<std::int64_t, ClassKey>, 4> slots{{
        {0, {profile.x, ms}},
        {t0, {profile.x, ms}},
        {t0 + t1, {profile.x_req, sm}},
        {t0 + t1 + t2, {profile.x, ms}},
    }};

    std::map<ClassKey, std::vector<std::uint8_t>> occ;
    std::map<ClassKey, std::size_t> count;
    for (const auto& [off, key] : slots)
    {
        (void)off;
        if (!occ.contains(key))
        {
            auto& o = occ[key];
            o.assign(static_cast<std::size_t>(end + 2), 0);
            for (const auto& pk : stream.packets)
            {
                if (class_of(pk, profile.use_direction) == key)
                {
                    o[static_cast<std::size_t>(pk.bin)] = 1;
                    ++count[key];
                }
            }
        }
    }

    std::uint64_t predicted = 0;
    std::uint64_t filled = 0;
    double chance = 0.0;
    const std::int64_t phase = mod(to_bins(profile.sync_phase), t3);
    const std::int64_t k0 = (begin - phase) / t3 - 1;
    for (std::int64_t k = std::max<std::int64_t>(k0, 0);; ++k)
    {
        const std::int64_t base = phase + k * t3;
        if (base + t0 + t1 + t2 + 1 >= end)
        {
            break;
        }
        for (const auto& [off, key] : slots)
        {
            const std::int64_t b = base + off;
            if (b - 1 < begin)
            {
                continue;
            }
            const auto& o = occ[key];
            ++predicted;
            const auto i = static_cast<std::size_t>(b);
            filled += (o[i - 1] | o[i] | o[i + 1]);
            const double density = static_cast<double>(count[key]) / static_cast<double>(end - begin);
            chance += 1.0 - std::pow(1.0 - std::min(density, 1.0), 3.0);
        }
    }
    if (predicted == 0)
    {
        return 0.0;
    }
    const double fill = static_cast<double>(filled) / static_cast<double>(predicted);
    const double base_rate = chance / static_cast<double>(predicted);
    if (base_rate >= 1.0)
    {
        return 0.0;
    }
    if (filled == predicted)
    {
        return 1.0;
    }
    return std::clamp((fill - base_rate) / (1.0 - base_rate), 0.0, 1.0);
}

PtpProfile fit_sequence(const BinnedStream& stream, const DetectOptions& options)
{
    if (!options.use_direction)
    {
        throw DetectError(DetectError::Reason::ambiguous, "the order-only model needs the direction feature");
    }
    const auto counts = class_counts(stream, true);
    const auto ms = top_classes(counts, Direction::master_to_slave, 1, options.min_occurrences);
    const auto sm = top_classes(counts, Direction::slave_to_master, 1, options.min_occurrences);
    if (ms.empty() || sm.empty())
    {
        throw DetectError(DetectError::Reason::insufficient_occurrences, "too few packets for the order-only model");
    }
    const ClassKey x = ms.front().first;
    const ClassKey req = sm.front().first;

    struct Item
    {
        std::int64_t bin;
        bool is_req;
    };
    std::vector<Item> seq;
    for (const auto& p : stream.packets)
    {
        const ClassKey k = class_of(p, true);
        if (k == x || k == req)
        {
            seq.push_back({p.bin, k == req});
        }
    }

    std::vector<std::int64_t> d0;
    std::vector<std::int64_t> d1;
    std::vector<std::int64_t> d2;
    std::vector<std::int64_t> d3;
    std::vector<std::int64_t> sync_bins;
    std::optional<std::size_t> prev_match;
    std::size_t matches = 0;
    for (std::size_t i = 0; i + 3 < seq.size();)
    {
        if (!seq[i].is_req && !seq[i + 1].is_req && seq[i + 2].is_req && !seq[i + 3].is_req)
        {
            d0.push_back(seq[i + 1].bin - seq[i].bin);
            d1.push_back(seq[i + 2].bin - seq[i + 1].bin);
            d2.push_back(seq[i + 3].bin - seq[i + 2].bin);
            if (prev_match && *prev_match + 4 == i)
            {
                d3.push_back(seq[i].bin - sync_bins.back());
            }
            sync_bins.push_back(seq[i].bin);
            prev_match = i;
            ++matches;
            i += 4;
        }
        else
        {
            ++i;
        }
    }
    if (matches < options.min_occurrences)
    {
        throw DetectError(DetectError::Reason::motif_not_found, "message-order pattern found only " + std::to_string(matches) + " times");
    }
    PtpProfile p;
    p.mode = PtpProfile::Mode::sequence;
    p.x = x.length;
    p.x_req = req.length;
    p.t0 = bins(median(d0));
    p.t1 = bins(median(d1));
    p.t2 = bins(median(d2));
    p.t3 = bins(median(d3));
    p.sync_phase = p.t3 > Duration{} ? bins(mod(sync_bins.front(), to_bins(p.t3))) : Duration{};
    p.confidence = 4.0 * static_cast<double>(matches) / static_cast<double>(seq.size());
    return p;
}

DetectReport detect(std::span<const net::Observation> observations, const DetectOptions& options)
{
    DetectReport report;
    const BinnedStream stream = discretize(observations);
    report.collisions = stream.collisions;
    const auto counts = class_counts(stream, options.use_direction);

    struct Periodic
    {
        ClassKey key;
        std::size_t count;
        PeriodCandidate best;
        std::vector<PeriodCandidate> ranked;
    };
    std::vector<Periodic> periodic;
    for (const auto& [key, n] : top_classes(counts, Direction::master_to_slave, options.top_classes, options.min_occurrences))
    {
        auto pos = class_positions(stream, key, options.use_direction);
        auto ranked = estimate_period(pos, stream.end_bin, options.period);
        if (ranked.empty())
        {
            continue;
        }
        const PeriodCandidate best = select_period(ranked);
        if (best.score >= options.score_threshold)
        {
            periodic.push_back({key, n, best, std::move(ranked)});
        }
    }

    std::optional<PtpProfile> chosen;
    std::optional<DetectError> periodic_error;
    try
    {
        if (periodic.empty())
        {
            throw DetectError(DetectError::Reason::motif_not_found, "no periodic traffic class");
        }
        const Periodic& cycle = periodic.front();
        report.cycle_candidates.assign(cycle.ranked.begin(), cycle.ranked.begin() + std::min<std::ptrdiff_t>(10, static_cast<std::ptrdiff_t>(cycle.ranked.size())));
        PtpProfile p = fit_motif(stream, cycle.key, cycle.best.period, options);
        for (std::size_t i = 1; i < periodic.size(); ++i)
        {
            const Periodic& a = periodic[i];
            if (a.best.period == cycle.best.period)
            {
                continue;
            }
            const auto c = phase_clusters(class_positions(stream, a.key, options.use_direction), a.best.period, 1, 0.0);
            p.y = a.key.length;
            p.announce_period = bins(a.best.period);
            p.announce_phase = c.empty() ? Duration{} : bins(c.front().phase);
            break;
        }
        p.confidence = periodic_confidence(stream, p);
        chosen = p;
    }
    catch (const DetectError& e)
    {
        periodic_error = e;
        report.periodic_note = e.what();
    }

    if (options.allow_sequence && options.use_direction && (!chosen || chosen->confidence < options.arm_threshold))
    {
        try
        {
            PtpProfile s = fit_sequence(stream, options);
            if (!chosen || s.confidence > chosen->confidence)
            {
                if (chosen)
                {
                    report.periodic_note = "periodic confidence " + std::to_string(chosen->confidence) + " below order-only model";
                    s.y = chosen->y;
                    s.announce_period = chosen->announce_period;
                    s.announce_phase = chosen->announce_phase;
                }
                chosen = s;
            }
        }
        catch (const DetectError&)
        {
        }
    }
    if (!chosen)
    {
        throw *periodic_error;
    }
    report.profile = *chosen;
    return report;
}

ClassifiedObservation classify(const net::Observation& obs, const PtpProfile& profile)
{
    ClassifiedObservation out{obs, {}, {}};
    const std::int64_t t3 = to_bins(profile.t3);
    if (t3 <= 0)
    {
        return out;
    }
    const std::int64_t bin = net::bin_of(obs.seen_at);
    const Direction dir = profile.use_direction ? obs.direction : Direction::master_to_slave;
    const Direction sm = profile.use_direction ? Direction::slave_to_master : Direction::master_to_slave;
    const std::int64_t phase = mod(bin - to_bins(profile.sync_phase), t3);
    const std::int64_t t0 = to_bins(profile.t0);
    const std::int64_t t1 = to_bins(profile.t1);
    const std::int64_t t2 = to_bins(profile.t2);

    const auto try_slot = [&](std::int64_t slot, std::uint32_t len, Direction want, ptp::MessageKind kind) {
        if (out.label.kind || obs.wire_length != len || dir != want)
        {
            return;
        }
        const std::int64_t r = ring_diff(phase, slot, t3);
        if (std::llabs(r) <= 1)
        {
            out.label.kind = kind;
            out.phase_residual = bins(r);
        }
    };
    try_slot(0, profile.x, Direction::master_to_slave, ptp::MessageKind::sync);
    try_slot(t0, profile.x, Direction::master_to_slave, ptp::MessageKind::follow_up);
    try_slot(t0 + t1, profile.x_req, sm, ptp::MessageKind::delay_req);
    try_slot(t0 + t1 + t2, profile.x, Direction::master_to_slave, ptp::MessageKind::delay_resp);

    const std::int64_t ta = to_bins(profile.announce_period);
    if (!out.label.kind && profile.y != 0 && ta > 0 && obs.wire_length == profile.y && dir == Direction::master_to_slave)
    {
        const std::int64_t r = ring_diff(mod(bin, ta), mod(to_bins(profile.announce_phase), ta), ta);
        if (std::llabs(r) <= 1)
        {
            out.label.kind = ptp::MessageKind::announce;
            out.phase_residual = bins(r);
        }
    }
    return out;
}

ClassifiedObservation FlowClassifier::next(const net::Observation& obs)
{
    if (profile_.mode == PtpProfile::Mode::periodic)
    {
        return classify(obs, profile_);
    }
    ClassifiedObservation out{obs, {}, {}};
    if (obs.direction == Direction::slave_to_master && obs.wire_length == profile_.x_req)
    {
        out.label.kind = ptp::MessageKind::delay_req;
        expect_ = Expect::delay_resp;
        return out;
    }
    if (obs.direction != Direction::master_to_slave)
    {
        return out;
    }
    if (obs.wire_length == profile_.x)
    {
        switch (expect_)
        {
        case Expect::delay_resp:
            out.label.kind = ptp::MessageKind::delay_resp;
            expect_ = Expect::sync;
            break;
        case Expect::sync:
            out.label.kind = ptp::MessageKind::sync;
            expect_ = Expect::follow_up;
            break;
        case Expect::follow_up:
            out.label.kind = ptp::MessageKind::follow_up;
            expect_ = Expect::delay_req;
            break;
        case Expect::delay_req:
        case Expect::unknown:
            break;
        }
        return out;
    }
    if (profile_.y != 0 && obs.wire_length == profile_.y)
    {
        out.label.kind = ptp::MessageKind::announce;
    }
    return out;
}

std::vector<ClassifiedObservation> classify_all(std::span<const net::Observation> observations, const PtpProfile& profile)
{
    FlowClassifier c(profile);
    std::vector<ClassifiedObservation> out;
    out.reserve(observations.size());
    for (const auto& o : observations)
    {
        out.push_back(c.next(o));
    }
    return out;
}

} // namespace ptpdelay::detect
