#include "oracle/reference.hpp"

#include "ptpdelay/detect/binned.hpp"
#include "ptpdelay/detect/detector.hpp"
#include "ptpdelay/detect/period.hpp"
#include "ptpdelay/detect/profile.hpp"
#include "ptpdelay/detect/synthetic.hpp"

#include <doctest.h>

#include <sstream>

using namespace ptpdelay;
using namespace ptpdelay::detect;
using namespace ptpdelay::literals;

namespace
{

PtpProfile lab_profile()
{
    PtpProfile p;
    p.t3 = 250_ms;
    p.t0 = 2_ms;
    p.t1 = 5_ms;
    p.t2 = 4_ms;
    p.x = 138;
    p.x_req = 138;
    p.y = 154;
    p.announce_period = 2_s;
    p.sync_phase = 0_ms;
    p.announce_phase = 125_ms;
    return p;
}

net::Observation ob(std::int64_t ns, std::uint32_t len = 100, net::Direction d = net::Direction::master_to_slave)
{
    return {SimTime(ns), len, d};
}

} // namespace

TEST_CASE("discretize keeps the first packet of a bin")
{
    CHECK(discretize({}).empty());
    const std::vector<net::Observation> obs{ob(100), ob(900'000), ob(1'000'000), ob(5'500'000)};
    const auto s = discretize(obs);
    REQUIRE(s.size() == 3);
    CHECK(s.collisions == 1);
    CHECK(s.packets[0].bin == 0);
    CHECK(s.packets[0].source == 0);
    CHECK(s.packets[1].bin == 1);
    CHECK(s.packets[2].bin == 5);
    CHECK(s.end_bin == 6);
    CHECK(discretize(obs, 100).end_bin == 100);
    const std::vector<net::Observation> unsorted{ob(5), ob(1)};
    CHECK_THROWS_AS((void)discretize(unsorted), InvariantViolation);
}

TEST_CASE("class positions honour the direction switch")
{
    const std::vector<net::Observation> obs{ob(0, 138), ob(1'000'000, 138, net::Direction::slave_to_master), ob(2'000'000, 138)};
    const auto s = discretize(obs);
    CHECK(class_positions(s, {138, net::Direction::master_to_slave}, true) == std::vector<std::int64_t>{0, 2});
    CHECK(class_positions(s, {138, net::Direction::master_to_slave}, false) == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("successor hits: serial, parallel and naive agree")
{
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<std::int64_t> pos;
        std::int64_t b = rng.uniform_int(0, 5);
        while (b < 3000)
        {
            pos.push_back(b);
            b += rng.uniform_int(1, 120);
        }
        const auto n = ref::naive_successor_hits(pos, 3000, 2, 400);
        const auto s = successor_hits_serial(pos, 3000, 2, 400);
        const auto p = successor_hits_parallel(pos, 3000, 2, 400);
        CHECK(s.t_min == 2);
        CHECK(s.eligible == n.eligible);
        CHECK(s.tolerant == n.tolerant);
        CHECK(s.exact == n.exact);
        CHECK(p.eligible == s.eligible);
        CHECK(p.tolerant == s.tolerant);
        CHECK(p.exact == s.exact);
    }
}

TEST_CASE("period estimation")
{
    std::vector<std::int64_t> pos;
    for (std::int64_t k = 0; k < 40; ++k)
    {
        pos.push_back(3 + 250 * k);
    }
    const auto ranked = estimate_period(pos, 10'003);
    REQUIRE_FALSE(ranked.empty());
    CHECK(select_period(ranked).period == 250);
    CHECK(ranked.front().score == doctest::Approx(1.0));

    const std::vector<std::int64_t> two{1, 5};
    try
    {
        (void)estimate_period(two, 100);
        FAIL("expected DetectError");
    }
    catch (const DetectError& e)
    {
        CHECK(e.reason() == DetectError::Reason::insufficient_occurrences);
    }
}

TEST_CASE("synthetic stream recovers the lab profile")
{
    SyntheticSpec spec;
    spec.truth = lab_profile();
    spec.duration = 60_s;
    const auto st = generate(spec);
    // 240 cycles of four, 30 announces.
    CHECK(st.observations.size() == 240 * 4 + 30);
    const auto rep = detect::detect(st.observations);
    CHECK(rep.profile.mode == PtpProfile::Mode::periodic);
    CHECK(rep.profile.matches(spec.truth, Duration{}));
    CHECK(rep.profile.sync_phase == 0_ms);
    CHECK(rep.profile.announce_period == 2_s);
    CHECK(rep.profile.confidence > 0.95);
}

TEST_CASE("hundred random profiles without noise are recovered exactly")
{
    Rng rng(100);
    int exact = 0;
    for (int i = 0; i < 100; ++i)
    {
        SyntheticSpec spec;
        spec.truth = random_profile(rng);
        spec.duration = 30_s;
        const auto rep = detect::detect(generate(spec).observations);
        exact += rep.profile.matches(spec.truth, Duration{}) ? 1 : 0;
    }
    CHECK(exact == 100);
}

TEST_CASE("heavy noise with a long window")
{
    SyntheticSpec spec;
    spec.truth = lab_profile();
    spec.duration = 1000_s;
    spec.noise = {0.999, 60, 1400, 5};
    const auto rep = detect::detect(generate(spec).observations);
    CHECK(rep.profile.matches(spec.truth));
}

TEST_CASE("withholding direction with uniform lengths is ambiguous")
{
    SyntheticSpec spec;
    spec.truth = lab_profile();
    spec.duration = 60_s;
    DetectOptions opt;
    opt.use_direction = false;
    try
    {
        (void)detect::detect(generate(spec).observations, opt);
        FAIL("expected DetectError");
    }
    catch (const DetectError& e)
    {
        CHECK(e.reason() == DetectError::Reason::ambiguous);
    }

    // A distinct request length is enough to pin the slot again.
    spec.truth.x_req = 170;
    const auto rep = detect::detect(generate(spec).observations, opt);
    CHECK(rep.profile.x_req == 170);
    CHECK(rep.profile.t1 == 5_ms);
}

TEST_CASE("noise alone yields no profile")
{
    const auto noise = net::noise_source({0.3, 60, 1400, 2}, 20_s);
    CHECK_THROWS_AS((void)detect::detect(noise), DetectError);
}

TEST_CASE("order-only model on jittered timings")
{
    // Lags re-drawn every cycle: the periodic fit degrades, the sequence fit does not.
    Rng rng(3);
    std::vector<net::Observation> obs;
    for (std::int64_t k = 0; k < 200; ++k)
    {
        const std::int64_t base = k * 250'000'000 + rng.uniform_int(0, 100) * 1'000'000 + 500'000;
        const std::int64_t f = base + rng.uniform_int(2, 40) * 1'000'000;
        const std::int64_t r = f + rng.uniform_int(2, 40) * 1'000'000;
        const std::int64_t s = r + 4'000'000;
        obs.push_back(ob(base, 154));
        obs.push_back(ob(f, 154));
        obs.push_back(ob(r, 154, net::Direction::slave_to_master));
        obs.push_back(ob(s, 154));
    }
    const auto rep = detect::detect(obs);
    CHECK(rep.profile.mode == PtpProfile::Mode::sequence);
    CHECK(rep.profile.t2 == 4_ms);
    CHECK(rep.profile.x == 154);

    FlowClassifier fc(rep.profile);
    int right = 0;
    for (std::size_t i = 0; i < obs.size(); ++i)
    {
        const auto lbl = fc.next(obs[i]).label;
        static constexpr ptp::MessageKind order[4] = {ptp::MessageKind::sync, ptp::MessageKind::follow_up,
                                                      ptp::MessageKind::delay_req, ptp::MessageKind::delay_resp};
        right += lbl.kind == order[i % 4] ? 1 : 0;
    }
    CHECK(right >= static_cast<int>(obs.size()) - 4);
}

TEST_CASE("stateless classification of the lab profile")
{
    SyntheticSpec spec;
    spec.truth = lab_profile();
    spec.duration = 10_s;
    spec.noise = {0.2, 60, 1400, 8};
    const auto st = generate(spec);
    const auto rep = detect::detect(st.observations);
    const auto cls = classify_all(st.observations, rep.profile);
    REQUIRE(cls.size() == st.labels.size());
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < cls.size(); ++i)
    {
        if (!st.labels[i].is_noise() && cls[i].label != st.labels[i])
        {
            ++mismatched;
        }
    }
    CHECK(mismatched == 0);
}

TEST_CASE("profile file round trip")
{
    auto p = lab_profile();
    p.confidence = 0.875;
    std::stringstream ss;
    write_profile(ss, p);
    CHECK(ss.str().rfind("# ptp-profile v1\n", 0) == 0);
    const auto q = read_profile(ss);
    CHECK(q.matches(p, Duration{}));
    CHECK(q.announce_phase == p.announce_phase);
    CHECK(q.confidence == doctest::Approx(0.875));
    std::stringstream bad("# ptp-profile v1\nmode=weird\n");
    CHECK_THROWS_AS((void)read_profile(bad), ConfigError);
}

TEST_CASE("matches tolerance")
{
    auto a = lab_profile();
    auto b = a;
    b.t1 += 1_ms;
    CHECK(b.matches(a));
    CHECK_FALSE(b.matches(a, Duration{}));
    b.y = 10;
    CHECK_FALSE(b.matches(a));
}
