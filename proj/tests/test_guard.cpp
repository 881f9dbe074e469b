#include "oracle/reference.hpp"

#include "ptpdelay/guard/bounds.hpp"
#include "ptpdelay/guard/countermeasures.hpp"
#include "ptpdelay/sim/random.hpp"

#include <doctest.h>

#include <set>

using namespace ptpdelay;
using namespace ptpdelay::guard;
using namespace ptpdelay::literals;

namespace
{

// Slave clock at theta, forward OWD a, return OWD b, DelayReq sent right after Sync arrival.
ptp::SyncCycle forward_sim(std::int64_t theta, std::int64_t a, std::int64_t b, std::int64_t wait = 0)
{
    const std::int64_t s2_true = a;
    const std::int64_t s3_true = a + wait;
    const std::int64_t m4_true = s3_true + b;
    return ptp::SyncCycle::of(0, s2_true + theta, s3_true + theta, m4_true);
}

} // namespace

TEST_CASE("bound of the symmetric seven unit link")
{
    const auto c = forward_sim(0, 7, 7);
    const auto b = bound_offset(c, {});
    CHECK(b.low.ns() == ref::fig9_low);
    CHECK(b.high.ns() == ref::fig9_high);
}

TEST_CASE("bounds with minimum owd knowledge")
{
    const OwdConstraints k{Duration(2), Duration(6)};
    const auto early = forward_sim(-3, 5, 9);
    const auto be = bound_offset(early, k);
    CHECK(be.low.ns() == ref::fig10_early_low);
    CHECK(be.high.ns() == ref::fig10_early_high);
    CHECK(midpoint_offset(early, k).ns() == ref::fig10_early_mid);
    CHECK(residual_uncertainty(early, k).ns() == ref::fig10_residual);

    const auto late = forward_sim(3, 5, 9);
    const auto bl = bound_offset(late, k);
    CHECK(bl.low.ns() == ref::fig10_late_low);
    CHECK(bl.high.ns() == ref::fig10_late_high);
    CHECK(midpoint_offset(late, k).ns() == ref::fig10_late_mid);
    CHECK(residual_uncertainty(late, k).ns() == ref::fig10_residual);
}

TEST_CASE("infeasible rtd is a constraint violation, never clamped")
{
    const auto c = forward_sim(0, 2, 2);
    CHECK_THROWS_AS((void)bound_offset(c, {Duration(3), Duration(3)}), ConstraintViolation);
    CHECK_THROWS_AS((void)residual_uncertainty(c, {Duration(3), Duration(3)}), InvariantViolation);
    CHECK_NOTHROW((void)bound_offset(c, {Duration(2), Duration(2)}));
}

TEST_CASE("bound soundness on random cycles")
{
    Rng rng(2024);
    for (int i = 0; i < 20000; ++i)
    {
        const auto theta = rng.uniform_int(-50'000'000, 50'000'000);
        const auto min_a = rng.uniform_int(0, 5'000'000);
        const auto min_b = rng.uniform_int(0, 5'000'000);
        const auto a = min_a + rng.uniform_int(0, 80'000'000);
        const auto b = min_b + rng.uniform_int(0, 80'000'000);
        const OwdConstraints k{Duration(rng.uniform_int(0, min_a)), Duration(rng.uniform_int(0, min_b))};
        const auto c = forward_sim(theta, a, b, rng.uniform_int(0, 10'000'000));
        const auto bound = bound_offset(c, k);
        REQUIRE(bound.contains(Duration(theta)));
        const auto mid = midpoint_offset(c, k);
        CHECK(mid == (bound.low + bound.high) / 2);
        REQUIRE(std::llabs(theta - mid.ns()) <= residual_uncertainty(c, k).ns());
    }
}

TEST_CASE("odd width rounds the residual up")
{
    // RTD 7, no minimums: width 7, residual 4, midpoint truncated.
    const auto c = forward_sim(0, 3, 4);
    CHECK(residual_uncertainty(c, {}).ns() == 4);
    const auto b = bound_offset(c, {});
    CHECK(b.width().ns() == 7);
}

TEST_CASE("system half width")
{
    const OwdConstraints k{Duration(2), Duration(6)};
    const SystemBoundParams p{Duration(14), 1_s, DriftRate::ppm(0)};
    CHECK(system_half_width(p, k).ns() == 3);
    const SystemBoundParams q{Duration(15), 1_s, DriftRate::ppm(2)};
    // ceil(7/2) + 1 s * 2 ppm.
    CHECK(system_half_width(q, k).ns() == 4 + 2'000);
    const SystemBoundParams r{Duration(14), Duration(1'000'001), DriftRate::ppm(1)};
    CHECK(system_half_width(r, k).ns() == 3 + 2);
    CHECK(system_bound(p, k) == OffsetBound{Duration(-3), Duration(3)});
    CHECK_THROWS_AS((void)system_half_width({Duration(7), 1_s, {}}, k), ConfigError);
}

TEST_CASE("rtd gate")
{
    const auto c = forward_sim(0, 7, 7);
    CHECK(rtd_gate(c, Duration(14)) == GateDecision::accept);
    CHECK(rtd_gate(c, Duration(13)) == GateDecision::reject);

    RtdGate g(Duration(14));
    CHECK(g.check(c, SimTime(100)) == GateDecision::accept);
    const auto wide = forward_sim(0, 10, 10);
    CHECK(g.check(wide, SimTime(200)) == GateDecision::reject);
    CHECK(g.check(wide, SimTime(300)) == GateDecision::reject);
    CHECK(g.check(c, SimTime(400)) == GateDecision::accept);
    CHECK(g.longest_starvation() == 2);
    CHECK(g.observed_t_interval().ns() == 300);
    CHECK(g.accepted() == 2);
    CHECK(g.rejected() == 2);

    RtdGate open(std::nullopt);
    CHECK(open.check(wide, SimTime(1)) == GateDecision::accept);
}

TEST_CASE("gated residual stays within the system half width")
{
    Rng rng(9);
    const OwdConstraints k{Duration(1'000), Duration(3'000)};
    const Duration rtd_max(50'000);
    const SystemBoundParams p{rtd_max, 1_s, {}};
    for (int i = 0; i < 5000; ++i)
    {
        const auto c = forward_sim(rng.uniform_int(-9'000, 9'000), 1'000 + rng.uniform_int(0, 60'000), 3'000 + rng.uniform_int(0, 60'000));
        if (rtd_gate(c, rtd_max) == GateDecision::accept)
        {
            CHECK(residual_uncertainty(c, k) <= system_half_width(p, k));
        }
    }
}

TEST_CASE("round trip comparison flags a one-kind delay")
{
    const OwdConstraints k{1_ms, 1_ms};
    auto c = forward_sim(0, 1'000'000 + 50'000'000, 1'000'000, 3'000'000);
    // DelayResp comes back at s3 + 1 ms + 0 turnaround + 1 ms.
    c.t_s6 = *c.t_s3 + 2_ms;
    const auto r = round_trip_check(c, k, Duration{});
    CHECK(r.sync_width == 50_ms);
    CHECK(r.resp_width == Duration{});
    CHECK(r.suspicious);

    auto clean = forward_sim(0, 1'000'000, 1'000'000);
    clean.t_s6 = *clean.t_s3 + 2_ms;
    CHECK_FALSE(round_trip_check(clean, k, Duration{}).suspicious);
    clean.t_s6.reset();
    CHECK_THROWS_AS((void)round_trip_check(clean, k, Duration{}), IncompleteCycle);
}

TEST_CASE("replay window examples")
{
    ReplayWindow strict({1});
    CHECK(strict.accept(1));
    CHECK(strict.accept(2));
    CHECK(strict.accept(3));
    CHECK_FALSE(strict.accept(2));
    CHECK_FALSE(strict.accept(3));
    CHECK(strict.rejected() == 2);

    ReplayWindow w({4});
    CHECK(w.accept(10));
    CHECK(w.accept(8));
    CHECK_FALSE(w.accept(8));
    CHECK(w.accept(7));
    CHECK_FALSE(w.accept(6));
    CHECK(replay_check(12, w));

    CHECK_THROWS_AS(ReplayWindow({0}), ConfigError);
    CHECK_THROWS_AS(ReplayWindow({65}), ConfigError);
}

TEST_CASE("replay window agrees with a naive set")
{
    Rng rng(31);
    for (const std::uint32_t window : {1U, 2U, 5U, 32U, 64U})
    {
        ReplayWindow fast({window});
        ref::NaiveReplay slow;
        slow.window = window;
        std::uint64_t base = 0;
        for (int i = 0; i < 20000; ++i)
        {
            base += static_cast<std::uint64_t>(rng.uniform_int(0, 3));
            const auto back = static_cast<std::uint64_t>(rng.uniform_int(0, 80));
            const std::uint64_t seq = base > back ? base - back : 0;
            REQUIRE(fast.accept(seq) == slow.accept(seq));
        }
    }
}

TEST_CASE("padding")
{
    const auto ipsec = net::EncryptionScheme::ipsec_tunnel();
    CHECK(max_ptp_wire_length(ipsec) == 154);
    const auto maxp = PaddingPolicy::parse("max");
    for (const auto k : ptp::kAllKinds)
    {
        CHECK(apply_padding(ptp::plain_length(k), maxp, ipsec) == 154);
    }
    CHECK(apply_padding(1400, maxp, ipsec) > 154);
    CHECK(apply_padding(86, PaddingPolicy::parse("fixed:200"), ipsec) == 200);
    CHECK(apply_padding(86, PaddingPolicy::parse("none"), ipsec) == 138);
    CHECK_THROWS_AS(validate_padding(PaddingPolicy::parse("fixed:140"), ipsec), ConfigError);
    CHECK_THROWS_AS((void)PaddingPolicy::parse("fixed:x"), ConfigError);
    CHECK(PaddingPolicy::parse("fixed:200").to_string() == "fixed:200");
}

TEST_CASE("timing randomization")
{
    ptp::EngineConfig cfg;
    TimingRandomization r;
    r.followup_lag = LagRange{2_ms, 60_ms};
    r.delayreq_lag = LagRange{2_ms, 60_ms};
    r.sync_jitter = LagRange{0_ms, 120_ms};
    r.seed = 4;
    const auto lags = randomize_timing(cfg, r);
    std::set<std::int64_t> distinct;
    for (std::uint64_t s = 0; s < 200; ++s)
    {
        const auto l = lags(s);
        CHECK(l.followup_lag >= 2_ms);
        CHECK(l.followup_lag <= 60_ms);
        CHECK(l.sync_offset <= 120_ms);
        CHECK(l.followup_lag == lags(s).followup_lag);
        distinct.insert(l.followup_lag.ns());
    }
    CHECK(distinct.size() > 150);

    TimingRandomization too_wide;
    too_wide.sync_jitter = LagRange{0_ms, 250_ms};
    CHECK_THROWS_AS(too_wide.validate(cfg), ConfigError);
    TimingRandomization zero_t0;
    zero_t0.followup_lag = LagRange{0_ms, 1_ms};
    CHECK_THROWS_AS(zero_t0.validate(cfg), ConfigError);
    CHECK_FALSE(TimingRandomization{}.active());
}
