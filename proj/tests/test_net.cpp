#include "oracle/reference.hpp"

#include "ptpdelay/net/encryption.hpp"
#include "ptpdelay/net/link.hpp"
#include "ptpdelay/net/observe.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ptpdelay;
using namespace ptpdelay::net;
using namespace ptpdelay::literals;

namespace
{

Envelope env(std::int64_t send, Direction d, std::uint32_t wire = 138, std::uint64_t id = 0)
{
    Envelope e;
    e.id = id;
    e.send_time = SimTime(send);
    e.direction = d;
    e.wire_length = wire;
    return e;
}

} // namespace

TEST_CASE("encryption lengths")
{
    const auto ipsec = EncryptionScheme::ipsec_tunnel();
    CHECK(encrypt_wrap(86, ipsec) == ref::ipsec_sync);
    CHECK(encrypt_wrap(96, ipsec) == ref::ipsec_req);
    CHECK(encrypt_wrap(106, ipsec) == ref::ipsec_announce);
    CHECK(encrypt_wrap(86, EncryptionScheme::identity()) == 86);
    CHECK(EncryptionScheme::by_name("ipsec-tunnel").encrypt_wrap(86) == 138);
    CHECK_THROWS_AS((void)EncryptionScheme::by_name("rot13"), ConfigError);

    const auto blocky = EncryptionScheme::from_rule("b", {10, 2, 16});
    CHECK(blocky.encrypt_wrap(14) == 26);
    CHECK(blocky.encrypt_wrap(15) == 42);
    const auto table = EncryptionScheme::from_table("t", {{5, 50}});
    CHECK(table.encrypt_wrap(5) == 50);
    CHECK_THROWS((void)table.encrypt_wrap(6));
}

TEST_CASE("transmit examples")
{
    SUBCASE("symmetric two units")
    {
        LinkProfile p;
        p.d_common = Duration(2);
        Link l(p, 1);
        CHECK(l.transmit(env(0, Direction::master_to_slave), Duration{}).arrival->ns() == 2);
    }
    SUBCASE("return path takes eight")
    {
        LinkProfile p;
        p.d_common = Duration(2);
        p.delta_sm = Duration(6);
        Link l(p, 1);
        CHECK(l.transmit(env(2, Direction::slave_to_master), Duration{}).arrival->ns() == 10);
    }
    SUBCASE("attacker delay adds exactly")
    {
        LinkProfile p;
        p.d_common = 2_ms;
        Link l(p, 1);
        const auto d = l.transmit(env(0, Direction::master_to_slave), 50_ms);
        CHECK(d.arrival->ns() == (52_ms).ns());
        CHECK(d.parts.attack == 50_ms);
        CHECK(d.parts.total() == 52_ms);
    }
    SUBCASE("infinite delay drops")
    {
        LinkProfile p;
        Link l(p, 1);
        CHECK_FALSE(l.transmit(env(0, Direction::master_to_slave), Duration::infinite()).arrival);
    }
    SUBCASE("negative attacker delay is refused")
    {
        Link l(LinkProfile{}, 1);
        CHECK_THROWS_AS(l.transmit(env(0, Direction::master_to_slave), Duration(-1)), InvariantViolation);
    }
}

TEST_CASE("transmission delay depends on rate")
{
    LinkProfile p;
    p.rate = 1'000'000; // 1 byte per µs
    CHECK(p.transmission_delay(138) == 138_us);
    CHECK(p.min_delay(Direction::slave_to_master, 100) == 100_us);
}

TEST_CASE("link properties over random traffic")
{
    LinkProfile p;
    p.d_common = 1_ms;
    p.delta_ms = 300_us;
    p.delta_sm = 50_us;
    p.jitter = jitter::Uniform{0_ns, 400_us};
    p.rate = 12'500'000;
    Link l(p, 77);
    Rng rng(5);
    std::array<std::optional<SimTime>, 2> last;
    std::int64_t t = 0;
    for (int i = 0; i < 5000; ++i)
    {
        t += rng.uniform_int(0, 200'000);
        const auto d = rng.bernoulli(0.5) ? Direction::master_to_slave : Direction::slave_to_master;
        const auto e = env(t, d, static_cast<std::uint32_t>(rng.uniform_int(40, 1500)));
        const auto a = rng.bernoulli(0.1) ? Duration(rng.uniform_int(0, 2'000'000)) : Duration{};
        const auto out = l.transmit(e, a);
        REQUIRE(out.arrival);
        // OWD lower bound holds under attack too.
        CHECK(*out.arrival - e.send_time >= p.d_common + p.delta(d));
        CHECK(*out.arrival - e.send_time == out.parts.total());
        // FIFO per direction.
        if (last[index(d)])
        {
            CHECK(*out.arrival >= *last[index(d)]);
        }
        last[index(d)] = out.arrival;
    }
}

TEST_CASE("decomposition without jitter")
{
    LinkProfile p;
    p.d_common = 2_ms;
    p.delta_ms = 1_ms;
    p.delta_sm = 3_ms;
    Link l(p, 1);
    CHECK(l.transmit(env(0, Direction::master_to_slave), Duration{}).parts.total() == 3_ms);
    CHECK(l.transmit(env(0, Direction::slave_to_master), Duration{}).parts.total() == 5_ms);
}

TEST_CASE("overtaking is only possible past the attacker hold")
{
    LinkProfile p;
    p.d_common = 1_ms;
    p.allow_overtake = true;
    Link l(p, 1);
    const auto held = l.transmit(env(0, Direction::master_to_slave), 10_ms);
    const auto next = l.transmit(env(1'000'000, Direction::master_to_slave), Duration{});
    CHECK(*next.arrival < *held.arrival);

    p.allow_overtake = false;
    Link fifo(p, 1);
    const auto h2 = fifo.transmit(env(0, Direction::master_to_slave), 10_ms);
    const auto n2 = fifo.transmit(env(1'000'000, Direction::master_to_slave), Duration{});
    CHECK(*n2.arrival == *h2.arrival);
    CHECK(n2.parts.queueing == 9_ms);
}

TEST_CASE("link profile validation")
{
    LinkProfile p;
    p.d_common = Duration(-1);
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.d_common = 2_ms;
    p.tap_offset_ms = 3_ms;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.jitter = jitter::Uniform{5_ns, 1_ns};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.d_common = 4_ms;
    CHECK(p.tap_offset(Direction::slave_to_master) == 2_ms);
}

TEST_CASE("tap ordering and completeness")
{
    CHECK(tap({}, LinkProfile{}).empty());

    LinkProfile p;
    p.d_common = 2_ms;
    p.tap_offset_ms = 0_ms;
    p.tap_offset_sm = 2_ms;
    const std::vector<Envelope> es{env(5'000'000, Direction::master_to_slave, 1, 1), env(4'000'000, Direction::slave_to_master, 2, 2),
                                   env(1'000'000, Direction::master_to_slave, 3, 3)};
    const auto obs = tap(es, p);
    REQUIRE(obs.size() == 3);
    CHECK(obs[0].wire_length == 3);
    CHECK(obs[0].seen_at.ns() == 1'000'000);
    CHECK(obs[1].wire_length == 1);
    CHECK(obs[2].wire_length == 2);
    CHECK(obs[2].seen_at.ns() == 6'000'000);
}

TEST_CASE("noise source")
{
    NoiseSource none;
    CHECK(noise_source(none, 10_s).empty());

    NoiseSource full{1.0, 40, 1500, 3};
    const auto ten = noise_source(full, 10_ms);
    CHECK(ten.size() == 10);
    for (std::size_t i = 0; i < ten.size(); ++i)
    {
        CHECK(bin_of(ten[i].seen_at) == static_cast<std::int64_t>(i));
        CHECK(ten[i].wire_length >= 40);
        CHECK(ten[i].wire_length <= 1500);
    }

    NoiseSource heavy{0.999, 60, 1400, 11};
    const auto n = noise_source(heavy, 1000_s).size();
    // Binomial(1e6, 0.999): sigma ~ 31.6, allow 6 sigma.
    CHECK(std::fabs(static_cast<double>(n) - 999'000.0) < 190.0);

    // Counter-based: sub-ranges agree with the full range.
    const auto part = heavy.observations(500, 520);
    const auto whole = heavy.observations(0, 1000);
    for (const auto& o : part)
    {
        CHECK(std::find(whole.begin(), whole.end(), o) != whole.end());
    }

    NoiseSource bad{1.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("with_noise respects free bins")
{
    const std::vector<Observation> real{{SimTime(2'500'000), 138, Direction::master_to_slave},
                                        {SimTime(7'100'000), 138, Direction::slave_to_master}};
    const NoiseSource full{1.0, 40, 50, 9};
    const auto free = with_noise(real, full, NoiseMode::free_bins, 0, 10);
    CHECK(free.size() == 10);
    const auto indep = with_noise(real, full, NoiseMode::independent, 0, 10);
    CHECK(indep.size() == 12);
    CHECK(real.size() + noise_source(full, 10_ms).size() == indep.size());
    for (std::size_t i = 1; i < indep.size(); ++i)
    {
        CHECK(indep[i - 1].seen_at <= indep[i].seen_at);
    }
}

TEST_CASE("obs trace round trip")
{
    const std::vector<Observation> obs{{SimTime(1), 138, Direction::master_to_slave}, {SimTime(2'000'000), 154, Direction::slave_to_master}};
    std::stringstream ss;
    write_obs_trace(ss, obs);
    CHECK(ss.str().rfind("# obs-trace v1\n", 0) == 0);
    CHECK(read_obs_trace(ss) == obs);

    std::stringstream bad("# obs-trace v2\n1,2,MS\n");
    CHECK_THROWS_AS((void)read_obs_trace(bad), ConfigError);
    std::stringstream bad_dir("# obs-trace v1\n1,2,XX\n");
    CHECK_THROWS_AS((void)read_obs_trace(bad_dir), ConfigError);
    std::stringstream unsorted("# obs-trace v1\n5,2,MS\n1,2,MS\n");
    CHECK_THROWS((void)read_obs_trace(unsorted));
}
