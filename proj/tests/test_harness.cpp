#include "oracle/reference.hpp"

#include "ptpdelay/harness/oracle.hpp"
#include "ptpdelay/harness/scenario.hpp"
#include "ptpdelay/harness/simulation.hpp"
#include "ptpdelay/harness/sweep.hpp"
#include "ptpdelay/harness/traces.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ptpdelay;
using namespace ptpdelay::harness;
using namespace ptpdelay::literals;

namespace
{

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("ptpdelay-test-" + name);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("scenario parsing")
{
    const auto s = parse_scenario_text("# comment\nname=x\nseed=5\nlink.d_common_ns=2000000\n\nattack.delay_ns=inf\n");
    CHECK(s.name == "x");
    CHECK(s.seed == 5);
    CHECK(s.link.d_common == 2_ms);
    CHECK(s.attack.delay.is_infinite());

    CHECK_THROWS_WITH_AS((void)parse_scenario_text("name=a\nbogus.key=1\n", "f.scn"), doctest::Contains("f.scn:2"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("seed=1\nseed=2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("seed=abc\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("duration_ns=0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("servo.alpha=2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("attack.plan=selective\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("guard.padding=fixed:100\nencryption.scheme=ipsec-tunnel\n"), ConfigError);
    CHECK_THROWS_AS((void)load_scenario("/nonexistent/path.scn"), ConfigError);
    CHECK_THROWS_AS((void)load_scenario("builtin:nope"), ConfigError);
}

TEST_CASE("every documented key is settable")
{
    const auto& keys = scenario_keys();
    CHECK(keys.size() > 60);
    CHECK(std::find(keys.begin(), keys.end(), "guard.d_min_ms_ns") != keys.end());
}

TEST_CASE("bundled scenarios load and validate")
{
    const auto& names = bundled_scenario_names();
    for (const char* want : {"fig1_baseline", "fig2_asym_delayreq", "fig3_asym_sync", "exp1_sync50ms", "exp2_delayreq50ms",
                             "exp3_incremental", "fig9_nobounds", "fig10_owdbounds"})
    {
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    }
    for (const auto& n : names)
    {
        CAPTURE(n);
        CHECK_NOTHROW((void)load_scenario("builtin:" + n));
        CHECK(bundled_scenario(n).name == n);
    }
}

TEST_CASE("golden sync trace")
{
    const auto r = run_scenario(bundled_scenario("fig1_baseline"));
    std::stringstream ss;
    write_sync_trace(ss, r.sync);
    CHECK(ss.str() == slurp(std::filesystem::path(PTPDELAY_GOLDEN_DIR) / "fig1_baseline.sync-trace.csv"));
}

TEST_CASE("golden bound traces")
{
    for (const std::string name : {"fig10_owdbounds", "fig10_owdbounds_late"})
    {
        CAPTURE(name);
        const auto r = run_scenario(bundled_scenario(name));
        std::stringstream ss;
        write_bound_trace(ss, r.bounds);
        CHECK(ss.str() == slurp(std::filesystem::path(PTPDELAY_GOLDEN_DIR) / (name + ".bound-trace.csv")));
        for (const auto& b : r.bounds)
        {
            CHECK(b.residual.ns() == ref::fig10_residual * ref::ms);
        }
    }
}

TEST_CASE("fig9 bound without minimum delays")
{
    const auto r = run_scenario(bundled_scenario("fig9_nobounds"));
    REQUIRE_FALSE(r.bounds.empty());
    for (const auto& b : r.bounds)
    {
        CHECK(b.bound.low.ns() == ref::fig9_low * ref::ms);
        CHECK(b.bound.high.ns() == ref::fig9_high * ref::ms);
    }
}

TEST_CASE("runs are reproducible")
{
    auto s = bundled_scenario("exp1_sync50ms");
    s.duration = 20_s;
    apply_setting(s, "attack.start_ns", "10000000000");
    s.converge_window = 5_s;
    const auto a = run_scenario(s);
    const auto b = run_scenario(s);
    std::stringstream sa, sb;
    write_summary(sa, a.summary);
    write_summary(sb, b.summary);
    CHECK(sa.str() == sb.str());
    std::stringstream ta, tb;
    write_sync_trace(ta, a.sync);
    write_sync_trace(tb, b.sync);
    CHECK(ta.str() == tb.str());
    CHECK(a.observations == b.observations);
}

TEST_CASE("trace writers and readers round trip")
{
    const auto r = run_scenario(bundled_scenario("fig10_owdbounds"));
    std::stringstream ss;
    write_sync_trace(ss, r.sync);
    const auto back = read_sync_trace(ss);
    REQUIRE(back.size() == r.sync.size());
    CHECK(back.front().measured == r.sync.front().measured);

    std::stringstream bs;
    write_bound_trace(bs, r.bounds);
    const auto bb = read_bound_trace(bs);
    REQUIRE(bb.size() == r.bounds.size());
    CHECK(bb.front().residual == r.bounds.front().residual);

    std::stringstream bad("# bound-trace v1\n1,2,5,3,4,4,1\n");
    CHECK_THROWS_AS((void)read_bound_trace(bad), ConfigError);
    std::stringstream wrong_ver("# sync-trace v9\n");
    CHECK_THROWS_AS((void)read_sync_trace(wrong_ver), ConfigError);
    std::stringstream short_row("# sync-trace v1\n1,2,3\n");
    CHECK_THROWS_AS((void)read_sync_trace(short_row), ConfigError);

    std::stringstream sum;
    write_summary(sum, r.summary);
    const auto kv = read_summary(sum);
    CHECK(kv.at("name") == "fig10_owdbounds");
    CHECK(kv.count("bound_violations") == 1);
}

TEST_CASE("write_run and verify_bounds")
{
    const auto dir = scratch("verify");
    const auto r = run_scenario(bundled_scenario("fig10_owdbounds"));
    write_run(r, dir.string());
    for (const char* f : {files::sync, files::bound, files::obs, files::attack, files::oracle, files::summary})
    {
        CHECK(std::filesystem::exists(dir / f));
    }
    const auto rep = verify_bounds(dir.string());
    CHECK(rep.ok());
    CHECK(rep.rows == r.bounds.size());
    CHECK(rep.accepted == rep.rows);

    // Corrupt one true offset: bound violated and the sync trace no longer agrees.
    auto bounds = r.bounds;
    bounds[2].true_offset = 5_ms;
    {
        std::ofstream f(dir / files::bound);
        write_bound_trace(f, bounds);
    }
    const auto broken = verify_bounds(dir.string());
    CHECK_FALSE(broken.ok());
    CHECK(broken.bound_violations == 1);
    CHECK(broken.consistency_errors == 1);
    CHECK_FALSE(broken.messages.empty());

    std::filesystem::remove(dir / files::bound);
    CHECK_THROWS_AS((void)verify_bounds(dir.string()), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("oracle identity on the golden scenarios")
{
    for (const auto& n : {"fig1_baseline", "fig2_asym_delayreq", "fig3_asym_sync", "fig9_nobounds", "fig10_owdbounds"})
    {
        CAPTURE(n);
        const auto r = run_scenario(bundled_scenario(n));
        REQUIRE_FALSE(r.oracle.empty());
        for (const auto& o : r.oracle)
        {
            CHECK(o.identity_ok);
            CHECK(o.decomposition_ok);
            // No jitter, no drift: the decomposition is exact.
            const auto d = oracle_decompose(o);
            CHECK(d.residual_2x == Duration{});
            CHECK(o.measured_2x == o.real_2x + o.asymmetry_2x);
        }
    }
}

TEST_CASE("oracle decomposition inside the jitter envelope")
{
    auto s = bundled_scenario("exp1_sync50ms");
    s.duration = 30_s;
    apply_setting(s, "attack.start_ns", "10000000000");
    apply_setting(s, "slave.drift_ppm", "3");
    s.converge_window = 5_s;
    const auto r = run_scenario(s);
    REQUIRE(r.oracle.size() > 50);
    for (const auto& o : r.oracle)
    {
        CHECK(o.identity_ok);
        CHECK(o.decomposition_ok);
        CHECK(abs(oracle_decompose(o).residual_2x) <= o.envelope_2x);
    }
}

TEST_CASE("ks test against brute force")
{
    Rng rng(12);
    std::vector<double> a, b, c;
    for (int i = 0; i < 300; ++i)
    {
        a.push_back(rng.normal(0, 1));
        b.push_back(rng.normal(0, 1));
        c.push_back(rng.normal(0.8, 1));
    }
    const auto same = ks_two_sample(a, b);
    CHECK(same.d == doctest::Approx(ref::naive_ks_d(a, b)));
    CHECK_FALSE(same.rejects());
    const auto diff = ks_two_sample(a, c);
    CHECK(diff.d == doctest::Approx(ref::naive_ks_d(a, c)));
    CHECK(diff.rejects());
    CHECK(kolmogorov_q(0.0) == doctest::Approx(1.0));
    // Q(1.36) is the familiar 5% point.
    CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(0.01));
}

TEST_CASE("drift and asymmetry are separated by the oracle")
{
    auto s = bundled_scenario("no_attack");
    s.duration = 40_s;
    apply_setting(s, "slave.drift_ppm", "5");
    apply_setting(s, "servo.enabled", "false");
    const auto r = run_scenario(s);
    const auto rep = indistinguishability_report(r.oracle);
    REQUIRE(rep.deltas > 100);
    // 5 ppm over 250 ms: 1250 ns per cycle; no asymmetry change on a static link.
    CHECK(rep.mean_abs_drift_ns == doctest::Approx(1250.0).epsilon(0.01));
    CHECK(rep.mean_abs_asymmetry_ns == doctest::Approx(0.0));
}

TEST_CASE("grid parsing and sweep")
{
    std::stringstream g("# two axes\nlink.delta_ms_ns=0,2000000\nslave.offset_ns=0,1000000,2000000\n");
    const auto grid = parse_grid(g);
    CHECK(grid.points() == 6);
    CHECK(grid.point(0) == std::vector<std::pair<std::string, std::string>>{{"link.delta_ms_ns", "0"}, {"slave.offset_ns", "0"}});
    CHECK(grid.point(4)[0].second == "2000000");
    CHECK(grid.point(4)[1].second == "1000000");

    std::stringstream empty("# nothing\n");
    CHECK_THROWS_AS((void)parse_grid(empty), ConfigError);
    std::stringstream unknown("no.such=1\n");
    CHECK_THROWS_AS((void)parse_grid(unknown), ConfigError);
    std::stringstream blank("seed=\n");
    CHECK_THROWS_AS((void)parse_grid(blank), ConfigError);

    auto base = bundled_scenario("fig1_baseline");
    const auto rows = run_sweep(base, grid);
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows)
    {
        CHECK(row.status == "ok");
    }
    std::stringstream tsv;
    write_sweep_table(tsv, grid, rows);
    std::string header;
    std::getline(tsv, header);
    CHECK(header.rfind("point\tlink.delta_ms_ns\tslave.offset_ns\tstatus\terror", 0) == 0);

    // A bad point is reported without stopping the others.
    std::stringstream bad("servo.alpha=0.5,7\n");
    const auto brows = run_sweep(base, parse_grid(bad));
    CHECK(brows[0].status == "ok");
    CHECK(brows[1].status == "config-error");
}

TEST_CASE("single point sweep equals a direct run")
{
    std::stringstream g("seed=1\n");
    const auto base = bundled_scenario("fig2_asym_delayreq");
    const auto rows = run_sweep(base, parse_grid(g));
    REQUIRE(rows.size() == 1);
    const auto direct = run_scenario(base).summary.fields();
    CHECK(rows[0].summary == direct);
}

TEST_CASE("random soundness scenarios hold their bounds")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed)
    {
        CAPTURE(seed);
        const auto s = random_soundness_scenario(seed);
        const auto r = run_scenario(s);
        CHECK(r.summary.bound_violations == 0);
        CHECK(r.summary.midpoint_violations == 0);
        CHECK(r.summary.system_bound_violations == 0);
        CHECK(r.summary.oracle_identity_violations == 0);
        CHECK(r.summary.oracle_decomposition_violations == 0);
    }
}

TEST_CASE("strict replay caps the injectable delay")
{
    auto s = bundled_scenario("cm_replay_strict");
    s.duration = 150_s;
    s.detect_at_end = false;
    const auto r = run_scenario(s);
    CHECK(r.summary.replay_rejected_ptp > 0);
    CHECK(r.summary.replay_cap_violations == 0);
    CHECK(r.summary.max_accepted_attack_delay <= r.summary.max_undelayed_gap);
}
