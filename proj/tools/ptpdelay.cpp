// Command-line front end. Exit status: 0 ok, 1 configuration error, 2 invariant violation.

#include "ptpdelay/detect/detector.hpp"
#include "ptpdelay/error.hpp"
#include "ptpdelay/harness/scenario.hpp"
#include "ptpdelay/harness/simulation.hpp"
#include "ptpdelay/harness/sweep.hpp"
#include "ptpdelay/harness/traces.hpp"
#include "ptpdelay/net/observe.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{

using namespace ptpdelay;

constexpr int kOk = 0;
constexpr int kConfig = 1;
constexpr int kInvariant = 2;

int cmd_simulate(const std::string& scenario_path, const std::string& out)
{
    const auto s = harness::load_scenario(scenario_path);
    const auto r = harness::run_scenario(s);
    harness::write_run(r, out);
    const auto& m = r.summary;
    std::cout << m.name << ": " << m.cycles_completed << " cycles, converged offset " << m.converged_offset.ns()
              << " ns, max |offset| " << m.max_abs_offset.ns() << " ns\n";
    if (s.guard.owd)
    {
        std::cout << "bounds: " << m.bound_cycles << " accepted cycles, " << m.bound_violations << " violations, "
                  << m.rejected_cycles << " rejected\n";
    }
    if (m.attack_plan != "none")
    {
        std::cout << "attack: " << m.attack_plan << (m.armed ? " armed" : " not armed") << " (" << m.arm_note << "), "
                  << m.delayed_packets << " delayed, " << m.dropped_packets << " dropped\n";
    }
    if (m.detector_status != "skipped")
    {
        std::cout << "detector: " << m.detector_status << ' ' << m.detector_mode << " confidence " << m.detector_confidence
                  << (m.detector_matches_truth ? " (matches truth)" : "") << '\n';
    }
    if (m.invariant_failures() > 0)
    {
        std::cerr << "invariant violations: bounds " << m.bound_violations << ", midpoint " << m.midpoint_violations
                  << ", system bound " << m.system_bound_violations << ", oracle identity " << m.oracle_identity_violations
                  << ", oracle decomposition " << m.oracle_decomposition_violations << '\n';
        return kInvariant;
    }
    return kOk;
}

int cmd_detect(const std::string& obs_path, const std::string& out, bool no_direction, const std::string& classified)
{
    const auto obs = net::read_obs_trace_file(obs_path);
    detect::DetectOptions opts;
    opts.use_direction = !no_direction;
    detect::DetectReport rep;
    try
    {
        rep = detect::detect(obs, opts);
    }
    catch (const DetectError& e)
    {
        std::cerr << "detection failed: " << e.what() << '\n';
        return kConfig;
    }
    detect::write_profile_file(out, rep.profile);
    if (!classified.empty())
    {
        std::ofstream f(classified);
        if (!f)
        {
            throw ConfigError("cannot write " + classified);
        }
        detect::write_classified_trace(f, detect::classify_all(obs, rep.profile));
    }
    std::cout << "profile (" << detect::to_string(rep.profile.mode) << "): t3=" << rep.profile.t3.ns() << " t0=" << rep.profile.t0.ns()
              << " t1=" << rep.profile.t1.ns() << " t2=" << rep.profile.t2.ns() << " x=" << rep.profile.x
              << " x_req=" << rep.profile.x_req << " y=" << rep.profile.y << " confidence=" << rep.profile.confidence << '\n';
    return kOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& grid_path, const std::string& out)
{
    const auto base = harness::load_scenario(scenario_path);
    const auto grid = harness::load_grid(grid_path);
    const auto rows = harness::run_sweep(base, grid);
    std::filesystem::create_directories(out);
    const auto path = (std::filesystem::path(out) / "sweep.tsv").string();
    std::ofstream f(path);
    if (!f)
    {
        throw ConfigError("cannot write " + path);
    }
    harness::write_sweep_table(f, grid, rows);
    std::size_t ok = 0;
    bool invariant = false;
    for (const auto& r : rows)
    {
        ok += r.status == "ok";
        invariant = invariant || r.status == "invariant-violation";
    }
    std::cout << ok << "/" << rows.size() << " points ok, table in " << path << '\n';
    if (invariant)
    {
        return kInvariant;
    }
    return ok == rows.size() ? kOk : kConfig;
}

int cmd_verify(const std::string& dir)
{
    const auto rep = harness::verify_bounds(dir);
    std::cout << rep.rows << " bound rows, " << rep.accepted << " accepted, " << rep.bound_violations << " bound violations, "
              << rep.midpoint_violations << " midpoint violations, " << rep.consistency_errors << " consistency errors\n";
    for (const auto& m : rep.messages)
    {
        std::cerr << "  " << m << '\n';
    }
    return rep.ok() ? kOk : kInvariant;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Delay-attack simulator for two-step PTP over encrypted links"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out;
    auto* sim = app.add_subcommand("simulate", "run a scenario and write its traces");
    sim->add_option("scenario", scenario, "scenario file, or builtin:<name>")->required();
    sim->add_option("--out", out, "output directory")->required();

    std::string obs;
    std::string profile_out;
    std::string classified;
    bool no_direction = false;
    auto* det = app.add_subcommand("detect", "fit a PTP profile to an obs-trace");
    det->add_option("obs-trace", obs, "obs-trace v1 file")->required()->check(CLI::ExistingFile);
    det->add_option("--out", profile_out, "profile output file")->required();
    det->add_option("--classified", classified, "also write a classified trace here");
    det->add_flag("--no-direction", no_direction, "ignore the direction field");

    std::string sweep_scenario;
    std::string grid;
    std::string sweep_out;
    auto* sw = app.add_subcommand("sweep", "run a scenario over a parameter grid");
    sw->add_option("scenario", sweep_scenario, "base scenario file, or builtin:<name>")->required();
    sw->add_option("--grid", grid, "grid file with key=v1,v2 lines")->required();
    sw->add_option("--out", sweep_out, "output directory")->required();

    std::string verify_dir;
    auto* vb = app.add_subcommand("verify-bounds", "re-check bound-trace.csv of a run directory");
    vb->add_option("dir", verify_dir, "run directory")->required();

    auto* ls = app.add_subcommand("scenarios", "list bundled scenarios");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try
    {
        if (*sim)
        {
            return cmd_simulate(scenario, out);
        }
        if (*det)
        {
            return cmd_detect(obs, profile_out, no_direction, classified);
        }
        if (*sw)
        {
            return cmd_sweep(sweep_scenario, grid, sweep_out);
        }
        if (*vb)
        {
            return cmd_verify(verify_dir);
        }
        if (*ls)
        {
            for (const auto& n : harness::bundled_scenario_names())
            {
                std::cout << n << '\n';
            }
            return kOk;
        }
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    catch (const InvariantViolation& e)
    {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kInvariant;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    catch (const ptpdelay::Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kInvariant;
    }
    return kOk;
}
