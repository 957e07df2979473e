// Copyright 2026 The uwloc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "uwloc/uwloc.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_domain = 2;

double to_rad(double deg)
{
    return deg * std::numbers::pi / 180.0;
}

double to_deg(double rad)
{
    return rad * 180.0 / std::numbers::pi;
}

int report(uwloc_status status)
{
    fmt::print(stderr, "error ({}): {}\n", uwloc_status_name(status),
               uwloc_last_error());
    return status == UWLOC_IO_ERROR || status == UWLOC_PARSE_ERROR ? exit_io
                                                                   : exit_domain;
}

// RAII owners for the C handles
template<class T, void (*Free)(T*)>
struct Handle
{
    T* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(ptr); }
    T** out() { return &ptr; }
    operator T*() const { return ptr; }
};

using Svp = Handle<uwloc_svp, uwloc_svp_free>;
using Measurements = Handle<uwloc_measurements, uwloc_measurements_free>;
using Localization = Handle<uwloc_localization, uwloc_localization_free>;
using Report = Handle<uwloc_report, uwloc_report_free>;

struct TraceArgs
{
    std::string svp;
    double theta_deg = 0;
    double z_from = 0;
    double z_to = 0;
};

int run_trace(const TraceArgs& a)
{
    Svp svp;
    if (auto s = uwloc_svp_load(a.svp.c_str(), svp.out()))
        return report(s);
    uwloc_trace_result r;
    auto s = uwloc_trace(svp, a.z_from, a.z_to, to_rad(a.theta_deg), &r);
    if (s == UWLOC_INFEASIBLE_ANGLE)
    {
        double tmin = 0;
        uwloc_min_feasible_angle(svp, a.z_from, a.z_to, &tmin);
        fmt::print(stderr,
                   "error (infeasible_angle): launch angle {:.6f} deg is at or "
                   "below the turning limit theta_min = {:.6f} deg\n",
                   a.theta_deg, to_deg(tmin));
        return exit_domain;
    }
    if (s)
        return report(s);
    fmt::print("t={:.9f} h={:.9f}\n", r.travel_time, r.horizontal_range);
    return exit_ok;
}

struct SolveArgs
{
    std::string svp;
    std::string mode;
    double target = 0;
    double z_from = 0;
    double z_to = 0;
    std::optional<double> tol;
};

int run_solve(const SolveArgs& a)
{
    Svp svp;
    if (auto s = uwloc_svp_load(a.svp.c_str(), svp.out()))
        return report(s);
    auto defaults = uwloc_irtul_config_default();
    double theta = 0;
    uwloc_status s;
    if (a.mode == "time")
        s = uwloc_solve_time(svp, a.z_from, a.z_to, a.target,
                             a.tol.value_or(defaults.time_tolerance), &theta);
    else
        s = uwloc_solve_range(svp, a.z_from, a.z_to, a.target,
                              a.tol.value_or(defaults.range_tolerance), &theta);
    if (s)
        return report(s);
    fmt::print("theta0_deg={:.6f}\n", to_deg(theta));
    return exit_ok;
}

struct SimplifyArgs
{
    std::string svp;
    std::optional<std::size_t> points;
    std::optional<double> rmse;
    std::string out;
};

int run_simplify(const SimplifyArgs& a)
{
    Svp svp;
    if (auto s = uwloc_svp_load(a.svp.c_str(), svp.out()))
        return report(s);
    Svp simple;
    auto s = a.points ? uwloc_svp_simplify_points(svp, *a.points, simple.out())
                      : uwloc_svp_simplify_rmse(svp, *a.rmse, simple.out());
    if (s)
        return report(s);
    double rmse = 0;
    if ((s = uwloc_svp_rmse(svp, simple, &rmse)))
        return report(s);
    if ((s = uwloc_svp_save(simple, a.out.c_str())))
        return report(s);
    fmt::print("points={} rmse={:.6f}\n", uwloc_svp_size(simple), rmse);
    return exit_ok;
}

struct LocalizeArgs
{
    std::string svp;
    std::string measurements;
    uwloc_irtul_config config = uwloc_irtul_config_default();
    bool verbose = false;
};

int run_localize(const LocalizeArgs& a)
{
    Svp svp;
    if (auto s = uwloc_svp_load(a.svp.c_str(), svp.out()))
        return report(s);
    Measurements ms;
    if (auto s = uwloc_measurements_load(a.measurements.c_str(), ms.out()))
        return report(s);
    Localization loc;
    if (auto s = uwloc_localize(svp, ms, &a.config, loc.out()))
        return report(s);

    if (a.verbose)
    {
        auto rough = uwloc_localization_rough_position(loc);
        fmt::print("rough x={:.3f} y={:.3f} z={:.3f}\n", rough.x, rough.y,
                   rough.z);
        for (std::size_t i = 0; i < uwloc_localization_loss_count(loc); ++i)
        {
            double before = 0, after = 0;
            uwloc_localization_loss(loc, i, &before, &after);
            fmt::print("iter {} loss_before={:.9e} loss_after={:.9e}\n", i + 1,
                       before, after);
        }
    }
    auto p = uwloc_localization_position(loc);
    fmt::print("x={:.3f} y={:.3f} z={:.3f}\n", p.x, p.y, p.z);
    fmt::print("iterations={} converged={}\n", uwloc_localization_iterations(loc),
               uwloc_localization_converged(loc) ? "yes" : "no");
    return exit_ok;
}

struct ExperimentArgs
{
    std::string scenario;
    std::string svp;
    std::string out_dir;
    std::optional<std::size_t> simplify_points;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    bool omit_timing = false;
};

int load_setup(const std::string& path, uwloc_experiment_setup& setup)
{
    if (path.empty())
    {
        setup = uwloc_experiment_setup_default();
        return exit_ok;
    }
    if (auto s = uwloc_experiment_setup_load(path.c_str(), &setup))
        return report(s);
    return exit_ok;
}

int run_experiment(const ExperimentArgs& a)
{
    uwloc_experiment_setup setup;
    if (int rc = load_setup(a.scenario, setup))
        return rc;
    if (a.simplify_points)
        setup.simplify_points = *a.simplify_points;
    if (a.seed)
        setup.scenario.rng_seed = *a.seed;

    Svp svp;
    if (auto s = uwloc_svp_load(a.svp.c_str(), svp.out()))
        return report(s);

    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec)
    {
        fmt::print(stderr, "error (io_error): cannot create {}: {}\n",
                   a.out_dir, ec.message());
        return exit_io;
    }

    Report rep;
    if (auto s = uwloc_experiment_run(&setup, svp, a.threads, rep.out()))
        return report(s);

    auto dir = std::filesystem::path(a.out_dir);
    auto targets = (dir / "targets.csv").string();
    auto summary = (dir / "summary.csv").string();
    if (auto s = uwloc_report_write_targets(rep, targets.c_str(), !a.omit_timing))
        return report(s);
    if (auto s = uwloc_report_write_summary(rep, summary.c_str()))
        return report(s);

    fmt::print("targets={} unlocalizable={}\n", uwloc_report_target_count(rep),
               uwloc_report_unlocalizable(rep));
    for (int m = UWLOC_METHOD_CONSTANT_SPEED; m <= UWLOC_METHOD_SIMPLIFIED_SVP; ++m)
    {
        auto method = static_cast<uwloc_method>(m);
        uwloc_method_summary sum;
        uwloc_position corr;
        uwloc_report_summary(rep, method, &sum);
        uwloc_report_correction(rep, method, &corr);
        fmt::print(
            "{:<15} n={} failed={} mean_3d={:.3f} std={:.3f} "
            "rmse_xyz=({:.3f},{:.3f},{:.3f}) corr_xyz=({:.3f},{:.3f},{:.3f})\n",
            uwloc_method_name(method), sum.localized, sum.failures,
            sum.mean_error, sum.std_error, sum.rmse_x, sum.rmse_y, sum.rmse_z,
            corr.x, corr.y, corr.z);
    }
    fmt::print("wrote {} and {}\n", targets, summary);
    return exit_ok;
}

struct BenchmarkArgs
{
    std::string svp;
    std::string scenario;
    std::optional<std::size_t> simplify_points;
    int repeats = 10;
    int targets = 20;
};

int run_benchmark(const BenchmarkArgs& a)
{
    uwloc_experiment_setup setup;
    if (int rc = load_setup(a.scenario, setup))
        return rc;
    if (a.simplify_points)
        setup.simplify_points = *a.simplify_points;
    Svp svp;
    if (auto s = uwloc_svp_load(a.svp.c_str(), svp.out()))
        return report(s);
    uwloc_benchmark_result r;
    if (auto s = uwloc_benchmark(&setup, svp, a.repeats, a.targets, &r))
        return report(s);
    fmt::print("localizations={} repeats={}\n", r.localizations, r.repeats);
    fmt::print("original   points={} mean_us={:.1f} layers_per_trace={:.3f} "
               "traces_per_fix={:.1f}\n",
               uwloc_svp_size(svp), r.mean_us_original,
               r.layers_per_trace_original, r.traces_per_localization_original);
    fmt::print("simplified points={} mean_us={:.1f} layers_per_trace={:.3f} "
               "traces_per_fix={:.1f}\n",
               setup.simplify_points, r.mean_us_simplified,
               r.layers_per_trace_simplified,
               r.traces_per_localization_simplified);
    fmt::print("speedup={:.3f}\n", r.mean_us_original / r.mean_us_simplified);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Underwater acoustic ray tracing and iterative localization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", uwloc_version());

    TraceArgs trace;
    auto* cmd_trace = app.add_subcommand("trace", "Trace a ray between two depths");
    cmd_trace->add_option("svp", trace.svp, "Profile CSV")->required();
    cmd_trace->add_option("--theta", trace.theta_deg, "Launch grazing angle [deg]")
        ->required();
    cmd_trace->add_option("--from", trace.z_from, "Source depth [m]")->required();
    cmd_trace->add_option("--to", trace.z_to, "Receiver depth [m]")->required();

    SolveArgs solve;
    auto* cmd_solve = app.add_subcommand(
        "solve", "Find the launch angle for a travel time or horizontal range");
    cmd_solve->add_option("svp", solve.svp, "Profile CSV")->required();
    cmd_solve->add_option("mode", solve.mode, "time or range")
        ->required()
        ->check(CLI::IsMember({"time", "range"}));
    cmd_solve->add_option("value", solve.target, "Travel time [s] or range [m]")
        ->required();
    cmd_solve->add_option("--from", solve.z_from, "Source depth [m]")->required();
    cmd_solve->add_option("--to", solve.z_to, "Receiver depth [m]")->required();
    cmd_solve->add_option("--tol", solve.tol,
                          "Tolerance [s or m]; defaults 1e-5 s / 0.1 m");

    SimplifyArgs simplify;
    auto* cmd_simplify = app.add_subcommand("simplify", "Reduce a profile");
    cmd_simplify->add_option("svp", simplify.svp, "Profile CSV")->required();
    cmd_simplify->add_option("out", simplify.out, "Output CSV")->required();
    auto* opt_points = cmd_simplify->add_option("--points", simplify.points,
                                                "Number of points to keep");
    auto* opt_rmse = cmd_simplify->add_option(
        "--rmse", simplify.rmse, "Stop once speed RMSE drops below [m/s]");
    opt_points->excludes(opt_rmse);

    LocalizeArgs localize;
    auto* cmd_localize
        = app.add_subcommand("localize", "Locate one target from measurements");
    cmd_localize->add_option("svp", localize.svp, "Profile CSV")->required();
    cmd_localize
        ->add_option("measurements", localize.measurements,
                     "CSV ref_x,ref_y,ref_z,one_way_time_s")
        ->required();
    cmd_localize->add_option("--depth-step", localize.config.initial_depth_step,
                             "Initial depth step [m]")->capture_default_str();
    cmd_localize->add_option("--depth-threshold",
                             localize.config.depth_step_threshold,
                             "Stop when the depth step falls below [m]")->capture_default_str();
    cmd_localize->add_option("--time-tol", localize.config.time_tolerance,
                             "Angle solver time tolerance [s]")->capture_default_str();
    cmd_localize->add_option("--range-tol", localize.config.range_tolerance,
                             "Angle solver range tolerance [m]")->capture_default_str();
    cmd_localize->add_option("--mean-speed", localize.config.mean_speed,
                             "Rough fix sound speed [m/s]")->capture_default_str();
    cmd_localize->add_option("--max-iterations", localize.config.max_iterations,
                             "Iteration cap")->capture_default_str();
    cmd_localize->add_flag("-v,--verbose", localize.verbose,
                           "Print the rough fix and per-iteration losses");

    ExperimentArgs experiment;
    auto* cmd_experiment
        = app.add_subcommand("experiment", "Run a Monte Carlo comparison");
    cmd_experiment->add_option("scenario", experiment.scenario, "Scenario file")
        ->required();
    cmd_experiment->add_option("svp", experiment.svp, "Profile CSV")->required();
    cmd_experiment->add_option("out_dir", experiment.out_dir, "Output directory")
        ->required();
    cmd_experiment->add_option("--simplify-points", experiment.simplify_points,
                               "Points kept in the simplified profile");
    cmd_experiment->add_option("--seed", experiment.seed, "Override RNG seed");
    cmd_experiment->add_option("--threads", experiment.threads,
                               "Worker threads, 0 = all cores")->capture_default_str();
    cmd_experiment->add_flag("--omit-timing", experiment.omit_timing,
                             "Write zero wall times so outputs are reproducible");

    BenchmarkArgs bench;
    auto* cmd_bench = app.add_subcommand(
        "benchmark", "Time localization with the full and simplified profile");
    cmd_bench->add_option("svp", bench.svp, "Profile CSV")->required();
    cmd_bench->add_option("--scenario", bench.scenario, "Scenario file");
    cmd_bench->add_option("--simplify-points", bench.simplify_points,
                          "Points kept in the simplified profile");
    cmd_bench->add_option("--repeats", bench.repeats, "Timed passes")->capture_default_str();
    cmd_bench->add_option("--targets", bench.targets, "Targets per pass")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_domain;
    }

    if (cmd_trace->parsed())
        return run_trace(trace);
    if (cmd_solve->parsed())
        return run_solve(solve);
    if (cmd_simplify->parsed())
    {
        if (!*opt_points && !*opt_rmse)
        {
            fmt::print(stderr, "error: one of --points or --rmse is required\n");
            return exit_domain;
        }
        return run_simplify(simplify);
    }
    if (cmd_localize->parsed())
        return run_localize(localize);
    if (cmd_experiment->parsed())
        return run_experiment(experiment);
    return run_benchmark(bench);
}
