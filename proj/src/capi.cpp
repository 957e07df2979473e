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

#include "uwloc/uwloc.h"

#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uwloc/localize.hpp"
#include "uwloc/raytrace.hpp"
#include "uwloc/sim.hpp"
#include "uwloc/svp.hpp"

struct uwloc_svp
{
    uwloc::SoundVelocityProfile profile;
};

struct uwloc_measurements
{
    std::vector<uwloc::Measurement> items;
};

struct uwloc_localization
{
    uwloc::LocalizationResult result;
};

struct uwloc_report
{
    uwloc::ExperimentReport report;
};

namespace {

thread_local std::string last_error;

uwloc_status to_status(uwloc::ErrorCode code)
{
    using uwloc::ErrorCode;
    switch (code)
    {
        case ErrorCode::invalid_argument: return UWLOC_INVALID_ARGUMENT;
        case ErrorCode::parse_error: return UWLOC_PARSE_ERROR;
        case ErrorCode::io_error: return UWLOC_IO_ERROR;
        case ErrorCode::out_of_range: return UWLOC_OUT_OF_RANGE;
        case ErrorCode::infeasible_angle: return UWLOC_INFEASIBLE_ANGLE;
        case ErrorCode::unreachable: return UWLOC_UNREACHABLE;
        case ErrorCode::beyond_range: return UWLOC_BEYOND_RANGE;
        case ErrorCode::solver_failure: return UWLOC_SOLVER_FAILURE;
        case ErrorCode::degenerate_geometry: return UWLOC_DEGENERATE_GEOMETRY;
        case ErrorCode::insufficient_data: return UWLOC_INSUFFICIENT_DATA;
    }
    return UWLOC_INTERNAL_ERROR;
}

uwloc_status fail(uwloc_status status, std::string msg)
{
    last_error = std::move(msg);
    return status;
}

// Run f, translating exceptions to status codes.
template<class F>
uwloc_status guarded(F&& f)
{
    try
    {
        f();
        last_error.clear();
        return UWLOC_OK;
    }
    catch (const uwloc::Error& e)
    {
        return fail(to_status(e.code()), e.what());
    }
    catch (const std::bad_alloc&)
    {
        return fail(UWLOC_INTERNAL_ERROR, "out of memory");
    }
    catch (const std::exception& e)
    {
        return fail(UWLOC_INTERNAL_ERROR, e.what());
    }
    catch (...)
    {
        return fail(UWLOC_INTERNAL_ERROR, "unknown error");
    }
}

#define UWLOC_REQUIRE(cond)                                         \
    do                                                              \
    {                                                               \
        if (!(cond))                                                \
            return fail(UWLOC_INVALID_ARGUMENT, "null argument: " #cond); \
    } while (0)

uwloc_position to_c(const uwloc::Position& p)
{
    return {p.x, p.y, p.z};
}

uwloc::IrtulConfig from_c(const uwloc_irtul_config& c)
{
    uwloc::IrtulConfig r;
    r.initial_depth_step = c.initial_depth_step;
    r.depth_step_threshold = c.depth_step_threshold;
    r.time_tolerance = c.time_tolerance;
    r.range_tolerance = c.range_tolerance;
    r.mean_speed = c.mean_speed;
    r.max_iterations = c.max_iterations;
    return r;
}

uwloc_irtul_config to_c(const uwloc::IrtulConfig& c)
{
    return {c.initial_depth_step,
            c.depth_step_threshold,
            c.time_tolerance,
            c.range_tolerance,
            c.mean_speed,
            c.max_iterations};
}

uwloc::ScenarioConfig from_c(const uwloc_scenario_config& c)
{
    uwloc::ScenarioConfig r;
    r.area_x = c.area_x;
    r.area_y = c.area_y;
    r.depth = c.depth;
    r.buoy_count = c.buoy_count;
    r.anchor_count = c.anchor_count;
    r.target_count = c.target_count;
    r.comm_range = c.comm_range;
    r.time_noise_sigma = c.time_noise_sigma;
    r.time_noise_mean = c.time_noise_mean;
    r.rng_seed = c.rng_seed;
    return r;
}

uwloc_scenario_config to_c(const uwloc::ScenarioConfig& c)
{
    return {c.area_x,
            c.area_y,
            c.depth,
            c.buoy_count,
            c.anchor_count,
            c.target_count,
            c.comm_range,
            c.time_noise_sigma,
            c.time_noise_mean,
            c.rng_seed};
}

uwloc_experiment_setup to_c(const uwloc::ScenarioFile& f)
{
    return {to_c(f.scenario), to_c(f.irtul), f.simplify_points};
}

bool valid_method(uwloc_method m)
{
    return m >= UWLOC_METHOD_CONSTANT_SPEED && m <= UWLOC_METHOD_SIMPLIFIED_SVP;
}

uwloc::SourceEnd source_end(double z_from, double z_to)
{
    return z_from <= z_to ? uwloc::SourceEnd::shallow : uwloc::SourceEnd::deep;
}

void open_for_write(std::ofstream& os, const char* path)
{
    os.open(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw uwloc::Error(uwloc::ErrorCode::io_error,
                           std::string("cannot open ") + path + " for writing");
}

void finish_write(std::ofstream& os, const char* path)
{
    os.flush();
    if (!os)
        throw uwloc::Error(uwloc::ErrorCode::io_error,
                           std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* uwloc_version(void)
{
    return "0.1.0";
}

const char* uwloc_status_name(uwloc_status status)
{
    switch (status)
    {
        case UWLOC_OK: return "ok";
        case UWLOC_INVALID_ARGUMENT: return "invalid_argument";
        case UWLOC_PARSE_ERROR: return "parse_error";
        case UWLOC_IO_ERROR: return "io_error";
        case UWLOC_OUT_OF_RANGE: return "out_of_range";
        case UWLOC_INFEASIBLE_ANGLE: return "infeasible_angle";
        case UWLOC_UNREACHABLE: return "unreachable";
        case UWLOC_BEYOND_RANGE: return "beyond_range";
        case UWLOC_SOLVER_FAILURE: return "solver_failure";
        case UWLOC_DEGENERATE_GEOMETRY: return "degenerate_geometry";
        case UWLOC_INSUFFICIENT_DATA: return "insufficient_data";
        case UWLOC_INTERNAL_ERROR: return "internal_error";
    }
    return "unknown";
}

const char* uwloc_last_error(void)
{
    return last_error.c_str();
}

//---------------------------------------------------------------------------//
// Profiles
//---------------------------------------------------------------------------//

uwloc_status uwloc_svp_load(const char* path, uwloc_svp** out)
{
    UWLOC_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new uwloc_svp{uwloc::load_profile(path)}; });
}

uwloc_status uwloc_svp_parse(const char* text, uwloc_svp** out)
{
    UWLOC_REQUIRE(text && out);
    *out = nullptr;
    return guarded([&] { *out = new uwloc_svp{uwloc::parse_profile(text)}; });
}

uwloc_status uwloc_svp_from_points(const double* depths,
                                   const double* speeds,
                                   size_t count,
                                   uwloc_svp** out)
{
    UWLOC_REQUIRE(out);
    UWLOC_REQUIRE(count == 0 || (depths && speeds));
    *out = nullptr;
    return guarded([&] {
        std::vector<uwloc::SvpPoint> pts(count);
        for (size_t i = 0; i < count; ++i)
            pts[i] = {depths[i], speeds[i]};
        *out = new uwloc_svp{uwloc::SoundVelocityProfile(std::move(pts))};
    });
}

void uwloc_svp_free(uwloc_svp* svp)
{
    delete svp;
}

size_t uwloc_svp_size(const uwloc_svp* svp)
{
    return svp ? svp->profile.size() : 0;
}

uwloc_status uwloc_svp_point(const uwloc_svp* svp,
                             size_t index,
                             double* depth,
                             double* speed)
{
    UWLOC_REQUIRE(svp && depth && speed);
    if (index >= svp->profile.size())
        return fail(UWLOC_OUT_OF_RANGE, "point index out of range");
    const auto& p = svp->profile.points()[index];
    *depth = p.depth;
    *speed = p.speed;
    last_error.clear();
    return UWLOC_OK;
}

uwloc_status uwloc_svp_speed_at(const uwloc_svp* svp, double depth, double* speed)
{
    UWLOC_REQUIRE(svp && speed);
    return guarded([&] { *speed = svp->profile.speed_at(depth); });
}

uwloc_status uwloc_svp_save(const uwloc_svp* svp, const char* path)
{
    UWLOC_REQUIRE(svp && path);
    return guarded([&] { uwloc::save_profile(path, svp->profile); });
}

uwloc_status uwloc_svp_simplify_points(const uwloc_svp* svp,
                                       size_t points,
                                       uwloc_svp** out)
{
    UWLOC_REQUIRE(svp && out);
    *out = nullptr;
    return guarded([&] {
        *out = new uwloc_svp{
            uwloc::simplify_dm_eicps(svp->profile, uwloc::PointCount{points})};
    });
}

uwloc_status uwloc_svp_simplify_rmse(const uwloc_svp* svp,
                                     double threshold,
                                     uwloc_svp** out)
{
    UWLOC_REQUIRE(svp && out);
    *out = nullptr;
    return guarded([&] {
        *out = new uwloc_svp{uwloc::simplify_dm_eicps(
            svp->profile, uwloc::RmseThreshold{threshold})};
    });
}

uwloc_status uwloc_svp_rmse(const uwloc_svp* original,
                            const uwloc_svp* simplified,
                            double* rmse)
{
    UWLOC_REQUIRE(original && simplified && rmse);
    return guarded([&] {
        *rmse = uwloc::profile_rmse(original->profile, simplified->profile);
    });
}

//---------------------------------------------------------------------------//
// Ray tracing
//---------------------------------------------------------------------------//

uwloc_status uwloc_trace(const uwloc_svp* svp,
                         double z_from,
                         double z_to,
                         double theta0,
                         uwloc_trace_result* out)
{
    UWLOC_REQUIRE(svp && out);
    return guarded([&] {
        auto seg = svp->profile.segment(z_from, z_to);
        auto r = uwloc::trace(seg, theta0, source_end(z_from, z_to));
        *out = {r.travel_time, r.horizontal_range};
    });
}

uwloc_status uwloc_min_feasible_angle(const uwloc_svp* svp,
                                      double z_from,
                                      double z_to,
                                      double* theta)
{
    UWLOC_REQUIRE(svp && theta);
    return guarded([&] {
        auto seg = svp->profile.segment(z_from, z_to);
        *theta = uwloc::min_feasible_angle(seg, source_end(z_from, z_to));
    });
}

uwloc_status uwloc_solve_time(const uwloc_svp* svp,
                              double z_from,
                              double z_to,
                              double travel_time,
                              double tol,
                              double* theta)
{
    UWLOC_REQUIRE(svp && theta);
    return guarded([&] {
        auto seg = svp->profile.segment(z_from, z_to);
        *theta = uwloc::solve_angle_for_time(
            seg, travel_time, tol, source_end(z_from, z_to));
    });
}

uwloc_status uwloc_solve_range(const uwloc_svp* svp,
                               double z_from,
                               double z_to,
                               double horizontal_range,
                               double tol,
                               double* theta)
{
    UWLOC_REQUIRE(svp && theta);
    return guarded([&] {
        auto seg = svp->profile.segment(z_from, z_to);
        *theta = uwloc::solve_angle_for_range(
            seg, horizontal_range, tol, source_end(z_from, z_to));
    });
}

//---------------------------------------------------------------------------//
// Localization
//---------------------------------------------------------------------------//

uwloc_irtul_config uwloc_irtul_config_default(void)
{
    return to_c(uwloc::IrtulConfig{});
}

uwloc_status uwloc_measurements_load(const char* path, uwloc_measurements** out)
{
    UWLOC_REQUIRE(path && out);
    *out = nullptr;
    return guarded(
        [&] { *out = new uwloc_measurements{uwloc::load_measurements(path)}; });
}

uwloc_status uwloc_measurements_parse(const char* text, uwloc_measurements** out)
{
    UWLOC_REQUIRE(text && out);
    *out = nullptr;
    return guarded([&] {
        std::istringstream is{std::string(text)};
        *out = new uwloc_measurements{uwloc::parse_measurements(is)};
    });
}

void uwloc_measurements_free(uwloc_measurements* ms)
{
    delete ms;
}

size_t uwloc_measurements_count(const uwloc_measurements* ms)
{
    return ms ? ms->items.size() : 0;
}

uwloc_status uwloc_measurements_get(const uwloc_measurements* ms,
                                    size_t index,
                                    uwloc_position* reference,
                                    double* one_way_time)
{
    UWLOC_REQUIRE(ms && reference && one_way_time);
    if (index >= ms->items.size())
        return fail(UWLOC_OUT_OF_RANGE, "measurement index out of range");
    const auto& m = ms->items[index];
    *reference = to_c(m.reference_position);
    *one_way_time = m.one_way_time;
    last_error.clear();
    return UWLOC_OK;
}

uwloc_status uwloc_rough_fix(const uwloc_measurements* ms,
                             double mean_speed,
                             uwloc_position* out)
{
    UWLOC_REQUIRE(ms && out);
    return guarded(
        [&] { *out = to_c(uwloc::rough_fix(ms->items, mean_speed)); });
}

uwloc_status uwloc_localize(const uwloc_svp* svp,
                            const uwloc_measurements* ms,
                            const uwloc_irtul_config* config,
                            uwloc_localization** out)
{
    UWLOC_REQUIRE(svp && ms && out);
    *out = nullptr;
    return guarded([&] {
        auto cfg = config ? from_c(*config) : uwloc::IrtulConfig{};
        *out = new uwloc_localization{
            uwloc::irtul_localize(svp->profile, ms->items, cfg)};
    });
}

void uwloc_localization_free(uwloc_localization* loc)
{
    delete loc;
}

uwloc_position uwloc_localization_position(const uwloc_localization* loc)
{
    return loc ? to_c(loc->result.position) : uwloc_position{0, 0, 0};
}

uwloc_position uwloc_localization_rough_position(const uwloc_localization* loc)
{
    return loc ? to_c(loc->result.rough_position) : uwloc_position{0, 0, 0};
}

int uwloc_localization_iterations(const uwloc_localization* loc)
{
    return loc ? loc->result.iterations : 0;
}

int uwloc_localization_converged(const uwloc_localization* loc)
{
    return loc && loc->result.converged ? 1 : 0;
}

size_t uwloc_localization_loss_count(const uwloc_localization* loc)
{
    return loc ? loc->result.loss_history.size() : 0;
}

uwloc_status uwloc_localization_loss(const uwloc_localization* loc,
                                     size_t index,
                                     double* before,
                                     double* after)
{
    UWLOC_REQUIRE(loc && before && after);
    if (index >= loc->result.loss_history.size())
        return fail(UWLOC_OUT_OF_RANGE, "iteration index out of range");
    *before = loc->result.loss_history[index].before;
    *after = loc->result.loss_history[index].after;
    last_error.clear();
    return UWLOC_OK;
}

//---------------------------------------------------------------------------//
// Simulation
//---------------------------------------------------------------------------//

uwloc_experiment_setup uwloc_experiment_setup_default(void)
{
    return to_c(uwloc::ScenarioFile{});
}

uwloc_status uwloc_experiment_setup_load(const char* path,
                                         uwloc_experiment_setup* out)
{
    UWLOC_REQUIRE(path && out);
    return guarded([&] { *out = to_c(uwloc::load_scenario_file(path)); });
}

const char* uwloc_method_name(uwloc_method method)
{
    if (!valid_method(method))
        return "unknown";
    return uwloc::to_string(static_cast<uwloc::Method>(method)).data();
}

uwloc_status uwloc_experiment_run(const uwloc_experiment_setup* setup,
                                  const uwloc_svp* svp,
                                  unsigned threads,
                                  uwloc_report** out)
{
    UWLOC_REQUIRE(setup && svp && out);
    *out = nullptr;
    return guarded([&] {
        auto irtul = from_c(setup->irtul);
        irtul.validate();
        auto scenario = uwloc::generate_scenario(from_c(setup->scenario));
        auto simplified = uwloc::simplify_dm_eicps(
            svp->profile, uwloc::PointCount{setup->simplify_points});
        uwloc::ExperimentOptions opts;
        opts.threads = threads;
        *out = new uwloc_report{uwloc::run_experiment(
            scenario, svp->profile, simplified, irtul, opts)};
    });
}

void uwloc_report_free(uwloc_report* report)
{
    delete report;
}

uwloc_status uwloc_report_summary(const uwloc_report* report,
                                  uwloc_method method,
                                  uwloc_method_summary* out)
{
    UWLOC_REQUIRE(report && out);
    if (!valid_method(method))
        return fail(UWLOC_INVALID_ARGUMENT, "unknown method");
    const auto& s = report->report.summary(static_cast<uwloc::Method>(method));
    *out = {s.localized,
            s.failures,
            s.mean_error,
            s.std_error,
            s.rmse_x,
            s.rmse_y,
            s.rmse_z,
            s.rmse_3d,
            s.mean_wall_us,
            s.mean_iterations};
    last_error.clear();
    return UWLOC_OK;
}

uwloc_status uwloc_report_correction(const uwloc_report* report,
                                     uwloc_method method,
                                     uwloc_position* out)
{
    UWLOC_REQUIRE(report && out);
    if (!valid_method(method))
        return fail(UWLOC_INVALID_ARGUMENT, "unknown method");
    const auto& c
        = report->report.correction(static_cast<uwloc::Method>(method));
    *out = {c.x, c.y, c.z};
    last_error.clear();
    return UWLOC_OK;
}

size_t uwloc_report_target_count(const uwloc_report* report)
{
    return report ? report->report.targets.size() : 0;
}

size_t uwloc_report_unlocalizable(const uwloc_report* report)
{
    return report ? report->report.unlocalizable : 0;
}

uwloc_status uwloc_report_write_targets(const uwloc_report* report,
                                        const char* path,
                                        int include_timing)
{
    UWLOC_REQUIRE(report && path);
    return guarded([&] {
        std::ofstream os;
        open_for_write(os, path);
        uwloc::write_target_csv(os, report->report, include_timing != 0);
        finish_write(os, path);
    });
}

uwloc_status uwloc_report_write_summary(const uwloc_report* report,
                                        const char* path)
{
    UWLOC_REQUIRE(report && path);
    return guarded([&] {
        std::ofstream os;
        open_for_write(os, path);
        uwloc::write_summary_csv(os, report->report);
        finish_write(os, path);
    });
}

uwloc_status uwloc_benchmark(const uwloc_experiment_setup* setup,
                             const uwloc_svp* svp,
                             int repeats,
                             int targets,
                             uwloc_benchmark_result* out)
{
    UWLOC_REQUIRE(setup && svp && out);
    return guarded([&] {
        auto irtul = from_c(setup->irtul);
        irtul.validate();
        auto scenario = uwloc::generate_scenario(from_c(setup->scenario));
        auto simplified = uwloc::simplify_dm_eicps(
            svp->profile, uwloc::PointCount{setup->simplify_points});
        auto r = uwloc::run_benchmark(
            scenario, svp->profile, simplified, irtul, repeats, targets);
        *out = {r.localizations,
                r.repeats,
                r.mean_us_original,
                r.mean_us_simplified,
                r.layers_per_trace_original,
                r.layers_per_trace_simplified,
                r.traces_per_localization_original,
                r.traces_per_localization_simplified};
    });
}

}  // extern "C"
