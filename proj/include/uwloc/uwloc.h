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

/* C interface to the uwloc library. All functions returning uwloc_status
 * report UWLOC_OK on success; on failure the message of the most recent
 * error on the calling thread is available from uwloc_last_error(). */

#ifndef UWLOC_UWLOC_H
#define UWLOC_UWLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#    ifdef UWLOC_BUILDING_LIBRARY
#        define UWLOC_API __declspec(dllexport)
#    else
#        define UWLOC_API __declspec(dllimport)
#    endif
#else
#    define UWLOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uwloc_status
{
    UWLOC_OK = 0,
    UWLOC_INVALID_ARGUMENT,
    UWLOC_PARSE_ERROR,
    UWLOC_IO_ERROR,
    UWLOC_OUT_OF_RANGE,
    UWLOC_INFEASIBLE_ANGLE,
    UWLOC_UNREACHABLE,
    UWLOC_BEYOND_RANGE,
    UWLOC_SOLVER_FAILURE,
    UWLOC_DEGENERATE_GEOMETRY,
    UWLOC_INSUFFICIENT_DATA,
    UWLOC_INTERNAL_ERROR
} uwloc_status;

typedef struct uwloc_svp uwloc_svp;
typedef struct uwloc_measurements uwloc_measurements;
typedef struct uwloc_localization uwloc_localization;
typedef struct uwloc_report uwloc_report;

UWLOC_API const char* uwloc_version(void);
UWLOC_API const char* uwloc_status_name(uwloc_status status);
/* Message of the last failure on this thread; empty after success. */
UWLOC_API const char* uwloc_last_error(void);

/* ---- Sound velocity profiles ---- */

UWLOC_API uwloc_status uwloc_svp_load(const char* path, uwloc_svp** out);
UWLOC_API uwloc_status uwloc_svp_parse(const char* text, uwloc_svp** out);
UWLOC_API uwloc_status uwloc_svp_from_points(const double* depths,
                                             const double* speeds,
                                             size_t count,
                                             uwloc_svp** out);
UWLOC_API void uwloc_svp_free(uwloc_svp* svp);
UWLOC_API size_t uwloc_svp_size(const uwloc_svp* svp);
UWLOC_API uwloc_status uwloc_svp_point(const uwloc_svp* svp,
                                       size_t index,
                                       double* depth,
                                       double* speed);
UWLOC_API uwloc_status uwloc_svp_speed_at(const uwloc_svp* svp,
                                          double depth,
                                          double* speed);
UWLOC_API uwloc_status uwloc_svp_save(const uwloc_svp* svp, const char* path);
UWLOC_API uwloc_status uwloc_svp_simplify_points(const uwloc_svp* svp,
                                                 size_t points,
                                                 uwloc_svp** out);
UWLOC_API uwloc_status uwloc_svp_simplify_rmse(const uwloc_svp* svp,
                                               double threshold,
                                               uwloc_svp** out);
UWLOC_API uwloc_status uwloc_svp_rmse(const uwloc_svp* original,
                                      const uwloc_svp* simplified,
                                      double* rmse);

/* ---- Ray tracing ----
 * A ray is launched at z_from toward z_to with grazing angle theta0 in
 * radians, (0, pi/2]. */

typedef struct uwloc_trace_result
{
    double travel_time;      /* [s] */
    double horizontal_range; /* [m] */
} uwloc_trace_result;

UWLOC_API uwloc_status uwloc_trace(const uwloc_svp* svp,
                                   double z_from,
                                   double z_to,
                                   double theta0,
                                   uwloc_trace_result* out);
UWLOC_API uwloc_status uwloc_min_feasible_angle(const uwloc_svp* svp,
                                                double z_from,
                                                double z_to,
                                                double* theta);
UWLOC_API uwloc_status uwloc_solve_time(const uwloc_svp* svp,
                                        double z_from,
                                        double z_to,
                                        double travel_time,
                                        double tol,
                                        double* theta);
UWLOC_API uwloc_status uwloc_solve_range(const uwloc_svp* svp,
                                         double z_from,
                                         double z_to,
                                         double horizontal_range,
                                         double tol,
                                         double* theta);

/* ---- Localization ---- */

typedef struct uwloc_position
{
    double x;
    double y;
    double z; /* depth, positive down */
} uwloc_position;

typedef struct uwloc_irtul_config
{
    double initial_depth_step;   /* [m] */
    double depth_step_threshold; /* [m] */
    double time_tolerance;       /* [s] */
    double range_tolerance;      /* [m] */
    double mean_speed;           /* [m/s] */
    int max_iterations;
} uwloc_irtul_config;

UWLOC_API uwloc_irtul_config uwloc_irtul_config_default(void);

UWLOC_API uwloc_status uwloc_measurements_load(const char* path,
                                               uwloc_measurements** out);
UWLOC_API uwloc_status uwloc_measurements_parse(const char* text,
                                                uwloc_measurements** out);
UWLOC_API void uwloc_measurements_free(uwloc_measurements* ms);
UWLOC_API size_t uwloc_measurements_count(const uwloc_measurements* ms);
UWLOC_API uwloc_status uwloc_measurements_get(const uwloc_measurements* ms,
                                              size_t index,
                                              uwloc_position* reference,
                                              double* one_way_time);

UWLOC_API uwloc_status uwloc_rough_fix(const uwloc_measurements* ms,
                                       double mean_speed,
                                       uwloc_position* out);
UWLOC_API uwloc_status uwloc_localize(const uwloc_svp* svp,
                                      const uwloc_measurements* ms,
                                      const uwloc_irtul_config* config,
                                      uwloc_localization** out);
UWLOC_API void uwloc_localization_free(uwloc_localization* loc);
UWLOC_API uwloc_position
uwloc_localization_position(const uwloc_localization* loc);
UWLOC_API uwloc_position
uwloc_localization_rough_position(const uwloc_localization* loc);
UWLOC_API int uwloc_localization_iterations(const uwloc_localization* loc);
UWLOC_API int uwloc_localization_converged(const uwloc_localization* loc);
UWLOC_API size_t uwloc_localization_loss_count(const uwloc_localization* loc);
UWLOC_API uwloc_status uwloc_localization_loss(const uwloc_localization* loc,
                                               size_t index,
                                               double* before,
                                               double* after);

/* ---- Simulation ---- */

typedef struct uwloc_scenario_config
{
    double area_x;
    double area_y;
    double depth;
    int buoy_count;
    int anchor_count;
    int target_count;
    double comm_range;
    double time_noise_sigma;
    double time_noise_mean;
    uint64_t rng_seed;
} uwloc_scenario_config;

typedef struct uwloc_experiment_setup
{
    uwloc_scenario_config scenario;
    uwloc_irtul_config irtul;
    size_t simplify_points;
} uwloc_experiment_setup;

typedef enum uwloc_method
{
    UWLOC_METHOD_CONSTANT_SPEED = 0,
    UWLOC_METHOD_ORIGINAL_SVP,
    UWLOC_METHOD_SIMPLIFIED_SVP
} uwloc_method;

typedef struct uwloc_method_summary
{
    size_t localized;
    size_t failures;
    double mean_error;
    double std_error;
    double rmse_x;
    double rmse_y;
    double rmse_z;
    double rmse_3d;
    double mean_wall_us;
    double mean_iterations;
} uwloc_method_summary;

typedef struct uwloc_benchmark_result
{
    size_t localizations;
    int repeats;
    double mean_us_original;
    double mean_us_simplified;
    double layers_per_trace_original;
    double layers_per_trace_simplified;
    double traces_per_localization_original;
    double traces_per_localization_simplified;
} uwloc_benchmark_result;

UWLOC_API uwloc_experiment_setup uwloc_experiment_setup_default(void);
UWLOC_API uwloc_status uwloc_experiment_setup_load(const char* path,
                                                   uwloc_experiment_setup* out);
UWLOC_API const char* uwloc_method_name(uwloc_method method);

/* threads == 0 uses every hardware thread. */
UWLOC_API uwloc_status uwloc_experiment_run(const uwloc_experiment_setup* setup,
                                            const uwloc_svp* svp,
                                            unsigned threads,
                                            uwloc_report** out);
UWLOC_API void uwloc_report_free(uwloc_report* report);
UWLOC_API uwloc_status uwloc_report_summary(const uwloc_report* report,
                                            uwloc_method method,
                                            uwloc_method_summary* out);
UWLOC_API uwloc_status uwloc_report_correction(const uwloc_report* report,
                                               uwloc_method method,
                                               uwloc_position* out);
UWLOC_API size_t uwloc_report_target_count(const uwloc_report* report);
UWLOC_API size_t uwloc_report_unlocalizable(const uwloc_report* report);
UWLOC_API uwloc_status uwloc_report_write_targets(const uwloc_report* report,
                                                  const char* path,
                                                  int include_timing);
UWLOC_API uwloc_status uwloc_report_write_summary(const uwloc_report* report,
                                                  const char* path);

UWLOC_API uwloc_status uwloc_benchmark(const uwloc_experiment_setup* setup,
                                       const uwloc_svp* svp,
                                       int repeats,
                                       int targets,
                                       uwloc_benchmark_result* out);

#ifdef __cplusplus
}
#endif

#endif /* UWLOC_UWLOC_H */
