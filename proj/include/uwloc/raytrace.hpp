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

//! \file uwloc/raytrace.hpp
//! Closed-form direct-ray kinematics through a piecewise-linear profile, the
//! micro-slice integration oracle, and bisection inverses.
//!
//! Angles are grazing angles in radians measured from the horizontal;
//! pi/2 is a vertical ray. A segment is traversed end to end from the
//! source end to the opposite end without turning.

#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "svp.hpp"

namespace uwloc {

//! Which end of a segment the ray is launched from.
enum class SourceEnd
{
    shallow,
    deep
};

inline constexpr double half_pi = std::numbers::pi / 2;

//! Speed difference below which a layer is treated as isovelocity [m/s].
inline constexpr double isovelocity_epsilon = 1e-6;

//! Solver lower bracket offset above the turning limit [rad].
inline constexpr double turning_margin = 1e-9;

inline constexpr int max_bisection_iterations = 200;

struct RayTraceResult
{
    double travel_time;       //!< [s]
    double horizontal_range;  //!< [m]
    //! Grazing angle at each boundary along the path, [0] = launch angle
    std::vector<double> layer_angles;
};

struct AngleBracket
{
    double lower;
    double upper;
};

double propagation_time(const SoundVelocityProfile& segment,
                        double theta0,
                        SourceEnd source = SourceEnd::shallow);

double horizontal_range(const SoundVelocityProfile& segment,
                        double theta0,
                        SourceEnd source = SourceEnd::shallow);

//! Travel time, range and the Snell chain of boundary angles.
RayTraceResult trace(const SoundVelocityProfile& segment,
                     double theta0,
                     SourceEnd source = SourceEnd::shallow);

//! arccos(s_source / s_max): launch angles at or below this turn back.
double min_feasible_angle(const SoundVelocityProfile& segment,
                          SourceEnd source = SourceEnd::shallow);

//! Angles the solvers search: (turning limit + margin, pi/2].
AngleBracket feasible_bracket(const SoundVelocityProfile& segment,
                              SourceEnd source = SourceEnd::shallow);

/*!
 * Launch angle whose travel time is within \c tol of \c t_target.
 *
 * Throws ErrorCode::unreachable when the target is shorter than the
 * vertical-ray time and ErrorCode::beyond_range when it is longer than the
 * slowest direct ray.
 */
double solve_angle_for_time(const SoundVelocityProfile& segment,
                            double t_target,
                            double tol,
                            SourceEnd source = SourceEnd::shallow);

//! Launch angle whose horizontal range is within \c tol of \c h_target.
double solve_angle_for_range(const SoundVelocityProfile& segment,
                             double h_target,
                             double tol,
                             SourceEnd source = SourceEnd::shallow);

//---------------------------------------------------------------------------//
// Micro-slice oracle
//---------------------------------------------------------------------------//

struct OracleResult
{
    double travel_time;
    double horizontal_range;
};

struct PathPoint
{
    double x;      //!< horizontal offset from the source [m]
    double depth;  //!< [m]
};

/*!
 * Straight-line slice integration of the same ray.
 *
 * Each layer is cut into equal slices no thicker than \c step; within a slice
 * the ray is straight at the Snell angle for the slice mid-speed. Converges to
 * the closed form as the step shrinks.
 */
OracleResult oracle_trace(const SoundVelocityProfile& segment,
                          double theta0,
                          double step,
                          SourceEnd source = SourceEnd::shallow);

//! Slice vertices of the oracle ray, starting at the source.
std::vector<PathPoint> oracle_path(const SoundVelocityProfile& segment,
                                   double theta0,
                                   double step,
                                   SourceEnd source = SourceEnd::shallow);

//---------------------------------------------------------------------------//
// Instrumentation
//---------------------------------------------------------------------------//

//! Per-thread tallies of closed-form evaluations.
struct TraceCounters
{
    std::uint64_t traces = 0;       //!< closed-form evaluations
    std::uint64_t layer_terms = 0;  //!< per-layer terms summed
};

TraceCounters trace_counters() noexcept;
void reset_trace_counters() noexcept;

}  // namespace uwloc
