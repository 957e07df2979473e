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

#include "uwloc/raytrace.hpp"

#include <cmath>

#include <fmt/format.h>

#include "uwloc/errors.hpp"

namespace uwloc {
namespace {

thread_local TraceCounters counters;

double source_speed(const SoundVelocityProfile& seg, SourceEnd source)
{
    return source == SourceEnd::shallow ? seg.points().front().speed
                                        : seg.points().back().speed;
}

// Visit layers in propagation order as (thickness, entry speed, exit speed).
template<class F>
void for_each_layer(const SoundVelocityProfile& seg, SourceEnd source, F&& f)
{
    const auto pts = seg.points();
    const std::size_t n = pts.size();
    if (source == SourceEnd::shallow)
    {
        for (std::size_t i = 1; i < n; ++i)
            f(pts[i].depth - pts[i - 1].depth, pts[i - 1].speed, pts[i].speed);
    }
    else
    {
        for (std::size_t i = n - 1; i > 0; --i)
            f(pts[i].depth - pts[i - 1].depth, pts[i].speed, pts[i - 1].speed);
    }
}

void check_angle(double theta0)
{
    if (!(theta0 > 0 && theta0 <= half_pi))
    {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("grazing angle {} rad outside (0, pi/2]", theta0));
    }
}

[[noreturn]] void throw_infeasible(const SoundVelocityProfile& seg,
                                   double theta0,
                                   SourceEnd source)
{
    double limit = min_feasible_angle(seg, source);
    throw Error(ErrorCode::infeasible_angle,
                fmt::format("launch angle {:.6f} deg turns before crossing "
                            "[{}, {}] m; minimum feasible angle is {:.6f} deg",
                            theta0 * 180 / std::numbers::pi,
                            seg.min_depth(),
                            seg.max_depth(),
                            limit * 180 / std::numbers::pi));
}

// Snell invariant of a ray launched at theta0 where the speed is s0.
struct RayInvariant
{
    double s0;
    double sin2;  //!< sin^2(theta0)
    double cos2;  //!< cos^2(theta0)
    double xi;    //!< cos(theta0) / s0, constant along the ray

    RayInvariant(double theta0, double source_speed) : s0(source_speed)
    {
        double c = theta0 == half_pi ? 0.0 : std::cos(theta0);
        double s = std::sin(theta0);
        sin2 = s * s;
        cos2 = c * c;
        xi = c / s0;
    }

    // sin^2 of the grazing angle where the speed is s; negative past a turn.
    // Expanded about the source speed.
    double tau(double s) const
    {
        return sin2 - cos2 * (s - s0) * (s + s0) / (s0 * s0);
    }
};

enum Want : unsigned
{
    want_time = 1,
    want_range = 2,
};

struct Sums
{
    double time = 0;
    double range = 0;
};

/*
 * Per layer with entry speed s_a, exit speed s_b, sines a = sqrt(tau_a),
 * b = sqrt(tau_b) and tau = 1 - (xi s)^2:
 *
 *   t = dd/ds * ln(s_b (1+a) / (s_a (1+b)))
 *   h = dd/ds * (a - b) / xi
 *
 * Writing a - b = xi^2 ds (s_a + s_b) / (a + b) removes the cancellation in
 * both sums; the log is split into two log1p terms of the same sign.
 */
template<unsigned W>
Sums evaluate(const SoundVelocityProfile& seg, double theta0, SourceEnd source)
{
    check_angle(theta0);
    const RayInvariant ray(theta0, source_speed(seg, source));
    const double xi = ray.xi;

    Sums sums;
    bool feasible = true;
    std::uint64_t terms = 0;
    for_each_layer(seg, source, [&](double dd, double sa, double sb) {
        ++terms;
        double tau_a = ray.tau(sa);
        double tau_b = ray.tau(sb);
        if (tau_a < 0 || tau_b < 0)
        {
            feasible = false;
            return;
        }
        double ds = sb - sa;
        if (std::fabs(ds) < isovelocity_epsilon)
        {
            double sbar = 0.5 * (sa + sb);
            double sin_bar = std::sqrt(std::fmax(ray.tau(sbar), 0.0));
            if (!(sin_bar > 0))
            {
                feasible = false;
                return;
            }
            if constexpr (W & want_time)
                sums.time += dd / (sbar * sin_bar);
            if constexpr (W & want_range)
                sums.range += dd * xi * sbar / sin_bar;
            return;
        }
        double a = std::sqrt(tau_a);
        double b = std::sqrt(tau_b);
        double ab = a + b;
        if constexpr (W & want_time)
        {
            double log_ratio = std::log1p(ds / sa)
                               + std::log1p(xi * xi * ds * (sa + sb) / (ab * (1 + b)));
            sums.time += std::fabs(dd / ds * log_ratio);
        }
        if constexpr (W & want_range)
            sums.range += std::fabs(dd * xi * (sa + sb) / ab);
    });
    if (!feasible)
        throw_infeasible(seg, theta0, source);

    ++counters.traces;
    counters.layer_terms += terms;
    return sums;
}

}  // namespace

//---------------------------------------------------------------------------//

double propagation_time(const SoundVelocityProfile& segment,
                        double theta0,
                        SourceEnd source)
{
    return evaluate<want_time>(segment, theta0, source).time;
}

double horizontal_range(const SoundVelocityProfile& segment,
                        double theta0,
                        SourceEnd source)
{
    return evaluate<want_range>(segment, theta0, source).range;
}

RayTraceResult trace(const SoundVelocityProfile& segment,
                     double theta0,
                     SourceEnd source)
{
    auto sums = evaluate<want_time | want_range>(segment, theta0, source);

    RayTraceResult result{sums.time, sums.range, {}};
    result.layer_angles.reserve(segment.size());
    result.layer_angles.push_back(theta0);
    const RayInvariant ray(theta0, source_speed(segment, source));
    for_each_layer(segment, source, [&](double, double, double sb) {
        result.layer_angles.push_back(
            std::atan2(std::sqrt(std::fmax(ray.tau(sb), 0.0)), ray.xi * sb));
    });
    return result;
}

double min_feasible_angle(const SoundVelocityProfile& segment, SourceEnd source)
{
    double ratio = source_speed(segment, source) / segment.max_speed();
    return ratio >= 1 ? 0.0 : std::acos(ratio);
}

AngleBracket feasible_bracket(const SoundVelocityProfile& segment,
                              SourceEnd source)
{
    return {min_feasible_angle(segment, source) + turning_margin, half_pi};
}

//---------------------------------------------------------------------------//

namespace {

// Bisection for a function decreasing in the launch angle.
template<class F>
double bisect_decreasing(F&& f,
                         AngleBracket bracket,
                         double target,
                         double tol,
                         const char* what)
{
    double lo = bracket.lower;
    double hi = bracket.upper;
    for (int iter = 0; iter < max_bisection_iterations; ++iter)
    {
        double mid = 0.5 * (lo + hi);
        double value = f(mid);
        if (std::fabs(value - target) <= tol)
            return mid;
        if (value > target)
            lo = mid;
        else
            hi = mid;
    }
    throw Error(ErrorCode::solver_failure,
                fmt::format("{} bisection did not reach tolerance {} within {} "
                            "iterations",
                            what,
                            tol,
                            max_bisection_iterations));
}

void check_tolerance(double tol)
{
    if (!(tol > 0) || !std::isfinite(tol))
        throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
}

}  // namespace

double solve_angle_for_time(const SoundVelocityProfile& segment,
                            double t_target,
                            double tol,
                            SourceEnd source)
{
    check_tolerance(tol);
    if (!std::isfinite(t_target))
        throw Error(ErrorCode::invalid_argument, "target time must be finite");

    auto bracket = feasible_bracket(segment, source);
    double t_fast = propagation_time(segment, bracket.upper, source);
    if (std::fabs(t_target - t_fast) <= tol)
        return bracket.upper;
    if (t_target < t_fast)
    {
        throw Error(ErrorCode::unreachable,
                    fmt::format("time {} s is shorter than the vertical-ray time "
                                "{} s",
                                t_target,
                                t_fast));
    }
    double t_slow = propagation_time(segment, bracket.lower, source);
    if (std::fabs(t_target - t_slow) <= tol)
        return bracket.lower;
    if (t_target > t_slow)
    {
        throw Error(ErrorCode::beyond_range,
                    fmt::format("time {} s exceeds the slowest direct ray {} s",
                                t_target,
                                t_slow));
    }
    return bisect_decreasing(
        [&](double theta) { return propagation_time(segment, theta, source); },
        bracket,
        t_target,
        tol,
        "travel-time");
}

double solve_angle_for_range(const SoundVelocityProfile& segment,
                             double h_target,
                             double tol,
                             SourceEnd source)
{
    check_tolerance(tol);
    if (!(h_target >= 0) || !std::isfinite(h_target))
    {
        throw Error(ErrorCode::invalid_argument,
                    "target range must be finite and non-negative");
    }
    if (h_target == 0)
        return half_pi;

    auto bracket = feasible_bracket(segment, source);
    if (h_target <= tol)
        return bracket.upper;
    double h_far = horizontal_range(segment, bracket.lower, source);
    if (std::fabs(h_target - h_far) <= tol)
        return bracket.lower;
    if (h_target > h_far)
    {
        throw Error(ErrorCode::beyond_range,
                    fmt::format("range {} m exceeds the farthest direct ray {} m",
                                h_target,
                                h_far));
    }
    return bisect_decreasing(
        [&](double theta) { return horizontal_range(segment, theta, source); },
        bracket,
        h_target,
        tol,
        "horizontal-range");
}

//---------------------------------------------------------------------------//

namespace {

template<class F>
void walk_slices(const SoundVelocityProfile& seg,
                 double theta0,
                 double step,
                 SourceEnd source,
                 F&& visit)
{
    check_angle(theta0);
    if (!(step > 0))
        throw Error(ErrorCode::invalid_argument, "oracle step must be positive");
    const RayInvariant ray(theta0, source_speed(seg, source));

    bool feasible = true;
    for_each_layer(seg, source, [&](double dd, double sa, double sb) {
        if (!feasible)
            return;
        auto slices = static_cast<long>(std::ceil(dd / step));
        double dz = dd / static_cast<double>(slices);
        for (long k = 0; k < slices; ++k)
        {
            double s_mid
                = sa + (sb - sa) * (static_cast<double>(k) + 0.5) / slices;
            double q = ray.xi * s_mid;
            double sin_theta = std::sqrt(std::fmax(ray.tau(s_mid), 0.0));
            if (!(sin_theta > 0))
            {
                feasible = false;
                return;
            }
            double dh = dz * q / sin_theta;
            double dt = std::sqrt(dh * dh + dz * dz) / s_mid;
            visit(dt, dh, dz);
        }
    });
    if (!feasible)
        throw_infeasible(seg, theta0, source);
}

}  // namespace

OracleResult oracle_trace(const SoundVelocityProfile& segment,
                          double theta0,
                          double step,
                          SourceEnd source)
{
    OracleResult result{0, 0};
    walk_slices(segment, theta0, step, source, [&](double dt, double dh, double) {
        result.travel_time += dt;
        result.horizontal_range += dh;
    });
    return result;
}

std::vector<PathPoint> oracle_path(const SoundVelocityProfile& segment,
                                   double theta0,
                                   double step,
                                   SourceEnd source)
{
    const double sign = source == SourceEnd::shallow ? 1.0 : -1.0;
    PathPoint cur{0,
                  source == SourceEnd::shallow ? segment.min_depth()
                                               : segment.max_depth()};
    std::vector<PathPoint> path{cur};
    walk_slices(segment, theta0, step, source, [&](double, double dh, double dz) {
        cur.x += dh;
        cur.depth += sign * dz;
        path.push_back(cur);
    });
    return path;
}

//---------------------------------------------------------------------------//

TraceCounters trace_counters() noexcept
{
    return counters;
}

void reset_trace_counters() noexcept
{
    counters = {};
}

}  // namespace uwloc
