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
#include <numbers>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "uwloc/raytrace.hpp"

using namespace uwloc;
using uwloc::testing::code_of;
using uwloc::testing::rel_err;
using std::numbers::pi;

namespace {

SoundVelocityProfile make(std::vector<SvpPoint> pts)
{
    return SoundVelocityProfile(std::move(pts));
}

const auto iso = make({{0, 1500}, {1000, 1500}});
const auto down = make({{0, 1500}, {1000, 1480}});
const auto up = make({{0, 1480}, {1000, 1500}});

// Textbook log-tangent form, shallow source, gradient layers only.
template<class T>
OracleResult log_tangent(const SoundVelocityProfile& p, T theta0)
{
    auto pts = p.points();
    const T quarter = std::numbers::pi_v<T> / 4;
    T s0 = pts[0].speed, c0 = std::cos(theta0);
    auto angle = [&](T s) { return std::acos(s / s0 * c0); };
    T t = 0, hsum = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        T g = (T(pts[i].speed) - pts[i - 1].speed)
              / (T(pts[i].depth) - pts[i - 1].depth);
        T a = i == 1 ? theta0 : angle(pts[i - 1].speed);
        T b = angle(pts[i].speed);
        t += std::fabs(
            std::log(std::tan(b / 2 + quarter) / std::tan(a / 2 + quarter)) / g);
        hsum += std::fabs((std::sin(a) - std::sin(b)) / g);
    }
    return {double(t), double(s0 / c0 * hsum)};
}

// The same sums rewritten with tau_i = 1 - (s_i/s_0)^2 cos^2(theta0).
template<class T>
OracleResult tau_form(const SoundVelocityProfile& p, T theta0)
{
    auto pts = p.points();
    T s0 = pts[0].speed, c0 = std::cos(theta0);
    auto tau = [&](T s) { return 1 - (s / s0) * (s / s0) * c0 * c0; };
    T t = 0, hsum = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        T dd = T(pts[i].depth) - pts[i - 1].depth;
        T ds = T(pts[i].speed) - pts[i - 1].speed;
        T ra = std::sqrt(tau(pts[i - 1].speed));
        T rb = std::sqrt(tau(pts[i].speed));
        t += std::fabs(
            dd / ds * std::log(T(pts[i - 1].speed) / pts[i].speed * (1 + rb) / (1 + ra)));
        hsum += std::fabs(dd / ds * (ra - rb));
    }
    return {double(t), double(s0 / c0 * hsum)};
}

}  // namespace

TEST_CASE("straight rays")
{
    double t = propagation_time(iso, pi / 4);
    double h = horizontal_range(iso, pi / 4);
    CHECK(t == doctest::Approx(1000 * std::sqrt(2.0) / 1500).epsilon(1e-15));
    CHECK(h == doctest::Approx(1000).epsilon(1e-15));

    CHECK(horizontal_range(iso, half_pi) == 0);
    CHECK(horizontal_range(down, half_pi) == 0);
    CHECK(propagation_time(iso, half_pi) == doctest::Approx(1000.0 / 1500));

    auto r = trace(iso, 0.3);
    for (double a : r.layer_angles)
        CHECK(a == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("negative gradient bends the ray down")
{
    auto r = trace(down, pi / 4);
    REQUIRE(r.layer_angles.size() == 2);
    double expected = std::acos(1480.0 / 1500 * std::cos(pi / 4));
    CHECK(r.layer_angles[1] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(r.layer_angles[1] == doctest::Approx(0.798644157).epsilon(1e-9));
    CHECK(r.layer_angles[1] > r.layer_angles[0]);
    // steeper ray covers less ground than the straight one
    CHECK(r.horizontal_range < 1000);
    CHECK(r.horizontal_range == doctest::Approx(986.840966051).epsilon(1e-11));

    auto o = oracle_trace(down, pi / 4, 0.01);
    CHECK(rel_err(r.travel_time, o.travel_time) < 1e-6);
    CHECK(rel_err(r.horizontal_range, o.horizontal_range) < 1e-6);

    auto rup = trace(up, pi / 4);
    CHECK(rup.layer_angles[1] < rup.layer_angles[0]);
}

TEST_CASE("oracle agreement at 60 degrees")
{
    auto r = trace(down, pi / 3);
    auto o = oracle_trace(down, pi / 3, 0.01);
    CHECK(rel_err(r.travel_time, o.travel_time) < 1e-6);
    CHECK(rel_err(r.horizontal_range, o.horizontal_range) < 1e-6);
    CHECK(r.travel_time == doctest::Approx(0.773267654344).epsilon(1e-11));
    CHECK(r.horizontal_range == doctest::Approx(572.240874735).epsilon(1e-11));
}

TEST_CASE("oracle on isovelocity is the straight ray")
{
    for (double step : {0.37, 1.0, 10.0})
    {
        auto o = oracle_trace(iso, pi / 4, step);
        CHECK(o.travel_time == doctest::Approx(1000 * std::sqrt(2.0) / 1500));
        CHECK(o.horizontal_range == doctest::Approx(1000));
    }
}

TEST_CASE("oracle converges as the step shrinks")
{
    auto p = make({{0, 1520}, {500, 1480}, {1200, 1510}});
    double theta = 0.6;
    auto r = trace(p, theta);
    double prev_t = INFINITY, prev_h = INFINITY;
    for (double step : {10.0, 5.0, 2.5, 1.25})
    {
        auto o = oracle_trace(p, theta, step);
        double et = std::fabs(o.travel_time - r.travel_time);
        double eh = std::fabs(o.horizontal_range - r.horizontal_range);
        CHECK(et < prev_t);
        CHECK(eh < prev_h);
        prev_t = et;
        prev_h = eh;
    }
}

TEST_CASE("turning limit")
{
    CHECK(min_feasible_angle(iso) == 0);
    CHECK(min_feasible_angle(down) == 0);
    double tmin = min_feasible_angle(up);
    CHECK(tmin == doctest::Approx(std::acos(1480.0 / 1500)).epsilon(1e-15));
    CHECK(tmin == doctest::Approx(0.163481306).epsilon(1e-9));

    CHECK_NOTHROW(trace(up, tmin + 1e-9));
    CHECK(code_of([&] { trace(up, tmin - 1e-9); }) == ErrorCode::infeasible_angle);

    // a deep source in the downward-decreasing profile sees the same limit
    CHECK(min_feasible_angle(down, SourceEnd::deep) == doctest::Approx(tmin));
    CHECK(min_feasible_angle(up, SourceEnd::deep) == 0);

    auto b = feasible_bracket(up);
    CHECK(b.lower == doctest::Approx(tmin + turning_margin).epsilon(1e-15));
    CHECK(b.upper == half_pi);
}

TEST_CASE("invalid launch angles")
{
    CHECK(code_of([] { trace(iso, 0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { trace(iso, -0.1); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { trace(iso, half_pi + 1e-6); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { trace(iso, NAN); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { oracle_trace(iso, 0.5, 0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("near-horizontal rays in isovelocity water")
{
    auto r = trace(iso, 1e-6);
    CHECK(r.horizontal_range == doctest::Approx(1000 / std::tan(1e-6)).epsilon(1e-9));
}

TEST_CASE("trace is bit-identical to the scalar functions")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i)
    {
        auto p = uwloc::testing::random_profile(rng, 6);
        for (auto end : {SourceEnd::shallow, SourceEnd::deep})
        {
            double th = uwloc::testing::random_angle(rng, p, end, 1e-3);
            auto r = trace(p, th, end);
            CHECK(r.travel_time == propagation_time(p, th, end));
            CHECK(r.horizontal_range == horizontal_range(p, th, end));
            CHECK(r.layer_angles.size() == p.size());
        }
    }
}

TEST_CASE("Snell invariant along the traced ray")
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i)
    {
        auto p = uwloc::testing::random_profile(rng, 5);
        for (auto end : {SourceEnd::shallow, SourceEnd::deep})
        {
            double th = uwloc::testing::random_angle(rng, p, end, 1e-4);
            auto r = trace(p, th, end);
            auto pts = p.points();
            std::size_t n = pts.size();
            double c0 = 0;
            for (std::size_t k = 0; k < n; ++k)
            {
                // boundary k along the path
                double s = end == SourceEnd::shallow ? pts[k].speed
                                                     : pts[n - 1 - k].speed;
                double inv = std::cos(r.layer_angles[k]) / s;
                if (k == 0)
                    c0 = inv;
                else
                    CHECK(rel_err(inv, c0) < 1e-9);
                CHECK(r.layer_angles[k] > 0);
                CHECK(r.layer_angles[k] <= half_pi);
            }
        }
    }
}

TEST_CASE("reciprocity")
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i)
    {
        auto p = uwloc::testing::random_profile(rng, 5);
        double th = uwloc::testing::random_angle(rng, p, SourceEnd::shallow, 1e-3);
        auto fwd = trace(p, th, SourceEnd::shallow);
        double arrival = fwd.layer_angles.back();
        auto back = trace(p, arrival, SourceEnd::deep);
        CHECK(rel_err(back.travel_time, fwd.travel_time) < 1e-9);
        CHECK(rel_err(back.horizontal_range, fwd.horizontal_range) < 1e-9);
    }
}

TEST_CASE("log-tangent and tau forms agree with the shipped evaluation")
{
    // Textbook forms in extended precision
    std::mt19937_64 rng(14);
    for (int i = 0; i < 500; ++i)
    {
        auto p = uwloc::testing::random_profile(rng, 5, 3000, 1440, 1560, 1.0);
        double th = uwloc::testing::random_angle(rng, p, SourceEnd::shallow, 0.05);
        th = std::min(th, half_pi - 0.01);
        auto lt = log_tangent<long double>(p, th);
        auto tf = tau_form<long double>(p, th);
        CHECK(rel_err(lt.travel_time, tf.travel_time) < 1e-12);
        CHECK(rel_err(lt.horizontal_range, tf.horizontal_range) < 1e-12);

        auto r = trace(p, th);
        CHECK(rel_err(r.travel_time, tf.travel_time) < 1e-12);
        CHECK(rel_err(r.horizontal_range, tf.horizontal_range) < 1e-12);
    }
}

TEST_CASE("monotone in the launch angle")
{
    std::mt19937_64 rng(15);
    for (int i = 0; i < 500; ++i)
    {
        auto p = uwloc::testing::random_profile(rng, 5);
        auto end = i % 2 ? SourceEnd::deep : SourceEnd::shallow;
        double a = uwloc::testing::random_angle(rng, p, end, 1e-6);
        double b = uwloc::testing::random_angle(rng, p, end, 1e-6);
        if (a == b)
            continue;
        if (a < b)
            std::swap(a, b);
        CHECK(propagation_time(p, a, end) < propagation_time(p, b, end));
        CHECK(horizontal_range(p, a, end) < horizontal_range(p, b, end));
    }
}

TEST_CASE("rays in a single gradient layer are arcs")
{
    for (auto p : {down, up, make({{200, 1495}, {900, 1530}})})
    {
        double th = std::max(0.4, min_feasible_angle(p) + 0.05);
        double s0 = p.points()[0].speed;
        double g = (p.points()[1].speed - s0)
                   / (p.points()[1].depth - p.points()[0].depth);
        double radius = std::fabs(s0 / (g * std::cos(th)));
        // centre lies on the normal to the launch direction, on the side
        // toward lower speed
        double sgn = g < 0 ? 1 : -1;
        double cx = -sgn * radius * std::sin(th);
        double cz = p.points()[0].depth + sgn * radius * std::cos(th);
        double worst = 0;
        for (const auto& v : oracle_path(p, th, 0.1))
        {
            double r = std::hypot(v.x - cx, v.depth - cz);
            worst = std::max(worst, std::fabs(r - radius));
        }
        CHECK(worst < 0.01);
    }
}

TEST_CASE("time solver")
{
    double th = solve_angle_for_time(iso, 0.942809042, 1e-8);
    CHECK(th == doctest::Approx(pi / 4).epsilon(1e-6));
    CHECK(std::fabs(propagation_time(iso, th) - 0.942809042) <= 1e-8);

    double tv = propagation_time(down, half_pi);
    CHECK(code_of([&] { solve_angle_for_time(down, 0.9 * tv, 1e-6); })
          == ErrorCode::unreachable);
    CHECK(solve_angle_for_time(down, tv, 1e-9) == half_pi);

    double tlow = propagation_time(up, feasible_bracket(up).lower);
    CHECK(code_of([&] { solve_angle_for_time(up, tlow * 1.01, 1e-6); })
          == ErrorCode::beyond_range);
    CHECK(code_of([&] { solve_angle_for_time(up, 1.0, 0); })
          == ErrorCode::invalid_argument);
}

TEST_CASE("range solver")
{
    CHECK(solve_angle_for_range(down, 0, 0.1) == half_pi);
    CHECK(solve_angle_for_range(iso, 1000, 1e-9) == doctest::Approx(pi / 4));
    double hmax = horizontal_range(up, feasible_bracket(up).lower);
    CHECK(code_of([&] { solve_angle_for_range(up, hmax * 1.01, 0.1); })
          == ErrorCode::beyond_range);
    CHECK(code_of([&] { solve_angle_for_range(up, -1, 0.1); })
          == ErrorCode::invalid_argument);
}

TEST_CASE("solver round trips")
{
    std::mt19937_64 rng(16);
    for (int i = 0; i < 300; ++i)
    {
        auto p = uwloc::testing::random_profile(rng, 5);
        auto end = i % 2 ? SourceEnd::deep : SourceEnd::shallow;
        double th = uwloc::testing::random_angle(rng, p, end, 0.05);
        double t = propagation_time(p, th, end);
        double h = horizontal_range(p, th, end);

        double tt = solve_angle_for_time(p, t, 1e-5, end);
        CHECK(std::fabs(propagation_time(p, tt, end) - t) <= 1e-5);
        double th2 = solve_angle_for_range(p, h, 0.1, end);
        CHECK(std::fabs(horizontal_range(p, th2, end) - h) <= 0.1);
    }
}

TEST_CASE("counters track layer terms")
{
    reset_trace_counters();
    auto p = make({{0, 1500}, {10, 1490}, {20, 1495}, {30, 1500}});
    propagation_time(p, 0.7);
    horizontal_range(p, 0.7);
    auto c = trace_counters();
    CHECK(c.traces == 2);
    CHECK(c.layer_terms == 6);
    reset_trace_counters();
    CHECK(trace_counters().traces == 0);
}
