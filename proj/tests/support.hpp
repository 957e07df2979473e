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

// Helpers shared by the unit tests and the acceptance runner.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "uwloc/errors.hpp"
#include "uwloc/raytrace.hpp"
#include "uwloc/svp.hpp"

namespace uwloc::testing {

//! Random profile with `layers` layers spanning at most `max_span` meters,
//! speeds uniform in [lo, hi]. Layer speed differences are kept at least
//! `min_ds` apart so every layer is a true gradient layer.
inline SoundVelocityProfile random_profile(std::mt19937_64& rng,
                                           int layers,
                                           double max_span = 3000,
                                           double lo = 1440,
                                           double hi = 1560,
                                           double min_ds = 0)
{
    std::uniform_real_distribution<double> unit(0, 1);
    double span = 50 + unit(rng) * (max_span - 50);
    double top = unit(rng) * (3000 - span);
    std::vector<double> cuts(layers - 1);
    for (auto& c : cuts)
        c = unit(rng);
    std::sort(cuts.begin(), cuts.end());

    std::vector<SvpPoint> pts;
    pts.push_back({top, lo + unit(rng) * (hi - lo)});
    for (int i = 0; i < layers; ++i)
    {
        double z = i + 1 < layers ? top + span * cuts[i] : top + span;
        if (z <= pts.back().depth)
            z = std::nextafter(pts.back().depth + 1e-3, INFINITY);
        double s;
        do
        {
            s = lo + unit(rng) * (hi - lo);
        } while (std::fabs(s - pts.back().speed) < min_ds);
        pts.push_back({z, s});
    }
    return SoundVelocityProfile(std::move(pts));
}

//! Uniform launch angle in [theta_min + margin, pi/2].
inline double random_angle(std::mt19937_64& rng,
                           const SoundVelocityProfile& seg,
                           SourceEnd end,
                           double margin)
{
    double lo = std::min(min_feasible_angle(seg, end) + margin, half_pi);
    return std::uniform_real_distribution<double>(lo, half_pi)(rng);
}

//! Code of the uwloc::Error thrown by f; fails the test if none is thrown.
template<class F>
ErrorCode code_of(F&& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

inline double rel_err(double a, double b)
{
    return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

}  // namespace uwloc::testing
