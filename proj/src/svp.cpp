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

#include "uwloc/svp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "uwloc/errors.hpp"
#include "detail/csv.hpp"

namespace uwloc {

SoundVelocityProfile::SoundVelocityProfile(std::vector<SvpPoint> points)
    : points_(std::move(points))
{
    if (points_.size() < 2)
    {
        throw Error(ErrorCode::invalid_argument,
                    "sound velocity profile needs at least 2 points");
    }
    for (const auto& p : points_)
    {
        if (!std::isfinite(p.depth) || !std::isfinite(p.speed))
        {
            throw Error(ErrorCode::invalid_argument,
                        "non-finite sound velocity sample");
        }
        if (!(p.speed > 0))
        {
            throw Error(ErrorCode::invalid_argument,
                        fmt::format("non-positive sound speed {} at depth {}",
                                    p.speed, p.depth));
        }
    }
    std::stable_sort(points_.begin(),
                     points_.end(),
                     [](const SvpPoint& a, const SvpPoint& b) {
                         return a.depth < b.depth;
                     });
    auto dup = std::adjacent_find(
        points_.begin(), points_.end(), [](const SvpPoint& a, const SvpPoint& b) {
            return a.depth == b.depth;
        });
    if (dup != points_.end())
    {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("duplicate depth {} in sound velocity profile",
                                dup->depth));
    }
}

double SoundVelocityProfile::max_speed() const noexcept
{
    return std::max_element(points_.begin(),
                            points_.end(),
                            [](const SvpPoint& a, const SvpPoint& b) {
                                return a.speed < b.speed;
                            })
        ->speed;
}

double SoundVelocityProfile::speed_at(double depth) const
{
    if (!this->contains(depth))
    {
        throw Error(ErrorCode::out_of_range,
                    fmt::format("depth {} outside profile range [{}, {}]",
                                depth,
                                min_depth(),
                                max_depth()));
    }
    if (depth == max_depth())
        return points_.back().speed;

    // First sample strictly deeper than `depth`
    auto upper = std::upper_bound(
        points_.begin(), points_.end(), depth, [](double z, const SvpPoint& p) {
            return z < p.depth;
        });
    const SvpPoint& a = *(upper - 1);
    const SvpPoint& b = *upper;
    if (depth == a.depth)
        return a.speed;
    double frac = (depth - a.depth) / (b.depth - a.depth);
    return a.speed + (b.speed - a.speed) * frac;
}

SoundVelocityProfile SoundVelocityProfile::segment(double za, double zb) const
{
    if (!this->contains(za) || !this->contains(zb))
    {
        throw Error(ErrorCode::out_of_range,
                    fmt::format("segment [{}, {}] outside profile range [{}, {}]",
                                za,
                                zb,
                                min_depth(),
                                max_depth()));
    }
    if (za == zb)
    {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("zero-span segment at depth {}", za));
    }
    double lo = std::min(za, zb);
    double hi = std::max(za, zb);

    std::vector<SvpPoint> result;
    result.reserve(points_.size());
    result.push_back({lo, this->speed_at(lo)});
    for (const auto& p : points_)
    {
        if (p.depth > lo && p.depth < hi)
            result.push_back(p);
    }
    result.push_back({hi, this->speed_at(hi)});
    return SoundVelocityProfile{std::move(result)};
}

//---------------------------------------------------------------------------//

SoundVelocityProfile parse_profile(std::istream& is)
{
    auto rows = detail::read_numeric_csv(is, 2, "sound velocity profile");
    std::vector<SvpPoint> points;
    points.reserve(rows.size());
    for (const auto& row : rows)
        points.push_back({row.values[0], row.values[1]});
    if (points.size() < 2)
    {
        throw Error(ErrorCode::parse_error,
                    "sound velocity profile needs at least 2 rows");
    }
    try
    {
        return SoundVelocityProfile{std::move(points)};
    }
    catch (const Error& e)
    {
        throw Error(ErrorCode::parse_error, e.what());
    }
}

SoundVelocityProfile parse_profile(std::string_view text)
{
    std::istringstream is{std::string(text)};
    return parse_profile(is);
}

SoundVelocityProfile load_profile(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
    {
        throw Error(ErrorCode::io_error,
                    fmt::format("cannot open '{}'", path.string()));
    }
    return parse_profile(is);
}

void write_profile(std::ostream& os, const SoundVelocityProfile& profile)
{
    os << "depth_m,speed_mps\n";
    for (const auto& p : profile.points())
        os << fmt::format("{},{}\n", p.depth, p.speed);
}

void save_profile(const std::filesystem::path& path,
                  const SoundVelocityProfile& profile)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
        throw Error(ErrorCode::io_error,
                    fmt::format("cannot write '{}'", path.string()));
    }
    write_profile(os, profile);
    if (!os)
    {
        throw Error(ErrorCode::io_error,
                    fmt::format("write failed for '{}'", path.string()));
    }
}

//---------------------------------------------------------------------------//

namespace {

double interpolate(const SvpPoint& a, const SvpPoint& b, double depth)
{
    return a.speed + (b.speed - a.speed) * (depth - a.depth) / (b.depth - a.depth);
}

// Sum of squared speed deviations of the original samples from the curve
// through the selected samples.
double squared_error(std::span<const SvpPoint> pts,
                     const std::vector<bool>& selected)
{
    double total = 0;
    std::size_t prev = 0;
    for (std::size_t next = 1; next < pts.size(); ++next)
    {
        if (!selected[next])
            continue;
        for (std::size_t i = prev + 1; i < next; ++i)
        {
            double d = pts[i].speed - interpolate(pts[prev], pts[next], pts[i].depth);
            total += d * d;
        }
        prev = next;
    }
    return total;
}

}  // namespace

SoundVelocityProfile simplify_dm_eicps(const SoundVelocityProfile& profile,
                                       const SimplificationControl& control)
{
    const auto pts = profile.points();
    const std::size_t n = pts.size();

    std::size_t target_count = n;
    double rmse_threshold = -1;
    if (const auto* count = std::get_if<PointCount>(&control))
    {
        if (count->value < 2)
        {
            throw Error(ErrorCode::invalid_argument,
                        "simplification needs at least 2 points");
        }
        if (count->value > n)
        {
            throw Error(ErrorCode::invalid_argument,
                        fmt::format("requested {} points but profile has {}",
                                    count->value,
                                    n));
        }
        target_count = count->value;
    }
    else
    {
        rmse_threshold = std::get<RmseThreshold>(control).value;
        if (!(rmse_threshold > 0))
        {
            throw Error(ErrorCode::invalid_argument,
                        "RMSE threshold must be positive");
        }
    }

    std::vector<bool> selected(n, false);
    selected.front() = selected.back() = true;
    std::size_t count = 2;

    auto rmse_reached = [&] {
        return rmse_threshold > 0
               && std::sqrt(squared_error(pts, selected) / n) < rmse_threshold;
    };

    while (count < target_count && !rmse_reached())
    {
        // Scan each selected interval; strict '>' keeps the shallowest on ties
        std::size_t best = n;
        double best_dist = -1;
        std::size_t prev = 0;
        for (std::size_t next = 1; next < n; ++next)
        {
            if (!selected[next])
                continue;
            for (std::size_t i = prev + 1; i < next; ++i)
            {
                double dist = std::fabs(
                    pts[i].speed - interpolate(pts[prev], pts[next], pts[i].depth));
                if (dist > best_dist)
                {
                    best_dist = dist;
                    best = i;
                }
            }
            prev = next;
        }
        selected[best] = true;
        ++count;
    }

    std::vector<SvpPoint> result;
    result.reserve(count);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (selected[i])
            result.push_back(pts[i]);
    }
    return SoundVelocityProfile{std::move(result)};
}

double profile_rmse(const SoundVelocityProfile& original,
                    const SoundVelocityProfile& simplified)
{
    if (simplified.min_depth() > original.min_depth()
        || simplified.max_depth() < original.max_depth())
    {
        throw Error(ErrorCode::out_of_range,
                    "simplified profile does not cover the original depth range");
    }
    double total = 0;
    for (const auto& p : original.points())
    {
        double d = p.speed - simplified.speed_at(p.depth);
        total += d * d;
    }
    return std::sqrt(total / static_cast<double>(original.size()));
}

}  // namespace uwloc
