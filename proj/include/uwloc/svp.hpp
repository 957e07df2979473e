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

//! \file uwloc/svp.hpp
//! Piecewise-linear sound velocity profiles: interpolation, segmentation and
//! feature-point simplification.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace uwloc {

struct SvpPoint
{
    double depth;  //!< [m], positive downward
    double speed;  //!< [m/s]

    friend bool operator==(const SvpPoint&, const SvpPoint&) = default;
};

/*!
 * Ordered (depth, speed) samples of a stratified medium.
 *
 * Depths are strictly increasing and speeds strictly positive; speed is
 * linear in depth between consecutive samples. The object is immutable after
 * construction.
 */
class SoundVelocityProfile
{
  public:
    //! Sorts by depth and validates; throws on duplicates or < 2 points.
    explicit SoundVelocityProfile(std::vector<SvpPoint> points);

    std::span<const SvpPoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::size_t layer_count() const noexcept { return points_.size() - 1; }
    double min_depth() const noexcept { return points_.front().depth; }
    double max_depth() const noexcept { return points_.back().depth; }
    double max_speed() const noexcept;

    bool contains(double depth) const noexcept
    {
        return depth >= min_depth() && depth <= max_depth();
    }

    //! Linear interpolation; exact at samples.
    double speed_at(double depth) const;

    //! Sub-profile spanning [min(za,zb), max(za,zb)] with interpolated ends.
    SoundVelocityProfile segment(double za, double zb) const;

    friend bool operator==(const SoundVelocityProfile&,
                           const SoundVelocityProfile&)
        = default;

  private:
    std::vector<SvpPoint> points_;
};

//---------------------------------------------------------------------------//
// CSV I/O: two columns "depth_m,speed_mps", optional header row.
//---------------------------------------------------------------------------//

SoundVelocityProfile parse_profile(std::istream& is);
SoundVelocityProfile parse_profile(std::string_view text);
SoundVelocityProfile load_profile(const std::filesystem::path& path);
void write_profile(std::ostream& os, const SoundVelocityProfile& profile);
void save_profile(const std::filesystem::path& path,
                  const SoundVelocityProfile& profile);

//---------------------------------------------------------------------------//
// Simplification
//---------------------------------------------------------------------------//

//! Stop once the simplified profile has this many points (>= 2).
struct PointCount
{
    std::size_t value;
};

//! Stop once the speed RMSE against the original drops below this [m/s].
struct RmseThreshold
{
    double value;
};

using SimplificationControl = std::variant<PointCount, RmseThreshold>;

//! Seven layers, i.e. eight feature points.
inline constexpr PointCount default_simplification{8};

/*!
 * Greedy maximum-distance feature point selection.
 *
 * Starts from the two endpoints. Each round adds the unselected sample whose
 * speed deviates most from the current piecewise-linear curve (ties go to the
 * shallower sample), until the control is satisfied. Output points are a
 * subset of the input points.
 */
SoundVelocityProfile simplify_dm_eicps(const SoundVelocityProfile& profile,
                                       const SimplificationControl& control);

//! Speed RMSE over the original's sample depths [m/s].
double profile_rmse(const SoundVelocityProfile& original,
                    const SoundVelocityProfile& simplified);

}  // namespace uwloc
