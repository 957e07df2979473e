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

//! \file uwloc/localize.hpp
//! Iterative ray-tracing localization of a target with unknown depth from
//! round-trip time-of-arrival measurements.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "errors.hpp"
#include "svp.hpp"

namespace uwloc {

struct Position
{
    double x = 0;  //!< [m]
    double y = 0;  //!< [m]
    double z = 0;  //!< depth [m], positive downward

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b) noexcept;
double horizontal_distance(const Position& a, const Position& b) noexcept;

//! One reference node's one-way propagation time (round trip halved).
struct Measurement
{
    int reference = 0;
    double one_way_time = 0;  //!< [s]
    Position reference_position;
};

struct IrtulConfig
{
    double initial_depth_step = 2.0;     //!< [m]
    double depth_step_threshold = 0.2;   //!< [m]
    double time_tolerance = 10e-6;       //!< [s]
    double range_tolerance = 0.1;        //!< [m]
    double mean_speed = 1500.0;          //!< [m/s], rough fix only
    int max_iterations = 100;

    //! Throws ErrorCode::invalid_argument on a non-positive field or when
    //! the step threshold is not below the initial step.
    void validate() const;
};

//! Loss before and after the depth tuning step of one iteration [s^2].
struct LossPair
{
    double before;
    double after;
};

//! Iteration state, attached to localization failures for diagnostics.
struct IrtulState
{
    Position estimate;
    double depth_step = 0;
    int direction = 1;
    double loss_before = 0;
    double loss_after = 0;
    int iteration = 0;
};

struct LocalizationResult
{
    Position position;
    Position rough_position;  //!< constant-speed starting point
    int iterations = 0;
    std::vector<LossPair> loss_history;
    bool converged = false;
};

class LocalizationError : public Error
{
  public:
    LocalizationError(ErrorCode code, const std::string& what, IrtulState state)
        : Error(code, what), state_(state)
    {
    }

    const IrtulState& state() const noexcept { return state_; }

  private:
    IrtulState state_;
};

//! Reference position and horizontal distance for the horizontal fix.
struct HorizontalRange
{
    Position reference;
    double range;  //!< [m]
};

struct HorizontalFix
{
    double x;
    double y;
};

//---------------------------------------------------------------------------//

//! Straight-ray sphere intersection with constant speed (linearized LS).
Position rough_fix(std::span<const Measurement> measurements, double mean_speed);

//! Circle intersection in the horizontal plane (linearized LS).
HorizontalFix horizontal_fix(std::span<const HorizontalRange> ranges);

//! Sum of squared differences, paired by index [s^2].
double time_loss(std::span<const double> simulated,
                 std::span<const double> measured);

/*!
 * Run the iterative ray-tracing localization.
 *
 * Starts from the constant-speed rough fix, then alternates a ray-traced
 * horizontal fix at the current depth with a loss-driven depth step that
 * halves and reverses whenever the loss grows. Stops when the step falls
 * below the configured threshold or the iteration cap is hit.
 */
LocalizationResult irtul_localize(const SoundVelocityProfile& svp,
                                  std::span<const Measurement> measurements,
                                  const IrtulConfig& config);

//---------------------------------------------------------------------------//
// Measurement CSV: "ref_x,ref_y,ref_z,one_way_time_s", header optional.
//---------------------------------------------------------------------------//

std::vector<Measurement> parse_measurements(std::istream& is);
std::vector<Measurement> load_measurements(const std::filesystem::path& path);
void write_measurements(std::ostream& os, std::span<const Measurement> ms);

}  // namespace uwloc
