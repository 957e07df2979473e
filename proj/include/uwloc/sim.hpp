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

//! \file uwloc/sim.hpp
//! Network scenario generation, measurement synthesis by forward ray tracing,
//! and paired comparison experiments.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "localize.hpp"
#include "svp.hpp"

namespace uwloc {

enum class NodeRole
{
    buoy,
    anchor,
    sensor_target,
    noncoop_target
};

std::string_view to_string(NodeRole role);

struct Node
{
    int id;
    NodeRole role;
    Position position;
};

struct ScenarioConfig
{
    double area_x = 10000;        //!< [m]
    double area_y = 10000;        //!< [m]
    double depth = 3000;          //!< [m]
    int buoy_count = 25;
    int anchor_count = 25;
    int target_count = 200;
    double comm_range = 4500;     //!< [m]
    double time_noise_sigma = 0.003;  //!< one-way time noise [s]
    double time_noise_mean = 0;       //!< [s]
    std::uint64_t rng_seed = 42;

    void validate() const;
};

struct Scenario
{
    std::vector<Node> nodes;
    std::map<int, Position> truth;  //!< target id -> true position
    ScenarioConfig config;

    //! Buoys and anchors
    std::vector<const Node*> references() const;
    //! Target ids in ascending order
    std::vector<int> target_ids() const;
};

using Rng = std::mt19937_64;

//! Gridded buoys at the surface and anchors on the bottom, uniformly random
//! targets. Deterministic in the config's seed.
Scenario generate_scenario(const ScenarioConfig& config);

//! Bisection tolerance for forward-traced true ranges [m].
inline constexpr double synthesis_range_tolerance = 1e-6;

//! Noise-free one-way time of the direct ray between two points, or nothing
//! when no direct (non-turning) ray connects them.
std::optional<double> direct_travel_time(const SoundVelocityProfile& svp,
                                         const Position& source,
                                         const Position& receiver);

/*!
 * Measurements from every reference within communication range.
 *
 * Throws ErrorCode::insufficient_data when fewer than 4 references have a
 * direct ray to the target.
 */
std::vector<Measurement> synthesize_measurements(const Scenario& scenario,
                                                 const SoundVelocityProfile& svp,
                                                 int target,
                                                 Rng& rng);

//---------------------------------------------------------------------------//
// Experiments
//---------------------------------------------------------------------------//

enum class Method
{
    constant_speed,
    original_svp,
    simplified_svp
};

inline constexpr std::array<Method, 3> all_methods{
    Method::constant_speed, Method::original_svp, Method::simplified_svp};

std::string_view to_string(Method method);

struct MethodOutcome
{
    bool ok = false;
    Position estimate;
    Position error;  //!< estimate - truth, per axis
    double error_3d = 0;
    int iterations = 0;
    double wall_us = 0;
    std::string failure;
};

struct TargetOutcome
{
    int target_id = 0;
    Position truth;
    std::size_t reference_count = 0;
    bool localizable = false;
    std::array<MethodOutcome, 3> methods;

    const MethodOutcome& operator[](Method m) const
    {
        return methods[static_cast<std::size_t>(m)];
    }
};

struct MethodSummary
{
    std::size_t localized = 0;  //!< targets included in the statistics
    std::size_t failures = 0;
    double mean_error = 0;      //!< mean per-target 3D error [m]
    double std_error = 0;
    double rmse_x = 0;
    double rmse_y = 0;
    double rmse_z = 0;
    double rmse_3d = 0;
    double total_wall_us = 0;
    double mean_wall_us = 0;
    double mean_iterations = 0;
};

//! Mean absolute per-axis shift of a method's estimate from the
//! constant-speed estimate [m].
struct Correction
{
    double x = 0;
    double y = 0;
    double z = 0;
};

struct ExperimentReport
{
    std::vector<TargetOutcome> targets;
    std::array<MethodSummary, 3> summaries;
    std::array<Correction, 3> corrections;
    std::size_t unlocalizable = 0;  //!< targets without 4 usable references

    const MethodSummary& summary(Method m) const
    {
        return summaries[static_cast<std::size_t>(m)];
    }
    const Correction& correction(Method m) const
    {
        return corrections[static_cast<std::size_t>(m)];
    }
};

struct ExperimentOptions
{
    unsigned threads = 1;  //!< 0 = hardware concurrency
};

/*!
 * Localize every target three ways from one shared measurement set each:
 * constant-speed rough fix, IRTUL with the original profile, and IRTUL with
 * the simplified profile. Failed targets are recorded, never fatal.
 *
 * Statistics cover the targets where all three methods succeeded.
 */
ExperimentReport run_experiment(const Scenario& scenario,
                                const SoundVelocityProfile& svp,
                                const SoundVelocityProfile& simplified,
                                const IrtulConfig& irtul_config,
                                const ExperimentOptions& options = {});

//! Columns: target_id,method,err_x_m,err_y_m,err_z_m,err_3d_m,iterations,wall_us
void write_target_csv(std::ostream& os,
                      const ExperimentReport& report,
                      bool include_timing = true);

//! Columns: method,mean_rmse_m,std_m,mean_wall_us
void write_summary_csv(std::ostream& os, const ExperimentReport& report);

//---------------------------------------------------------------------------//
// Timing benchmark
//---------------------------------------------------------------------------//

struct BenchmarkResult
{
    std::size_t localizations = 0;  //!< per profile per repeat
    int repeats = 0;
    double mean_us_original = 0;
    double mean_us_simplified = 0;
    double layers_per_trace_original = 0;
    double layers_per_trace_simplified = 0;
    double traces_per_localization_original = 0;
    double traces_per_localization_simplified = 0;
};

//! Single-threaded wall time of IRTUL on the first `targets` localizable
//! targets of the scenario, averaged over `repeats` passes per profile.
BenchmarkResult run_benchmark(const Scenario& scenario,
                              const SoundVelocityProfile& svp,
                              const SoundVelocityProfile& simplified,
                              const IrtulConfig& irtul_config,
                              int repeats,
                              int targets);

//---------------------------------------------------------------------------//
// Scenario file: "key = value" lines, '#' comments.
//---------------------------------------------------------------------------//

struct ScenarioFile
{
    ScenarioConfig scenario;
    IrtulConfig irtul;
    std::size_t simplify_points = default_simplification.value;
};

ScenarioFile parse_scenario_file(std::istream& is);
ScenarioFile load_scenario_file(const std::filesystem::path& path);

}  // namespace uwloc
