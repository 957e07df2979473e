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

#include "uwloc/localize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "uwloc/raytrace.hpp"
#include "detail/csv.hpp"

namespace uwloc {

double distance(const Position& a, const Position& b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double horizontal_distance(const Position& a, const Position& b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

void IrtulConfig::validate() const
{
    auto positive = [](double v) { return v > 0 && std::isfinite(v); };
    if (!positive(initial_depth_step) || !positive(depth_step_threshold)
        || !positive(time_tolerance) || !positive(range_tolerance)
        || !positive(mean_speed) || max_iterations <= 0)
    {
        throw Error(ErrorCode::invalid_argument,
                    "IRTUL configuration values must all be positive");
    }
    if (!(depth_step_threshold < initial_depth_step))
    {
        throw Error(ErrorCode::invalid_argument,
                    "depth step threshold must be below the initial depth step");
    }
}

//---------------------------------------------------------------------------//

namespace {

constexpr double max_condition_number = 1e12;

// Condition number of a symmetric positive semi-definite matrix.
template<class M>
double condition_number(const M& normal)
{
    Eigen::SelfAdjointEigenSolver<M> eig(normal, Eigen::EigenvaluesOnly);
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0))
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace

Position rough_fix(std::span<const Measurement> measurements, double mean_speed)
{
    if (measurements.size() < 4)
    {
        throw Error(ErrorCode::insufficient_data,
                    fmt::format("rough fix needs at least 4 measurements, got {}",
                                measurements.size()));
    }
    if (!(mean_speed > 0))
        throw Error(ErrorCode::invalid_argument, "mean speed must be positive");

    const auto rows = static_cast<Eigen::Index>(measurements.size() - 1);
    Eigen::MatrixX3d b(rows, 3);
    Eigen::VectorXd a(rows);

    const Position& p0 = measurements[0].reference_position;
    const double rho0 = mean_speed * measurements[0].one_way_time;
    const double norm0 = p0.x * p0.x + p0.y * p0.y + p0.z * p0.z;
    for (Eigen::Index r = 0; r < rows; ++r)
    {
        const auto& m = measurements[static_cast<std::size_t>(r) + 1];
        const Position& p = m.reference_position;
        double rho = mean_speed * m.one_way_time;
        b(r, 0) = 2 * (p.x - p0.x);
        b(r, 1) = 2 * (p.y - p0.y);
        b(r, 2) = 2 * (p.z - p0.z);
        a(r) = (p.x * p.x + p.y * p.y + p.z * p.z) - norm0 - rho * rho + rho0 * rho0;
    }

    Eigen::Matrix3d normal = b.transpose() * b;
    if (condition_number(normal) > max_condition_number)
    {
        throw Error(ErrorCode::degenerate_geometry,
                    "reference geometry cannot resolve a 3D position");
    }
    Eigen::Vector3d x = normal.ldlt().solve(b.transpose() * a);
    return {x(0), x(1), x(2)};
}

HorizontalFix horizontal_fix(std::span<const HorizontalRange> ranges)
{
    if (ranges.size() < 4)
    {
        throw Error(ErrorCode::insufficient_data,
                    fmt::format("horizontal fix needs at least 4 ranges, got {}",
                                ranges.size()));
    }
    const auto rows = static_cast<Eigen::Index>(ranges.size() - 1);
    Eigen::MatrixX2d b(rows, 2);
    Eigen::VectorXd a(rows);

    const Position& p0 = ranges[0].reference;
    const double h0 = ranges[0].range;
    for (Eigen::Index r = 0; r < rows; ++r)
    {
        const auto& entry = ranges[static_cast<std::size_t>(r) + 1];
        const Position& p = entry.reference;
        b(r, 0) = 2 * (p.x - p0.x);
        b(r, 1) = 2 * (p.y - p0.y);
        a(r) = p.x * p.x - p0.x * p0.x + p.y * p.y - p0.y * p0.y + h0 * h0
               - entry.range * entry.range;
    }

    Eigen::Matrix2d normal = b.transpose() * b;
    if (condition_number(normal) > max_condition_number)
    {
        throw Error(ErrorCode::degenerate_geometry,
                    "reference nodes are horizontally collinear");
    }
    Eigen::Vector2d x = normal.ldlt().solve(b.transpose() * a);
    return {x(0), x(1)};
}

double time_loss(std::span<const double> simulated, std::span<const double> measured)
{
    if (simulated.size() != measured.size() || simulated.empty())
    {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("time loss needs equal non-empty lists ({} vs {})",
                                simulated.size(),
                                measured.size()));
    }
    double total = 0;
    for (std::size_t i = 0; i < simulated.size(); ++i)
    {
        double d = simulated[i] - measured[i];
        total += d * d;
    }
    return total;
}

//---------------------------------------------------------------------------//

namespace {

// Depth difference below which a link is treated as a horizontal straight ray.
constexpr double same_depth = 1e-6;

// Closest the target estimate may approach the profile ends [m].
constexpr double boundary_margin = 1e-3;

// Direct ray between a reference node and a candidate target depth.
class RayLink
{
  public:
    RayLink(const SoundVelocityProfile& svp, double z_ref, double z_target)
    {
        if (std::fabs(z_ref - z_target) < same_depth)
        {
            level_speed_ = svp.speed_at(z_ref);
            return;
        }
        segment_.emplace(svp.segment(z_ref, z_target));
        source_ = z_ref < z_target ? SourceEnd::shallow : SourceEnd::deep;
    }

    //! Horizontal range of the ray that takes time t. Times outside the
    //! direct-ray family map to the nearest member: vertical (h = 0) when
    //! too short, the farthest direct ray when too long.
    double range_for_time(double t, double tol) const
    {
        if (!segment_)
            return level_speed_ * t;
        double theta;
        try
        {
            theta = solve_angle_for_time(*segment_, t, tol, source_);
        }
        catch (const Error& e)
        {
            if (e.code() == ErrorCode::unreachable)
                return 0.0;
            if (e.code() != ErrorCode::beyond_range)
                throw;
            theta = feasible_bracket(*segment_, source_).lower;
        }
        return horizontal_range(*segment_, theta, source_);
    }

    //! Time of the ray that covers horizontal range h. Ranges past the
    //! farthest direct ray map to it.
    double time_for_range(double h, double tol) const
    {
        if (!segment_)
            return h / level_speed_;
        double theta;
        try
        {
            theta = solve_angle_for_range(*segment_, h, tol, source_);
        }
        catch (const Error& e)
        {
            if (e.code() != ErrorCode::beyond_range)
                throw;
            theta = feasible_bracket(*segment_, source_).lower;
        }
        return propagation_time(*segment_, theta, source_);
    }

  private:
    std::optional<SoundVelocityProfile> segment_;
    SourceEnd source_ = SourceEnd::shallow;
    double level_speed_ = 0;
};

struct DepthEvaluation
{
    HorizontalFix fix;
    double loss;
};

// Horizontal fix and time loss with the target held at depth z.
DepthEvaluation evaluate_depth(const SoundVelocityProfile& svp,
                               std::span<const Measurement> ms,
                               double z,
                               const IrtulConfig& config)
{
    std::vector<RayLink> links;
    links.reserve(ms.size());
    for (const auto& m : ms)
        links.emplace_back(svp, m.reference_position.z, z);

    // Ray-traced horizontal ranges from the measured times
    std::vector<HorizontalRange> ranges;
    ranges.reserve(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i)
    {
        ranges.push_back(
            {ms[i].reference_position,
             links[i].range_for_time(ms[i].one_way_time, config.time_tolerance)});
    }

    DepthEvaluation result{horizontal_fix(ranges), 0};

    // Re-simulate times from the fixed position
    const Position here{result.fix.x, result.fix.y, z};
    std::vector<double> simulated(ms.size());
    std::vector<double> measured(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i)
    {
        double h = horizontal_distance(here, ms[i].reference_position);
        simulated[i] = links[i].time_for_range(h, config.range_tolerance);
        measured[i] = ms[i].one_way_time;
    }
    result.loss = time_loss(simulated, measured);
    return result;
}

}  // namespace

LocalizationResult irtul_localize(const SoundVelocityProfile& svp,
                                  std::span<const Measurement> measurements,
                                  const IrtulConfig& config)
{
    config.validate();
    if (measurements.size() < 4)
    {
        throw Error(ErrorCode::insufficient_data,
                    fmt::format("localization needs at least 4 measurements, "
                                "got {}",
                                measurements.size()));
    }
    for (const auto& m : measurements)
    {
        if (!(m.one_way_time > 0))
        {
            throw Error(ErrorCode::invalid_argument,
                        fmt::format("reference {} has non-positive time {}",
                                    m.reference,
                                    m.one_way_time));
        }
        if (!svp.contains(m.reference_position.z))
        {
            throw Error(ErrorCode::out_of_range,
                        fmt::format("reference {} depth {} outside the profile",
                                    m.reference,
                                    m.reference_position.z));
        }
    }

    LocalizationResult result;
    result.rough_position = rough_fix(measurements, config.mean_speed);

    // Depth estimates stay strictly inside the profile.
    const double margin = std::min(boundary_margin,
                                   0.25 * (svp.max_depth() - svp.min_depth()));
    auto clamp_depth = [&](double z) {
        return std::clamp(z, svp.min_depth() + margin, svp.max_depth() - margin);
    };

    IrtulState state;
    state.estimate = result.rough_position;
    state.estimate.z = clamp_depth(state.estimate.z);
    state.depth_step = config.initial_depth_step;
    state.direction = 1;

    auto evaluate = [&](double z) {
        try
        {
            return evaluate_depth(svp, measurements, z, config);
        }
        catch (const Error& e)
        {
            throw LocalizationError(
                e.code(),
                fmt::format("iteration {} at depth {} m: {}", state.iteration, z, e.what()),
                state);
        }
    };

    // The accepted evaluation carries over between iterations.
    DepthEvaluation accepted = evaluate(state.estimate.z);
    state.estimate.x = accepted.fix.x;
    state.estimate.y = accepted.fix.y;
    state.loss_before = state.loss_after = accepted.loss;

    while (state.depth_step >= config.depth_step_threshold
           && state.iteration < config.max_iterations)
    {
        ++state.iteration;
        double z_tuned
            = clamp_depth(state.estimate.z + state.direction * state.depth_step);
        DepthEvaluation tuned = evaluate(z_tuned);

        state.loss_before = accepted.loss;
        state.loss_after = tuned.loss;
        result.loss_history.push_back({accepted.loss, tuned.loss});

        // A step pinned at the boundary counts as worsening.
        bool worse = tuned.loss > accepted.loss || z_tuned == state.estimate.z;
        if (worse)
        {
            state.depth_step /= 2;
            state.direction = -state.direction;
        }
        else
        {
            accepted = tuned;
            state.estimate = {tuned.fix.x, tuned.fix.y, z_tuned};
        }
    }

    result.position = state.estimate;
    result.iterations = state.iteration;
    result.converged = state.depth_step < config.depth_step_threshold;
    return result;
}

//---------------------------------------------------------------------------//

std::vector<Measurement> parse_measurements(std::istream& is)
{
    auto rows = detail::read_numeric_csv(is, 4, "measurements");
    std::vector<Measurement> result;
    result.reserve(rows.size());
    for (const auto& row : rows)
    {
        Measurement m;
        m.reference = static_cast<int>(result.size());
        m.reference_position = {row.values[0], row.values[1], row.values[2]};
        m.one_way_time = row.values[3];
        if (!(m.one_way_time > 0))
        {
            throw Error(ErrorCode::parse_error,
                        fmt::format("measurements: row {} has non-positive time",
                                    row.line));
        }
        result.push_back(m);
    }
    return result;
}

std::vector<Measurement> load_measurements(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
    {
        throw Error(ErrorCode::io_error,
                    fmt::format("cannot open '{}'", path.string()));
    }
    return parse_measurements(is);
}

void write_measurements(std::ostream& os, std::span<const Measurement> ms)
{
    os << "ref_x,ref_y,ref_z,one_way_time_s\n";
    for (const auto& m : ms)
    {
        os << fmt::format("{},{},{},{}\n",
                          m.reference_position.x,
                          m.reference_position.y,
                          m.reference_position.z,
                          m.one_way_time);
    }
}

}  // namespace uwloc
