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

#include "uwloc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "uwloc/errors.hpp"
#include "uwloc/raytrace.hpp"
#include "detail/csv.hpp"

namespace uwloc {

std::string_view to_string(NodeRole role)
{
    switch (role)
    {
        case NodeRole::buoy: return "buoy";
        case NodeRole::anchor: return "anchor";
        case NodeRole::sensor_target: return "sensor_target";
        case NodeRole::noncoop_target: return "noncoop_target";
    }
    return "unknown";
}

std::string_view to_string(Method method)
{
    switch (method)
    {
        case Method::constant_speed: return "constant_speed";
        case Method::original_svp: return "original_svp";
        case Method::simplified_svp: return "simplified_svp";
    }
    return "unknown";
}

void ScenarioConfig::validate() const
{
    auto positive = [](double v) { return v > 0 && std::isfinite(v); };
    if (!positive(area_x) || !positive(area_y) || !positive(depth))
        throw Error(ErrorCode::invalid_argument, "scenario extents must be positive");
    if (buoy_count < 1 || anchor_count < 1 || target_count < 1)
        throw Error(ErrorCode::invalid_argument, "node counts must be at least 1");
    if (!positive(comm_range))
        throw Error(ErrorCode::invalid_argument, "communication range must be positive");
    if (!(time_noise_sigma >= 0) || !std::isfinite(time_noise_sigma)
        || !std::isfinite(time_noise_mean))
    {
        throw Error(ErrorCode::invalid_argument,
                    "time noise must be finite with non-negative sigma");
    }
}

std::vector<const Node*> Scenario::references() const
{
    std::vector<const Node*> result;
    for (const auto& n : nodes)
    {
        if (n.role == NodeRole::buoy || n.role == NodeRole::anchor)
            result.push_back(&n);
    }
    return result;
}

std::vector<int> Scenario::target_ids() const
{
    std::vector<int> ids;
    ids.reserve(truth.size());
    for (const auto& [id, pos] : truth)
        ids.push_back(id);
    return ids;
}

//---------------------------------------------------------------------------//

namespace {

int grid_side(int count, const char* what)
{
    auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
    if (side * side != count)
    {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("{} count {} is not a perfect square", what, count));
    }
    return side;
}

void add_grid(std::vector<Node>& nodes,
              const ScenarioConfig& config,
              int count,
              NodeRole role,
              double z)
{
    int side = grid_side(count, to_string(role).data());
    double step_x = config.area_x / side;
    double step_y = config.area_y / side;
    for (int j = 0; j < side; ++j)
    {
        for (int i = 0; i < side; ++i)
        {
            int id = static_cast<int>(nodes.size());
            nodes.push_back(
                {id, role, {(i + 0.5) * step_x, (j + 0.5) * step_y, z}});
        }
    }
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config)
{
    config.validate();
    Scenario scenario;
    scenario.config = config;
    add_grid(scenario.nodes, config, config.buoy_count, NodeRole::buoy, 0.0);
    add_grid(scenario.nodes, config, config.anchor_count, NodeRole::anchor, config.depth);

    Rng rng(config.rng_seed);
    std::uniform_real_distribution<double> ux(0.0, config.area_x);
    std::uniform_real_distribution<double> uy(0.0, config.area_y);
    std::uniform_real_distribution<double> uz(0.0, config.depth);
    for (int k = 0; k < config.target_count; ++k)
    {
        Position p;
        p.x = ux(rng);
        p.y = uy(rng);
        do
        {
            p.z = uz(rng);
        } while (p.z == 0.0);
        int id = static_cast<int>(scenario.nodes.size());
        auto role = k % 2 == 0 ? NodeRole::sensor_target : NodeRole::noncoop_target;
        scenario.nodes.push_back({id, role, p});
        scenario.truth.emplace(id, p);
    }
    return scenario;
}

std::optional<double> direct_travel_time(const SoundVelocityProfile& svp,
                                         const Position& source,
                                         const Position& receiver)
{
    double h = horizontal_distance(source, receiver);
    if (std::fabs(source.z - receiver.z) < 1e-6)
        return h / svp.speed_at(source.z);

    auto seg = svp.segment(source.z, receiver.z);
    auto end = source.z < receiver.z ? SourceEnd::shallow : SourceEnd::deep;
    try
    {
        double theta = solve_angle_for_range(seg, h, synthesis_range_tolerance, end);
        return propagation_time(seg, theta, end);
    }
    catch (const Error& e)
    {
        if (e.code() == ErrorCode::beyond_range)
            return std::nullopt;
        throw;
    }
}

std::vector<Measurement> synthesize_measurements(const Scenario& scenario,
                                                 const SoundVelocityProfile& svp,
                                                 int target,
                                                 Rng& rng)
{
    auto it = scenario.truth.find(target);
    if (it == scenario.truth.end())
    {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("unknown target id {}", target));
    }
    const Position& truth = it->second;
    const auto& cfg = scenario.config;

    std::vector<Measurement> result;
    for (const Node* ref : scenario.references())
    {
        if (distance(ref->position, truth) > cfg.comm_range)
            continue;
        auto t = direct_travel_time(svp, ref->position, truth);
        if (!t)
            continue;
        double noisy = *t + cfg.time_noise_mean;
        if (cfg.time_noise_sigma > 0)
        {
            std::normal_distribution<double> noise(0.0, cfg.time_noise_sigma);
            noisy += noise(rng);
        }
        if (!(noisy > 0))
            continue;
        result.push_back({ref->id, noisy, ref->position});
    }
    if (result.size() < 4)
    {
        throw Error(ErrorCode::insufficient_data,
                    fmt::format("target {} has only {} usable references",
                                target,
                                result.size()));
    }
    return result;
}

//---------------------------------------------------------------------------//

namespace {

using Clock = std::chrono::steady_clock;

template<class F>
MethodOutcome timed_outcome(const Position& truth, F&& localize)
{
    MethodOutcome out;
    auto start = Clock::now();
    try
    {
        auto [estimate, iterations] = localize();
        out.wall_us = std::chrono::duration<double, std::micro>(Clock::now() - start)
                          .count();
        out.ok = true;
        out.estimate = estimate;
        out.iterations = iterations;
        out.error = {estimate.x - truth.x, estimate.y - truth.y, estimate.z - truth.z};
        out.error_3d = distance(estimate, truth);
    }
    catch (const Error& e)
    {
        out.failure = e.what();
    }
    return out;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                body(i);
        });
    }
}

Rng noise_rng(const ScenarioConfig& config)
{
    // Separate stream from the placement RNG
    return Rng(config.rng_seed ^ 0x9e3779b97f4a7c15ULL);
}

void check_coverage(const SoundVelocityProfile& svp, const ScenarioConfig& cfg)
{
    if (svp.min_depth() > 0 || svp.max_depth() < cfg.depth)
    {
        throw Error(ErrorCode::out_of_range,
                    fmt::format("profile [{}, {}] m does not cover the scenario "
                                "depth [0, {}] m",
                                svp.min_depth(),
                                svp.max_depth(),
                                cfg.depth));
    }
}

}  // namespace

ExperimentReport run_experiment(const Scenario& scenario,
                                const SoundVelocityProfile& svp,
                                const SoundVelocityProfile& simplified,
                                const IrtulConfig& irtul_config,
                                const ExperimentOptions& options)
{
    irtul_config.validate();
    check_coverage(svp, scenario.config);
    check_coverage(simplified, scenario.config);

    ExperimentReport report;
    const auto ids = scenario.target_ids();

    // Measurements are drawn serially in target order
    std::vector<std::optional<std::vector<Measurement>>> sets(ids.size());
    report.targets.resize(ids.size());
    Rng rng = noise_rng(scenario.config);
    for (std::size_t i = 0; i < ids.size(); ++i)
    {
        auto& target = report.targets[i];
        target.target_id = ids[i];
        target.truth = scenario.truth.at(ids[i]);
        try
        {
            sets[i] = synthesize_measurements(scenario, svp, ids[i], rng);
            target.localizable = true;
            target.reference_count = sets[i]->size();
        }
        catch (const Error& e)
        {
            if (e.code() != ErrorCode::insufficient_data)
                throw;
        }
    }

    parallel_for(ids.size(), options.threads, [&](std::size_t i) {
        auto& target = report.targets[i];
        if (!target.localizable)
            return;
        const auto& ms = *sets[i];
        auto& out = target.methods;
        out[0] = timed_outcome(target.truth, [&] {
            return std::pair{rough_fix(ms, irtul_config.mean_speed), 0};
        });
        out[1] = timed_outcome(target.truth, [&] {
            auto r = irtul_localize(svp, ms, irtul_config);
            return std::pair{r.position, r.iterations};
        });
        out[2] = timed_outcome(target.truth, [&] {
            auto r = irtul_localize(simplified, ms, irtul_config);
            return std::pair{r.position, r.iterations};
        });
    });

    // Paired statistics over targets where every method succeeded
    std::vector<const TargetOutcome*> paired;
    for (const auto& target : report.targets)
    {
        if (!target.localizable)
        {
            ++report.unlocalizable;
            continue;
        }
        bool all_ok = true;
        for (std::size_t m = 0; m < 3; ++m)
        {
            if (!target.methods[m].ok)
            {
                ++report.summaries[m].failures;
                all_ok = false;
            }
        }
        if (all_ok)
            paired.push_back(&target);
    }

    const double n = static_cast<double>(paired.size());
    for (std::size_t m = 0; m < 3 && !paired.empty(); ++m)
    {
        auto& s = report.summaries[m];
        auto& c = report.corrections[m];
        s.localized = paired.size();
        double sum_sq_x = 0, sum_sq_y = 0, sum_sq_z = 0, iters = 0;
        for (const auto* t : paired)
        {
            const auto& o = t->methods[m];
            const auto& base = t->methods[0].estimate;
            s.mean_error += o.error_3d;
            sum_sq_x += o.error.x * o.error.x;
            sum_sq_y += o.error.y * o.error.y;
            sum_sq_z += o.error.z * o.error.z;
            s.total_wall_us += o.wall_us;
            iters += o.iterations;
            c.x += std::fabs(o.estimate.x - base.x);
            c.y += std::fabs(o.estimate.y - base.y);
            c.z += std::fabs(o.estimate.z - base.z);
        }
        s.mean_error /= n;
        s.rmse_x = std::sqrt(sum_sq_x / n);
        s.rmse_y = std::sqrt(sum_sq_y / n);
        s.rmse_z = std::sqrt(sum_sq_z / n);
        s.rmse_3d = std::sqrt((sum_sq_x + sum_sq_y + sum_sq_z) / n);
        s.mean_wall_us = s.total_wall_us / n;
        s.mean_iterations = iters / n;
        c.x /= n;
        c.y /= n;
        c.z /= n;

        double var = 0;
        for (const auto* t : paired)
        {
            double d = t->methods[m].error_3d - s.mean_error;
            var += d * d;
        }
        s.std_error = paired.size() > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    }
    return report;
}

void write_target_csv(std::ostream& os,
                      const ExperimentReport& report,
                      bool include_timing)
{
    os << "target_id,method,err_x_m,err_y_m,err_z_m,err_3d_m,iterations,wall_us\n";
    for (const auto& t : report.targets)
    {
        for (auto method : all_methods)
        {
            const auto& o = t[method];
            if (!o.ok)
                continue;
            os << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{:.1f}\n",
                              t.target_id,
                              to_string(method),
                              o.error.x,
                              o.error.y,
                              o.error.z,
                              o.error_3d,
                              o.iterations,
                              include_timing ? o.wall_us : 0.0);
        }
    }
}

void write_summary_csv(std::ostream& os, const ExperimentReport& report)
{
    os << "method,mean_rmse_m,std_m,mean_wall_us\n";
    for (auto method : all_methods)
    {
        const auto& s = report.summary(method);
        os << fmt::format("{},{:.6f},{:.6f},{:.1f}\n",
                          to_string(method),
                          s.mean_error,
                          s.std_error,
                          s.mean_wall_us);
    }
}

//---------------------------------------------------------------------------//

BenchmarkResult run_benchmark(const Scenario& scenario,
                              const SoundVelocityProfile& svp,
                              const SoundVelocityProfile& simplified,
                              const IrtulConfig& irtul_config,
                              int repeats,
                              int targets)
{
    irtul_config.validate();
    check_coverage(svp, scenario.config);
    check_coverage(simplified, scenario.config);
    if (repeats < 1 || targets < 1)
    {
        throw Error(ErrorCode::invalid_argument,
                    "benchmark needs at least one repeat and one target");
    }

    std::vector<std::vector<Measurement>> sets;
    Rng rng = noise_rng(scenario.config);
    for (int id : scenario.target_ids())
    {
        if (static_cast<int>(sets.size()) == targets)
            break;
        try
        {
            auto ms = synthesize_measurements(scenario, svp, id, rng);
            // Keep only sets both profiles can localize
            irtul_localize(svp, ms, irtul_config);
            irtul_localize(simplified, ms, irtul_config);
            sets.push_back(std::move(ms));
        }
        catch (const Error&)
        {
        }
    }
    if (sets.empty())
        throw Error(ErrorCode::insufficient_data, "no localizable benchmark targets");

    BenchmarkResult result;
    result.localizations = sets.size();
    result.repeats = repeats;

    auto run_all = [&](const SoundVelocityProfile& profile) {
        auto start = Clock::now();
        for (const auto& ms : sets)
            irtul_localize(profile, ms, irtul_config);
        return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
    };

    double total_original = 0;
    double total_simplified = 0;
    for (int r = 0; r < repeats; ++r)
    {
        // Alternate profile order each repeat
        if (r % 2 == 0)
        {
            total_original += run_all(svp);
            total_simplified += run_all(simplified);
        }
        else
        {
            total_simplified += run_all(simplified);
            total_original += run_all(svp);
        }
    }
    const double runs = static_cast<double>(repeats) * static_cast<double>(sets.size());
    result.mean_us_original = total_original / runs;
    result.mean_us_simplified = total_simplified / runs;

    auto count = [&](const SoundVelocityProfile& profile, double& per_trace,
                     double& per_localization) {
        reset_trace_counters();
        for (const auto& ms : sets)
            irtul_localize(profile, ms, irtul_config);
        auto c = trace_counters();
        per_trace = c.traces ? static_cast<double>(c.layer_terms) / c.traces : 0.0;
        per_localization = static_cast<double>(c.traces) / sets.size();
    };
    count(svp, result.layers_per_trace_original, result.traces_per_localization_original);
    count(simplified,
          result.layers_per_trace_simplified,
          result.traces_per_localization_simplified);
    return result;
}

//---------------------------------------------------------------------------//

namespace {

std::string normalize_key(std::string_view key)
{
    std::string out;
    for (char c : key)
    {
        auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc))
            out.push_back(static_cast<char>(std::tolower(uc)));
        else if (!out.empty() && out.back() != '_')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_')
        out.pop_back();
    return out;
}

}  // namespace

ScenarioFile parse_scenario_file(std::istream& is)
{
    ScenarioFile file;
    auto& sc = file.scenario;
    auto& ir = file.irtul;

    using Setter = std::function<void(double)>;
    auto as_int = [](double v) {
        if (v != std::floor(v) || std::fabs(v) > 1e9)
            throw Error(ErrorCode::parse_error, fmt::format("expected an integer, got {}", v));
        return static_cast<int>(v);
    };
    const std::unordered_map<std::string, Setter> setters{
        {"communication_range", [&](double v) { sc.comm_range = v; }},
        {"comm_range", [&](double v) { sc.comm_range = v; }},
        {"area_square", [&](double v) { sc.area_x = sc.area_y = v; }},
        {"area_x", [&](double v) { sc.area_x = v; }},
        {"area_y", [&](double v) { sc.area_y = v; }},
        {"depth", [&](double v) { sc.depth = v; }},
        {"surface_buoys", [&](double v) { sc.buoy_count = as_int(v); }},
        {"buoy_count", [&](double v) { sc.buoy_count = as_int(v); }},
        {"anchor_nodes", [&](double v) { sc.anchor_count = as_int(v); }},
        {"anchor_count", [&](double v) { sc.anchor_count = as_int(v); }},
        {"target_nodes_to_be_located", [&](double v) { sc.target_count = as_int(v); }},
        {"target_count", [&](double v) { sc.target_count = as_int(v); }},
        {"mean_error_time", [&](double v) { sc.time_noise_mean = v; }},
        {"time_noise_mean", [&](double v) { sc.time_noise_mean = v; }},
        {"standard_deviation_error_time", [&](double v) { sc.time_noise_sigma = v; }},
        {"time_noise_sigma", [&](double v) { sc.time_noise_sigma = v; }},
        {"number_of_simplification_layers",
         [&](double v) { file.simplify_points = static_cast<std::size_t>(as_int(v)) + 1; }},
        {"simplify_points",
         [&](double v) { file.simplify_points = static_cast<std::size_t>(as_int(v)); }},
        {"threshold_of_depth_tuning_step", [&](double v) { ir.depth_step_threshold = v; }},
        {"depth_step_threshold", [&](double v) { ir.depth_step_threshold = v; }},
        {"threshold_of_signal_propagation_time", [&](double v) { ir.time_tolerance = v; }},
        {"time_tolerance", [&](double v) { ir.time_tolerance = v; }},
        {"threshold_of_horizontal_propagation_distance",
         [&](double v) { ir.range_tolerance = v; }},
        {"range_tolerance", [&](double v) { ir.range_tolerance = v; }},
        {"initial_depth_step", [&](double v) { ir.initial_depth_step = v; }},
        {"mean_speed", [&](double v) { ir.mean_speed = v; }},
        {"max_iterations", [&](double v) { ir.max_iterations = as_int(v); }},
        {"rng_seed",
         [&](double v) {
             if (v != std::floor(v) || v < 0 || v > 0x1p53)
                 throw Error(ErrorCode::parse_error,
                             fmt::format("seed must be an integer in [0, 2^53], got {}", v));
             sc.rng_seed = static_cast<std::uint64_t>(v);
         }},
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty())
            continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos)
        {
            throw Error(ErrorCode::parse_error,
                        fmt::format("scenario line {}: expected 'key = value'", lineno));
        }
        auto key = normalize_key(view.substr(0, eq));
        auto value = detail::parse_double(view.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
        {
            throw Error(ErrorCode::parse_error,
                        fmt::format("scenario line {}: unknown key '{}'", lineno, key));
        }
        if (!value)
        {
            throw Error(ErrorCode::parse_error,
                        fmt::format("scenario line {}: '{}' is not a number",
                                    lineno,
                                    detail::trim(view.substr(eq + 1))));
        }
        try
        {
            it->second(*value);
        }
        catch (const Error& e)
        {
            throw Error(ErrorCode::parse_error,
                        fmt::format("scenario line {}: {}", lineno, e.what()));
        }
    }
    try
    {
        sc.validate();
        ir.validate();
    }
    catch (const Error& e)
    {
        throw Error(ErrorCode::parse_error, e.what());
    }
    if (file.simplify_points < 2)
        throw Error(ErrorCode::parse_error, "simplification needs at least 2 points");
    return file;
}

ScenarioFile load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
    {
        throw Error(ErrorCode::io_error,
                    fmt::format("cannot open '{}'", path.string()));
    }
    return parse_scenario_file(is);
}

}  // namespace uwloc
