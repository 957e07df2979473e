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

// Writes a noiseless measurement set for one target by forward ray tracing
// through a profile, plus the target's true position.
//
// usage: gen_fixture <svp.csv> <measurements.csv> <truth.csv> [x y z]

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <fmt/ostream.h>

#include "uwloc/sim.hpp"

int main(int argc, char** argv)
{
    if (argc != 4 && argc != 7)
    {
        std::cerr << "usage: gen_fixture <svp.csv> <measurements.csv> "
                     "<truth.csv> [x y z]\n";
        return 2;
    }
    try
    {
        auto svp = uwloc::load_profile(argv[1]);
        uwloc::Position target{4200.0, 5600.0, 1375.0};
        if (argc == 7)
            target = {std::atof(argv[4]), std::atof(argv[5]), std::atof(argv[6])};

        auto scenario = uwloc::generate_scenario(uwloc::ScenarioConfig{});
        std::vector<uwloc::Measurement> ms;
        for (const auto* ref : scenario.references())
        {
            if (uwloc::distance(ref->position, target)
                > scenario.config.comm_range)
                continue;
            auto t = uwloc::direct_travel_time(svp, ref->position, target);
            if (!t)
                continue;
            ms.push_back({ref->id, *t, ref->position});
        }

        std::ofstream mos(argv[2], std::ios::binary);
        uwloc::write_measurements(mos, ms);
        std::ofstream tos(argv[3], std::ios::binary);
        fmt::print(tos, "x_m,y_m,z_m\n{},{},{}\n", target.x, target.y, target.z);
        if (!mos || !tos)
        {
            std::cerr << "write failed\n";
            return 1;
        }
        std::cout << ms.size() << " measurements\n";
    }
    catch (const std::exception& e)
    {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
