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

// Runs the command-line tool as a subprocess.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

namespace {

struct Run
{
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    std::string cmd = std::string(UWLOC_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe))
        out += buf;
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch()
{
    auto dir = std::filesystem::temp_directory_path() / "uwloc_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write(const std::string& name, const std::string& text)
{
    auto p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const std::string data = UWLOC_DATA_DIR;
const std::string svp = data + "/canonical_svp.csv";

}  // namespace

TEST_CASE("trace")
{
    auto iso = write("iso.csv", "depth_m,speed_mps\n0,1500\n1000,1500\n");
    auto r = run("trace " + iso + " --theta 45 --from 0 --to 1000");
    CHECK(r.code == 0);
    CHECK(r.out == "t=0.942809042 h=1000.000000000\n");

    r = run("trace " + iso + " --theta 90 --from 0 --to 1000");
    CHECK(r.code == 0);
    CHECK(r.out.find("h=0.000000000") != std::string::npos);

    auto up = write("up.csv", "0,1480\n1000,1500\n");
    r = run("trace " + up + " --theta 5 --from 0 --to 1000");
    CHECK(r.code == 2);
    CHECK(r.out.find("9.366789 deg") != std::string::npos);

    r = run("trace /nonexistent.csv --theta 45 --from 0 --to 10");
    CHECK(r.code == 1);
    auto bad = write("bad.csv", "0,1500\n10,abc\n");
    r = run("trace " + bad + " --theta 45 --from 0 --to 10");
    CHECK(r.code == 1);
}

TEST_CASE("solve")
{
    auto iso = write("iso.csv", "0,1500\n1000,1500\n");
    auto r = run("solve " + iso + " time 0.942809042 --from 0 --to 1000");
    CHECK(r.code == 0);
    CHECK(r.out == "theta0_deg=45.000000\n");

    r = run("solve " + iso + " range 0 --from 0 --to 1000");
    CHECK(r.out == "theta0_deg=90.000000\n");

    r = run("solve " + iso + " time 0.5 --from 0 --to 1000");
    CHECK(r.code == 2);
    CHECK(r.out.find("unreachable") != std::string::npos);

    // round trip through the refracting profile, upward ray
    auto t = run("trace " + svp + " --theta 37.5 --from 2200 --to 40");
    REQUIRE(t.code == 0);
    auto tval = t.out.substr(2, t.out.find(' ') - 2);
    auto hval = t.out.substr(t.out.find("h=") + 2);
    hval.pop_back();
    auto a = run("solve " + svp + " time " + tval + " --from 2200 --to 40 --tol 1e-9");
    CHECK(a.out.find("theta0_deg=37.500000") != std::string::npos);
    auto b = run("solve " + svp + " range " + hval + " --from 2200 --to 40 --tol 1e-7");
    CHECK(b.out.find("theta0_deg=37.500000") != std::string::npos);
}

TEST_CASE("simplify")
{
    auto two = write("two.csv", "depth_m,speed_mps\n0,1500\n100,1480\n");
    auto out = (scratch() / "two_out.csv").string();
    auto r = run("simplify " + two + " " + out + " --points 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("rmse=0.000000") != std::string::npos);
    CHECK(slurp(out) == slurp(two));

    auto kink = write("kink.csv", "depth_m,speed_mps\n0,1500\n100,1480\n200,1490\n");
    r = run("simplify " + kink + " " + out + " --points 3");
    CHECK(slurp(out) == slurp(kink));

    r = run("simplify " + svp + " " + out + " --points 8");
    CHECK(r.code == 0);
    CHECK(r.out.find("points=8 rmse=0.221") != std::string::npos);
    std::istringstream lines(slurp(out));
    int n = 0;
    for (std::string l; std::getline(lines, l);)
        ++n;
    CHECK(n == 9);

    r = run("simplify " + svp + " " + out + " --rmse 0.5");
    CHECK(r.code == 0);
    r = run("simplify " + svp + " " + out);
    CHECK(r.code == 2);
    r = run("simplify " + svp + " " + out + " --points 40");
    CHECK(r.code == 2);
}

TEST_CASE("localize")
{
    auto r = run("localize " + svp + " " + data + "/fixtures/noiseless_measurements.csv -v");
    CHECK(r.code == 0);
    CHECK(r.out.find("iter 1 loss_before=") != std::string::npos);
    double x = 0, y = 0, z = 0;
    auto pos = r.out.find("\nx=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::sscanf(r.out.c_str() + pos + 1, "x=%lf y=%lf z=%lf", &x, &y, &z) == 3);
    CHECK(std::hypot(x - 4200, y - 5600, z - 1375) < 0.5);

    auto three = write("three.csv", "ref_x,ref_y,ref_z,one_way_time_s\n0,0,0,1\n"
                                    "1000,0,0,1\n0,1000,0,1\n");
    r = run("localize " + svp + " " + three);
    CHECK(r.code == 2);
}

TEST_CASE("experiment is reproducible")
{
    auto cfg = write("small.cfg", "target_nodes_to_be_located = 8\nrng_seed = 3\n");
    auto d1 = (scratch() / "run1").string();
    auto d2 = (scratch() / "run2").string();
    auto r1 = run("experiment " + cfg + " " + svp + " " + d1 + " --omit-timing --threads 1");
    auto r2 = run("experiment " + cfg + " " + svp + " " + d2 + " --omit-timing --threads 2");
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(slurp(d1 + "/targets.csv") == slurp(d2 + "/targets.csv"));
    auto summary = slurp(d1 + "/summary.csv");
    CHECK(summary.rfind("method,mean_rmse_m,std_m,mean_wall_us\n", 0) == 0);

    auto r3 = run("experiment " + cfg + " " + svp + " " + d2 + " --omit-timing --seed 4");
    CHECK(r3.code == 0);
    CHECK(slurp(d1 + "/targets.csv") != slurp(d2 + "/targets.csv"));

    auto odd = write("odd.cfg", "surface_buoys = 24\n");
    CHECK(run("experiment " + odd + " " + svp + " " + d1).code == 2);
    auto bad = write("bad.cfg", "surface_buoys = many\n");
    CHECK(run("experiment " + bad + " " + svp + " " + d1).code == 1);
}

TEST_CASE("benchmark and usage errors")
{
    auto r = run("benchmark " + svp + " --repeats 1 --targets 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("speedup=") != std::string::npos);

    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("trace " + svp).code == 2);
    CHECK(run("--help").code == 0);
}
