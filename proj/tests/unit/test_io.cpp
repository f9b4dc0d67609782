/*
   Copyright 2026 The boltzadj Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <fstream>
#include <sstream>

#include <doctest.h>

#include "boltzadj/errors.hpp"
#include "boltzadj/io.hpp"
#include "boltzadj/report.hpp"
#include "common.hpp"

using namespace boltzadj;

namespace {

std::string log_bytes(const CollisionLog& log) {
    std::ostringstream os;
    write_collision_log(os, log);
    return os.str();
}

std::string ensemble_bytes(const ParticleEnsemble& e) {
    std::ostringstream os;
    write_ensemble(os, e);
    return os.str();
}

}  // namespace

TEST_CASE("collision log round-trips byte for byte") {
    const ForwardRunResult r = run_forward(test::relaxation(1000, 3));
    const std::string a = log_bytes(r.log);
    CHECK(a.substr(0, 5) == "BADJ1");
    std::istringstream is(a);
    const CollisionLog back = read_collision_log(is);
    CHECK(back.n == 1000);
    CHECK(back.dt == 0.1);
    CHECK(back.pair_count() == r.log.pair_count());
    CHECK(log_bytes(back) == a);

    const auto dir = test::scratch_dir("io_log");
    save_collision_log(dir / "log.bin", r.log);
    CHECK(log_bytes(load_collision_log(dir / "log.bin")) == a);
}

TEST_CASE("ensemble snapshot round-trips byte for byte") {
    ParticleEnsemble e = sample_initial_ensemble({0.5, 1, 1}, 100, 2).ensemble;
    e.time_index = 7;
    const std::string a = ensemble_bytes(e);
    CHECK(a.substr(0, 6) == "BADJE1");
    std::istringstream is(a);
    const ParticleEnsemble back = read_ensemble(is);
    CHECK(back.time_index == 7);
    CHECK(back.velocities == e.velocities);
    CHECK(ensemble_bytes(back) == a);
}

TEST_CASE("bad files are reported") {
    const auto dir = test::scratch_dir("io_bad");
    try {
        load_collision_log(dir / "missing.bin");
        FAIL("no exception");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("file not found") != std::string::npos);
    }
    std::istringstream wrong("BADJE1........");
    CHECK_THROWS_AS(read_collision_log(wrong), IoError);
    const ForwardRunResult r = run_forward(test::relaxation(100, 3));
    const std::string full = log_bytes(r.log);
    std::istringstream truncated(full.substr(0, full.size() - 5));
    CHECK_THROWS_AS(read_collision_log(truncated), IoError);
}

TEST_CASE("moments CSV round-trips") {
    const ForwardRunResult r = run_forward(test::relaxation(1000, 3));
    const std::string csv = moments_csv(r.moment_history);
    CHECK(csv.rfind("k,t,px,py,pz,Tx,Ty,Tz,m4x,m4y,m4z\n", 0) == 0);
    const auto back = parse_moments_csv(csv);
    REQUIRE(back.size() == 21);
    CHECK(back[20].temperature == r.moment_history[20].temperature);
    CHECK(moments_csv(back) == csv);
    CHECK_THROWS_AS(parse_moments_csv("a,b\n1,2\n"), IoError);
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("gradient report JSON round-trips") {
    GradientReport g;
    g.objective = "T_x";
    g.alpha_names = {"Tx0", "Ty0", "Tz0"};
    g.values = {0.5723, 0.2138, 0.2138};
    g.errors = {1e-3, 2e-3, 3e-3};
    g.method = "fd";
    g.n = 1000;
    g.seed = 5;
    g.samples = 4;
    g.e_fd = {1, 2, 3};
    g.e_rand = {4, 5, 6};
    g.dalpha_star = {0.1, 0.2, 0.3};
    g.delta_alpha = 0.1;
    g.crn = false;
    const std::string text = g.to_json();
    const GradientReport back = GradientReport::from_json(text);
    CHECK(back.values == g.values);
    CHECK(back.crn == g.crn);
    CHECK(back.to_json() == text);
    CHECK_THROWS_AS(GradientReport::from_json("{\"values\": 3}"), IoError);
}
