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


#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include <doctest.h>

#include "boltzadj/io.hpp"
#include "boltzadj/report.hpp"
#include "common.hpp"

#ifndef BOLTZADJ_CLI
#error "BOLTZADJ_CLI must point at the command-line binary"
#endif

using namespace boltzadj;

namespace {

int run(const std::string& args, const std::filesystem::path& dir) {
    const std::string cmd = std::string(BOLTZADJ_CLI) + " " + args + " > " + (dir / "stdout.txt").string() +
                            " 2> " + (dir / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("forward with T = 0 writes one row of initial moments") {
    const auto dir = test::scratch_dir("cli_t0");
    write_text_file(dir / "c.yaml", "simulation: {N: 1000, T: 0.0, seed: 3}\n");
    REQUIRE(run("--config " + (dir / "c.yaml").string() + " --out " + (dir / "out").string() + " forward", dir) == 0);
    const auto rows = parse_moments_csv(read_text_file(dir / "out" / "moments.csv"));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].k == 0);
    CHECK(load_collision_log(dir / "out" / "collision_log.bin").steps.empty());
    CHECK(load_ensemble(dir / "out" / "final_ensemble.bin").size() == 1000);
}

TEST_CASE("forward output is deterministic") {
    const auto dir = test::scratch_dir("cli_det");
    write_text_file(dir / "c.yaml", "simulation: {N: 2000, seed: 3}\n");
    const std::string cfg = "--config " + (dir / "c.yaml").string();
    REQUIRE(run(cfg + " --out " + (dir / "a").string() + " forward", dir) == 0);
    REQUIRE(run(cfg + " --threads 2 --out " + (dir / "b").string() + " forward", dir) == 0);
    for (const char* f : {"moments.csv", "collision_log.bin", "final_ensemble.bin"}) {
        CHECK(read_text_file(dir / "a" / f) == read_text_file(dir / "b" / f));
    }
    REQUIRE(run(cfg + " --seed 4 --out " + (dir / "c").string() + " forward", dir) == 0);
    CHECK(read_text_file(dir / "a" / "moments.csv") != read_text_file(dir / "c" / "moments.csv"));
}

TEST_CASE("usage and configuration errors exit with 2") {
    const auto dir = test::scratch_dir("cli_err");
    write_text_file(dir / "bad.yaml", "simulation: {N: 1000, bogus: 1}\n");
    CHECK(run("--config " + (dir / "bad.yaml").string() + " gradient", dir) == 2);
    CHECK(read_text_file(dir / "stderr.txt").find("unknown key 'bogus'") != std::string::npos);
    CHECK(run("--config " + (dir / "missing.yaml").string() + " forward", dir) == 2);
    CHECK(run("forward", dir) == 2);
    write_text_file(dir / "ok.yaml", "simulation: {N: 1000}\n");
    CHECK(run("--config " + (dir / "ok.yaml").string() + " frobnicate", dir) == 2);
    // gradient without a method block
    CHECK(run("--config " + (dir / "ok.yaml").string() + " gradient", dir) == 2);
    write_text_file(dir / "grid.yaml", "simulation: {N: 1000}\nobjective: {kind: matching}\nmethod: {kind: continuous_grid}\n");
    CHECK(run("--config " + (dir / "grid.yaml").string() + " gradient", dir) == 2);
    CHECK(read_text_file(dir / "stderr.txt").find("moment objectives only") != std::string::npos);
}

TEST_CASE("validate reports a missing collision log") {
    const auto dir = test::scratch_dir("cli_log");
    write_text_file(dir / "v.yaml", "simulation: {N: 1000}\nvalidate: {suites: [duality], collision_log: " +
                                        (dir / "nope.bin").string() + "}\n");
    CHECK(run("--config " + (dir / "v.yaml").string() + " validate", dir) == 2);
    CHECK(read_text_file(dir / "stderr.txt").find("file not found") != std::string::npos);
}

TEST_CASE("gradient and small validate runs") {
    const auto dir = test::scratch_dir("cli_grad");
    write_text_file(dir / "g.yaml", "simulation: {N: 20000, seed: 5}\nmethod: {kind: adjoint_dsmc}\n");
    REQUIRE(run("--config " + (dir / "g.yaml").string() + " gradient", dir) == 0);
    const GradientReport g = GradientReport::from_json(read_text_file(dir / "stdout.txt"));
    CHECK(g.method == "adjoint_dsmc");
    CHECK(g.values[0] == doctest::Approx(0.5723).epsilon(0.05));

    write_text_file(dir / "v.yaml", "simulation: {N: 5000}\nvalidate: {suites: [conservation, duality, frozen_log], "
                                    "conservation_seeds: 2, frozen_log_seeds: 1}\n");
    CHECK(run("--config " + (dir / "v.yaml").string() + " --out " + (dir / "val").string() + " validate", dir) == 0);
    CHECK(std::filesystem::exists(dir / "val" / "validation.json"));

    write_text_file(dir / "o.yaml", "simulation: {N: 2000}\nobjective: {kind: matching}\n"
                                    "optimize: {free: [Ty0], max_iters: 0}\n");
    REQUIRE(run("--config " + (dir / "o.yaml").string() + " --out " + (dir / "opt").string() + " optimize", dir) == 0);
    const std::string csv = read_text_file(dir / "opt" / "history.csv");
    CHECK(csv.rfind("iter,Ty0,J,gradnorm,step\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
