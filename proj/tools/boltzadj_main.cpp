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

// boltzadj: forward | gradient | optimize | validate
//
// Exit codes: 0 ok, 1 tolerance failure, 2 usage, config or I/O error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "boltzadj/app.hpp"
#include "boltzadj/errors.hpp"

namespace {

constexpr int kExitTolerance = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string log_level = "info";
};

void set_threads(int requested) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("BOLTZ_ADJ_THREADS")) n = std::atoi(env);
    }
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int run(const std::string& command, const Options& opt) {
    using namespace boltzadj;
    RunConfig cfg = load_config(opt.config);
    if (opt.seed) cfg.sim.seed = *opt.seed;
    const std::optional<std::filesystem::path> out =
        opt.out.empty() ? std::nullopt : std::optional<std::filesystem::path>(opt.out);

    if (command == "forward") {
        if (!out) throw ConfigError("forward needs --out DIR");
        cmd_forward(cfg, *out);
        return 0;
    }
    if (command == "gradient") {
        std::cout << cmd_gradient(cfg).to_json() << '\n';
        return 0;
    }
    if (command == "optimize") {
        const OptHistory h = cmd_optimize(cfg, out);
        if (!out) std::cout << h.to_json() << '\n';
        return 0;
    }
    const ValidationReport rep = cmd_validate(cfg, out);
    std::cout << rep.to_json() << '\n';
    for (const std::string& f : rep.failures()) std::cerr << "FAILED " << f << '\n';
    return rep.passed() ? 0 : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adjoint DSMC for the homogeneous Boltzmann equation"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "output directory");
    app.add_option("--seed", opt.seed, "overrides simulation.seed");
    app.add_option("--threads", opt.threads, "worker threads (default: BOLTZ_ADJ_THREADS or all cores)");
    app.add_option("--log-level", opt.log_level, "trace | debug | info | warn | error | off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
    for (const char* name : {"forward", "gradient", "optimize", "validate"}) app.add_subcommand(name);
    app.get_subcommand("forward")->description("run DSMC, write moments, collision log and final ensemble");
    app.get_subcommand("gradient")->description("print a gradient report as JSON");
    app.get_subcommand("optimize")->description("steepest descent with Armijo backtracking");
    app.get_subcommand("validate")->description("run the validation suites");
    app.fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    auto logger = spdlog::stderr_color_mt("boltzadj");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(opt.log_level));
    set_threads(opt.threads);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const boltzadj::Error& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return kExitUsage;
    }
}
