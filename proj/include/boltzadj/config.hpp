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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "boltzadj/continuous_grid.hpp"
#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/objectives.hpp"
#include "boltzadj/optimize.hpp"
#include "boltzadj/validation.hpp"

namespace boltzadj {

struct MethodConfig {
    /// adjoint_dsmc | continuous_particle | continuous_grid | fd
    std::string kind = "adjoint_dsmc";
    FdOptions fd;
};

struct OptimizeConfig {
    std::vector<Axis> free_axes;
    std::vector<double> alpha0;
    OptOptions options;
    std::string gradient_method = "adjoint_dsmc";
};

struct ValidateConfig {
    /// Any of conservation, frozen_log, duality, bridge, agreement.
    std::vector<std::string> suites = {"conservation", "frozen_log", "duality", "bridge", "agreement"};
    std::size_t conservation_seeds = 10;
    std::size_t frozen_log_n = 1000;
    std::size_t frozen_log_seeds = 5;
    std::size_t frozen_log_particles = 10;
    double frozen_log_eps = 1e-5;
    std::size_t duality_n = 1000;
    /// Replicas for the adjoint vs particle comparison.
    std::size_t agreement_samples = 10;
    /// Particles for the agreement suite; 0 keeps simulation.N.
    std::size_t agreement_n = 0;
    bool agreement_grid = true;
    std::size_t bridge_n_min = 200;
    double bridge_min_fraction = 0.95;
    /// Log to check in the duality suite instead of a fresh run.
    std::optional<std::filesystem::path> collision_log;
};

struct RunConfig {
    SimConfig sim;
    ObjectiveAdapter objective = ObjectiveAdapter::moment2(Axis::x);
    std::optional<MethodConfig> method;
    GridSchemeOptions grid;
    std::optional<OptimizeConfig> optimize;
    ValidateConfig validate;

    OptProblem problem() const;
};

/// Parses the YAML text; unknown keys and bad values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace boltzadj
