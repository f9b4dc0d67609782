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

#include <filesystem>
#include <string>

#include "boltzadj/forward_dsmc.hpp"

namespace boltzadj::test {

/// The relaxation case used throughout: IC (0.5, 1, 1), dt 0.1, T 2, mu 1.
inline SimConfig relaxation(std::size_t n, std::uint64_t seed) {
    SimConfig c;
    c.n = n;
    c.seed = seed;
    return c;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("boltzadj_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Discrete relaxation oracle: each step collides a fraction mu dt of the
/// particles and a collision keeps on average half of a directional
/// anisotropy, so T_l(t_M) = T_M + (T_l0 - T_M) (1 - mu dt / 2)^M.
inline double relaxation_factor(const SimConfig& c) {
    double r = 1.0;
    for (std::size_t k = 0; k < c.steps(); ++k) r *= 1.0 - 0.5 * c.mu * c.dt;
    return r;
}

}  // namespace boltzadj::test
