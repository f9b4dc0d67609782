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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace boltzadj {

/// Components of dJ/dalpha from one method, with optional error fields.
struct GradientReport {
    std::string objective;
    std::vector<std::string> alpha_names;  // "Tx0", "Ty0", "Tz0"
    std::vector<double> values;
    /// Two-standard-error radii when several seeds were averaged.
    std::vector<double> errors;
    std::string method;  // adjoint_dsmc | continuous_particle | continuous_grid | fd
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t samples = 1;

    // finite-difference extras, one per component
    std::vector<double> e_fd;
    std::vector<double> e_rand;
    std::vector<double> dalpha_star;
    std::optional<double> delta_alpha;
    std::optional<bool> crn;

    std::string to_json(int indent = 2) const;
    static GradientReport from_json(const std::string& text);
};

}  // namespace boltzadj
