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
#include <optional>
#include <string>
#include <vector>

#include "boltzadj/config.hpp"
#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/optimize.hpp"
#include "boltzadj/report.hpp"

namespace boltzadj {

inline constexpr const char* kMomentsFile = "moments.csv";
inline constexpr const char* kCollisionLogFile = "collision_log.bin";
inline constexpr const char* kFinalEnsembleFile = "final_ensemble.bin";
inline constexpr const char* kHistoryCsvFile = "history.csv";
inline constexpr const char* kHistoryJsonFile = "history.json";

/// Writes moments.csv, collision_log.bin and final_ensemble.bin into out_dir.
/// Returns the moment history.
std::vector<MomentSnapshot> cmd_forward(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// One forward run and the configured backward method (or the FD loop).
/// With method.Ms > 1 the non-FD methods average over replica seeds.
GradientReport cmd_gradient(const RunConfig& cfg);

/// Writes history.csv and history.json when out_dir is given.
OptHistory cmd_optimize(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir);

struct CheckResult {
    std::string what;
    double observed = 0.0;
    double expected = 0.0;  // bound the observation is held to
    bool passed = false;
};

struct SuiteResult {
    std::string name;
    std::vector<CheckResult> checks;
    bool passed() const;
};

struct ValidationReport {
    std::vector<SuiteResult> suites;
    bool passed() const;
    std::string to_json(int indent = 2) const;
    /// One line per failed check.
    std::vector<std::string> failures() const;
};

/// Runs the suites listed in cfg.validate; CSV tables go to out_dir if given.
ValidationReport cmd_validate(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir);

}  // namespace boltzadj
