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

#include "boltzadj/report.hpp"

#include <json.hpp>

#include "boltzadj/errors.hpp"

namespace boltzadj {

std::string GradientReport::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["objective"] = objective;
    j["alpha_names"] = alpha_names;
    j["values"] = values;
    if (!errors.empty()) j["errors"] = errors;
    j["method"] = method;
    j["N"] = n;
    j["seed"] = seed;
    j["samples"] = samples;
    if (delta_alpha) j["delta_alpha"] = *delta_alpha;
    if (crn) j["crn"] = *crn;
    if (!e_fd.empty()) j["e_fd"] = e_fd;
    if (!e_rand.empty()) j["e_rand"] = e_rand;
    if (!dalpha_star.empty()) j["dalpha_star"] = dalpha_star;
    return j.dump(indent);
}

GradientReport GradientReport::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        GradientReport r;
        r.objective = j.at("objective").get<std::string>();
        r.alpha_names = j.at("alpha_names").get<std::vector<std::string>>();
        r.values = j.at("values").get<std::vector<double>>();
        r.method = j.at("method").get<std::string>();
        r.n = j.at("N").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.samples = j.value("samples", std::size_t{1});
        r.errors = j.value("errors", std::vector<double>{});
        r.e_fd = j.value("e_fd", std::vector<double>{});
        r.e_rand = j.value("e_rand", std::vector<double>{});
        r.dalpha_star = j.value("dalpha_star", std::vector<double>{});
        if (j.contains("delta_alpha")) r.delta_alpha = j["delta_alpha"].get<double>();
        if (j.contains("crn")) r.crn = j["crn"].get<bool>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed gradient report: ") + e.what());
    }
}

}  // namespace boltzadj
