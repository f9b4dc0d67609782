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

#include "boltzadj/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "boltzadj/errors.hpp"
#include "boltzadj/io.hpp"

namespace boltzadj {

namespace {

void check_keys(const YAML::Node& node, std::string_view block, std::initializer_list<std::string_view> allowed) {
    if (!node.IsMap()) throw ConfigError("'" + std::string(block) + "' must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string list;
            for (std::string_view a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
            throw ConfigError("unknown key '" + key + "' in " + std::string(block) + " (allowed: " + list + ")");
        }
    }
}

template <typename T>
void read(const YAML::Node& node, std::string_view block, const char* key, T& out) {
    const YAML::Node v = node[key];
    if (!v) return;
    try {
        out = v.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("bad value for " + std::string(block) + "." + key);
    }
}

Axis read_axis(const YAML::Node& v, std::string_view where) {
    try {
        return parse_axis(v.as<std::string>());
    } catch (const YAML::Exception&) {
        throw ConfigError("bad axis in " + std::string(where));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
}

// "Tx0" | "Ty0" | "Tz0"
Axis parse_alpha(const std::string& s) {
    if (s.size() == 3 && s[0] == 'T' && s[2] == '0') {
        try {
            return parse_axis(s.substr(1, 1));
        } catch (const ParameterError&) {
        }
    }
    throw ConfigError("unknown parameter '" + s + "' (expected Tx0, Ty0 or Tz0)");
}

ObjectiveAdapter read_objective(const YAML::Node& node) {
    check_keys(node, "objective", {"kind", "axis", "d_obs"});
    std::string kind = "moment2";
    read(node, "objective", "kind", kind);
    ObjectiveKind k{};
    try {
        k = ObjectiveAdapter::parse_kind(kind);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("objective.kind: ") + e.what());
    }
    const Axis axis = node["axis"] ? read_axis(node["axis"], "objective.axis") : Axis::x;
    switch (k) {
        case ObjectiveKind::moment2: return ObjectiveAdapter::moment2(axis);
        case ObjectiveKind::moment4: return ObjectiveAdapter::moment4(axis);
        case ObjectiveKind::matching: return ObjectiveAdapter::matching();
        case ObjectiveKind::least_squares: {
            std::vector<double> d;
            read(node, "objective", "d_obs", d);
            if (d.size() != 3) throw ConfigError("objective.d_obs needs three values for least_squares");
            return ObjectiveAdapter::least_squares({d[0], d[1], d[2]});
        }
    }
    throw ConfigError("unreachable objective kind");
}

}  // namespace

OptProblem RunConfig::problem() const {
    if (!optimize) throw ConfigError("config has no optimize block");
    OptProblem p;
    p.sim = sim;
    p.objective = objective;
    p.free_axes = optimize->free_axes;
    p.gradient_method = optimize->gradient_method;
    return p;
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    RunConfig cfg;
    if (!root || root.IsNull()) return cfg;
    check_keys(root, "config", {"simulation", "initial_condition", "objective", "method", "grid", "optimize", "validate"});

    if (const YAML::Node s = root["simulation"]) {
        check_keys(s, "simulation", {"N", "dt", "T", "mu", "seed"});
        read(s, "simulation", "N", cfg.sim.n);
        read(s, "simulation", "dt", cfg.sim.dt);
        read(s, "simulation", "T", cfg.sim.t_final);
        read(s, "simulation", "mu", cfg.sim.mu);
        read(s, "simulation", "seed", cfg.sim.seed);
    }
    if (const YAML::Node ic = root["initial_condition"]) {
        check_keys(ic, "initial_condition", {"Tx0", "Ty0", "Tz0"});
        read(ic, "initial_condition", "Tx0", cfg.sim.initial.tx0);
        read(ic, "initial_condition", "Ty0", cfg.sim.initial.ty0);
        read(ic, "initial_condition", "Tz0", cfg.sim.initial.tz0);
    }
    if (const YAML::Node o = root["objective"]) cfg.objective = read_objective(o);

    if (const YAML::Node m = root["method"]) {
        check_keys(m, "method", {"kind", "delta_alpha", "crn", "Ms"});
        MethodConfig mc;
        read(m, "method", "kind", mc.kind);
        read(m, "method", "delta_alpha", mc.fd.delta_alpha);
        read(m, "method", "crn", mc.fd.crn);
        read(m, "method", "Ms", mc.fd.samples);
        if (mc.kind != "adjoint_dsmc" && mc.kind != "continuous_particle" && mc.kind != "continuous_grid" &&
            mc.kind != "fd") {
            throw ConfigError("method.kind must be adjoint_dsmc, continuous_particle, continuous_grid or fd, got '" +
                              mc.kind + "'");
        }
        if (mc.fd.samples < 1) throw ConfigError("method.Ms must be >= 1");
        cfg.method = mc;
    }
    if (const YAML::Node g = root["grid"]) {
        check_keys(g, "grid", {"n_grid", "n_phi", "n_theta"});
        read(g, "grid", "n_grid", cfg.grid.n_grid);
        read(g, "grid", "n_phi", cfg.grid.n_phi);
        read(g, "grid", "n_theta", cfg.grid.n_theta);
        if (cfg.grid.n_grid < 8) throw ConfigError("grid.n_grid must be >= 8");
        if (cfg.grid.n_phi < 1 || cfg.grid.n_theta < 1) throw ConfigError("grid.n_phi and grid.n_theta must be >= 1");
    }
    if (const YAML::Node op = root["optimize"]) {
        check_keys(op, "optimize", {"free", "alpha0", "c1", "beta", "s0", "m_max", "floor", "tol", "max_iters",
                                    "seed_policy", "gradient_method", "stall_limit"});
        OptimizeConfig oc;
        std::vector<std::string> free;
        read(op, "optimize", "free", free);
        for (const auto& f : free) oc.free_axes.push_back(parse_alpha(f));
        if (oc.free_axes.empty()) throw ConfigError("optimize.free must list at least one of Tx0, Ty0, Tz0");
        read(op, "optimize", "alpha0", oc.alpha0);
        if (oc.alpha0.empty()) {
            for (Axis a : oc.free_axes) oc.alpha0.push_back(cfg.sim.initial[a]);
        }
        if (oc.alpha0.size() != oc.free_axes.size()) {
            throw ConfigError("optimize.alpha0 must have one entry per free parameter");
        }
        read(op, "optimize", "c1", oc.options.c1);
        read(op, "optimize", "beta", oc.options.beta);
        read(op, "optimize", "s0", oc.options.s0);
        read(op, "optimize", "m_max", oc.options.m_max);
        read(op, "optimize", "floor", oc.options.floor);
        read(op, "optimize", "tol", oc.options.tol);
        read(op, "optimize", "max_iters", oc.options.max_iters);
        read(op, "optimize", "stall_limit", oc.options.stall_limit);
        std::string policy = "fresh";
        read(op, "optimize", "seed_policy", policy);
        oc.options.seed_policy = parse_seed_policy(policy);
        read(op, "optimize", "gradient_method", oc.gradient_method);
        try {
            oc.options.validate();
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("optimize: ") + e.what());
        }
        cfg.optimize = oc;
    }
    if (const YAML::Node v = root["validate"]) {
        check_keys(v, "validate", {"suites", "conservation_seeds", "frozen_log_n", "frozen_log_seeds",
                                   "frozen_log_particles", "frozen_log_eps", "duality_n", "agreement_samples",
                                   "agreement_n", "agreement_grid", "bridge_n_min", "bridge_min_fraction",
                                   "collision_log"});
        ValidateConfig& vc = cfg.validate;
        read(v, "validate", "suites", vc.suites);
        for (const auto& s : vc.suites) {
            if (s != "conservation" && s != "frozen_log" && s != "duality" && s != "bridge" && s != "agreement") {
                throw ConfigError("unknown validation suite '" + s + "'");
            }
        }
        read(v, "validate", "conservation_seeds", vc.conservation_seeds);
        read(v, "validate", "frozen_log_n", vc.frozen_log_n);
        read(v, "validate", "frozen_log_seeds", vc.frozen_log_seeds);
        read(v, "validate", "frozen_log_particles", vc.frozen_log_particles);
        read(v, "validate", "frozen_log_eps", vc.frozen_log_eps);
        read(v, "validate", "duality_n", vc.duality_n);
        read(v, "validate", "agreement_samples", vc.agreement_samples);
        read(v, "validate", "agreement_n", vc.agreement_n);
        read(v, "validate", "agreement_grid", vc.agreement_grid);
        read(v, "validate", "bridge_n_min", vc.bridge_n_min);
        read(v, "validate", "bridge_min_fraction", vc.bridge_min_fraction);
        std::string log;
        read(v, "validate", "collision_log", log);
        if (!log.empty()) vc.collision_log = log;
        if (vc.agreement_samples < 2) throw ConfigError("validate.agreement_samples must be >= 2");
    }
    try {
        cfg.sim.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("simulation: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

}  // namespace boltzadj
