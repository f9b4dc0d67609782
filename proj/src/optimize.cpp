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

#include "boltzadj/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "boltzadj/adjoint_dsmc.hpp"
#include "boltzadj/continuous_particle.hpp"
#include "boltzadj/errors.hpp"
#include "boltzadj/io.hpp"
#include "boltzadj/rng.hpp"

namespace boltzadj {

SeedPolicy parse_seed_policy(std::string_view name) {
    if (name == "fixed") return SeedPolicy::fixed;
    if (name == "fresh") return SeedPolicy::fresh;
    throw ConfigError("unknown seed_policy '" + std::string(name) + "' (expected fixed | fresh)");
}

std::string seed_policy_name(SeedPolicy p) { return p == SeedPolicy::fixed ? "fixed" : "fresh"; }

std::uint64_t seed_for_iteration(std::uint64_t base, SeedPolicy policy, std::size_t iter) {
    return policy == SeedPolicy::fixed ? base : replica_seed(base, iter);
}

void OptOptions::validate() const {
    if (!(c1 > 0.0 && c1 < 1.0)) throw ParameterError("armijo c1 must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("backtracking factor must lie in (0, 1)");
    if (!(s0 > 0.0)) throw ParameterError("initial step must be positive");
    if (!(floor > 0.0)) throw ParameterError("positivity floor must be positive");
    if (!(tol >= 0.0)) throw ParameterError("tolerance must be non-negative");
}

namespace {

double norm(std::span<const double> g) {
    double s = 0.0;
    for (double x : g) s += x * x;
    return std::sqrt(s);
}

}  // namespace

OptHistory steepest_descent(const EvalFn& eval, const ValueFn& value, std::vector<double> x0,
                            const OptOptions& opt, std::uint64_t base_seed,
                            std::vector<std::string> names) {
    opt.validate();
    if (x0.empty()) throw ParameterError("no free parameters");
    for (double x : x0) {
        if (!(x >= opt.floor)) throw ParameterError("initial point violates the positivity floor");
    }
    if (names.empty()) {
        for (std::size_t i = 0; i < x0.size(); ++i) names.push_back("a" + std::to_string(i));
    }
    OptHistory hist;
    hist.names = std::move(names);
    hist.seed_policy = opt.seed_policy;

    std::vector<double> x = std::move(x0);
    double s_init = opt.s0;
    std::size_t stalls = 0;
    double g0 = 0.0;
    for (std::size_t it = 0;; ++it) {
        OptRecord rec;
        rec.iter = it;
        rec.seed = seed_for_iteration(base_seed, opt.seed_policy, it);
        const Evaluation e = eval(x, rec.seed);
        if (e.gradient.size() != x.size()) throw ParameterError("gradient size mismatch");
        rec.alpha = x;
        rec.value = e.value;
        rec.gradient = e.gradient;
        rec.grad_norm = norm(e.gradient);
        if (it == 0) g0 = rec.grad_norm;

        if (it == opt.max_iters || rec.grad_norm <= opt.tol * g0) {
            hist.converged = rec.grad_norm <= opt.tol * g0;
            hist.records.push_back(std::move(rec));
            break;
        }

        double s = s_init;
        bool accepted = false;
        std::vector<double> trial(x.size());
        for (std::size_t m = 0; m <= opt.m_max; ++m) {
            double decrease = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                trial[i] = std::max(opt.floor, x[i] - s * e.gradient[i]);
                decrease += e.gradient[i] * (x[i] - trial[i]);
            }
            if (decrease > 0.0 && value(trial, rec.seed) <= e.value - opt.c1 * decrease) {
                accepted = true;
                break;
            }
            s *= opt.beta;
        }
        if (accepted) {
            rec.step = s;
            x = trial;
            stalls = 0;
        } else {
            rec.stalled = true;
            if (opt.seed_policy == SeedPolicy::fresh && ++stalls >= opt.stall_limit) {
                s_init *= 0.5;
                stalls = 0;
            }
        }
        hist.records.push_back(std::move(rec));
    }
    return hist;
}

std::string OptHistory::to_csv() const {
    std::ostringstream os;
    os << "iter";
    for (const auto& n : names) os << ',' << n;
    os << ",J,gradnorm,step\n";
    for (const OptRecord& r : records) {
        os << r.iter;
        for (double a : r.alpha) os << ',' << format_double(a);
        os << ',' << format_double(r.value) << ',' << format_double(r.grad_norm) << ','
           << format_double(r.step) << '\n';
    }
    return os.str();
}

std::string OptHistory::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["names"] = names;
    j["seed_policy"] = seed_policy_name(seed_policy);
    j["converged"] = converged;
    j["iterations"] = records.empty() ? 0 : records.back().iter;
    if (!records.empty()) {
        j["final_alpha"] = records.back().alpha;
        j["final_J"] = records.back().value;
        j["final_gradnorm"] = records.back().grad_norm;
    }
    auto rows = nlohmann::ordered_json::array();
    for (const OptRecord& r : records) {
        nlohmann::ordered_json row;
        row["iter"] = r.iter;
        row["alpha"] = r.alpha;
        row["J"] = r.value;
        row["gradient"] = r.gradient;
        row["gradnorm"] = r.grad_norm;
        row["step"] = r.step;
        row["seed"] = r.seed;
        row["stalled"] = r.stalled;
        rows.push_back(std::move(row));
    }
    j["history"] = std::move(rows);
    return j.dump(indent);
}

void OptProblem::validate() const {
    if (free_axes.empty()) throw ConfigError("optimization needs at least one free axis");
    for (std::size_t i = 0; i < free_axes.size(); ++i) {
        for (std::size_t j = i + 1; j < free_axes.size(); ++j) {
            if (free_axes[i] == free_axes[j]) throw ConfigError("free axes must be distinct");
        }
    }
    if (gradient_method != "adjoint_dsmc" && gradient_method != "continuous_particle") {
        throw ConfigError("optimization supports gradient methods adjoint_dsmc and continuous_particle, got '" +
                          gradient_method + "'");
    }
}

InitialConditionParams OptProblem::params_at(std::span<const double> alpha) const {
    if (alpha.size() != free_axes.size()) throw ParameterError("alpha size does not match free axes");
    InitialConditionParams p = sim.initial;
    for (std::size_t i = 0; i < alpha.size(); ++i) p[free_axes[i]] = alpha[i];
    return p;
}

OptHistory steepest_descent(const OptProblem& problem, std::vector<double> alpha0,
                            const OptOptions& opt) {
    problem.validate();
    auto config_at = [&](std::span<const double> a, std::uint64_t seed) {
        SimConfig c = problem.sim;
        c.initial = problem.params_at(a);
        c.seed = seed;
        return c;
    };
    const EvalFn eval = [&](std::span<const double> a, std::uint64_t seed) {
        const SimConfig c = config_at(a, seed);
        const ForwardRunResult run = run_forward(c);
        const std::array<double, 3> g =
            problem.gradient_method == "adjoint_dsmc"
                ? adjoint_gradient_from_run(run, c.initial, problem.objective)
                : continuous_particle_gradient_from_run(run, c.initial, problem.objective);
        Evaluation e;
        e.value = problem.objective.evaluate(run.final_ensemble.velocities);
        for (Axis ax : problem.free_axes) e.gradient.push_back(g[index(ax)]);
        return e;
    };
    const ValueFn value = [&](std::span<const double> a, std::uint64_t seed) {
        const ForwardRunResult run = run_forward(config_at(a, seed));
        return problem.objective.evaluate(run.final_ensemble.velocities);
    };
    std::vector<std::string> names;
    for (Axis ax : problem.free_axes) names.push_back(alpha_name(ax));
    return steepest_descent(eval, value, std::move(alpha0), opt, problem.sim.seed, std::move(names));
}

}  // namespace boltzadj
