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

#include "boltzadj/adjoint_dsmc.hpp"

#include <string>

#include "boltzadj/errors.hpp"

namespace boltzadj {

std::string alpha_name(Axis a) { return "T" + axis_name(a) + "0"; }

AdjointEnsemble final_condition(const ObjectiveAdapter& obj, const ParticleEnsemble& final) {
    return {obj.adjoint_final_vec(final.velocities), final.time_index};
}

void backward_step(AdjointEnsemble& adj, std::span<const CollisionPairRecord> records) {
    const std::size_t n = adj.size();
    for (const CollisionPairRecord& r : records) {
        if (r.i >= n || r.j >= n) {
            throw ParameterError("collision record index out of range (" + std::to_string(r.i) +
                                 ", " + std::to_string(r.j) + ") for N = " + std::to_string(n));
        }
    }
    std::vector<Vec3>& g = adj.gammas;
    const auto count = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < count; ++q) {
        const CollisionPairRecord& r = records[static_cast<std::size_t>(q)];
        const VelocityPair out = apply_B(r.sigma, r.alpha_hat, g[r.i], g[r.j]);
        g[r.i] = out.first;
        g[r.j] = out.second;
    }
    if (adj.time_index > 0) --adj.time_index;
}

AdjointEnsemble run_adjoint(AdjointEnsemble adj, const CollisionLog& log, std::size_t stop_k,
                            const BackwardStepFn& step_fn, const AdjointObserver& observer) {
    if (adj.size() != log.n) throw ParameterError("adjoint ensemble size does not match log");
    const std::size_t m = log.steps.size();
    if (stop_k > m) throw ParameterError("adjoint stop index beyond the logged horizon");
    adj.time_index = m;
    if (observer) observer(adj);
    for (std::size_t k = m; k > stop_k; --k) {
        if (step_fn) {
            step_fn(adj, log.steps[k - 1]);
        } else {
            backward_step(adj, log.steps[k - 1]);
        }
        adj.time_index = k - 1;
        if (observer) observer(adj);
    }
    return adj;
}

double gradient_component(const AdjointEnsemble& adj0, std::span<const Vec3> sensitivity) {
    if (sensitivity.size() != adj0.size()) {
        throw ParameterError("sensitivity length does not match the adjoint ensemble");
    }
    long double acc = 0.0L;
    for (std::size_t i = 0; i < adj0.size(); ++i) acc += dot(adj0.gammas[i], sensitivity[i]);
    return -static_cast<double>(acc / static_cast<long double>(adj0.size()));
}

GradientReport gradient(const AdjointEnsemble& adj0, const NormalDrawCache& cache,
                        const InitialConditionParams& params, std::span<const Axis> axes) {
    GradientReport rep;
    rep.method = "adjoint_dsmc";
    rep.n = adj0.size();
    for (Axis a : axes) {
        rep.alpha_names.push_back(alpha_name(a));
        rep.values.push_back(gradient_component(adj0, initial_sensitivity(cache, params, a)));
    }
    return rep;
}

std::array<double, 3> adjoint_gradient_from_run(const ForwardRunResult& run,
                                                const InitialConditionParams& params,
                                                const ObjectiveAdapter& obj) {
    const AdjointEnsemble adj0 = run_adjoint(final_condition(obj, run.final_ensemble), run.log);
    const GradientReport rep = gradient(adj0, run.cache, params, kAllAxes);
    return {rep.values[0], rep.values[1], rep.values[2]};
}

GradientReport adjoint_dsmc_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj) {
    const ForwardRunResult run = run_forward(cfg);
    const AdjointEnsemble adj0 = run_adjoint(final_condition(obj, run.final_ensemble), run.log);
    GradientReport rep = gradient(adj0, run.cache, cfg.initial, kAllAxes);
    rep.objective = obj.name();
    rep.seed = cfg.seed;
    return rep;
}

}  // namespace boltzadj
