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

#include "boltzadj/continuous_particle.hpp"

#include "boltzadj/adjoint_dsmc.hpp"
#include "boltzadj/errors.hpp"
#include "boltzadj/scattered_interpolation.hpp"

namespace boltzadj {

ScalarAdjointEnsemble final_condition_scalar(const ObjectiveAdapter& obj,
                                             const ParticleEnsemble& final) {
    return {obj.adjoint_final_scalar(final.velocities), final.time_index};
}

void backward_step_particle(ScalarAdjointEnsemble& adj, std::span<const Vec3> v_k,
                            std::span<const CollisionPairRecord> records,
                            const ConditionalExpectation& expectation) {
    const std::size_t n = adj.size();
    if (v_k.size() != n) throw ParameterError("velocity snapshot does not match adjoint size");
    // expectations read the k+1 values, so evaluate all before writing
    std::vector<double> e_i(records.size());
    std::vector<double> e_j(records.size());
    const auto count = static_cast<std::ptrdiff_t>(records.size());
    for (const CollisionPairRecord& r : records) {
        if (r.i >= n || r.j >= n) throw ParameterError("collision record index out of range");
    }
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t q = 0; q < count; ++q) {
        const CollisionPairRecord& r = records[static_cast<std::size_t>(q)];
        e_i[static_cast<std::size_t>(q)] = expectation(v_k[r.i]);
        e_j[static_cast<std::size_t>(q)] = expectation(v_k[r.j]);
    }
    for (std::size_t q = 0; q < records.size(); ++q) {
        const CollisionPairRecord& r = records[q];
        const double sum = adj.values[r.i] + adj.values[r.j];
        adj.values[r.i] = sum - e_j[q];
        adj.values[r.j] = sum - e_i[q];
    }
    if (adj.time_index > 0) --adj.time_index;
}

ScalarAdjointEnsemble run_continuous_particle(ScalarAdjointEnsemble adj,
                                              const ParticleEnsemble& final,
                                              const CollisionLog& log, ParticleSchemeStats* stats) {
    if (adj.size() != final.size() || final.size() != log.n) {
        throw ParameterError("adjoint, ensemble and log sizes disagree");
    }
    std::vector<Vec3> v_next = final.velocities;
    for (std::size_t k = log.steps.size(); k > 0; --k) {
        const auto& records = log.steps[k - 1];
        std::vector<Vec3> v_prev = v_next;
        unstep(v_prev, records);

        const ScatteredInterpolant interp(v_next, adj.values);
        std::size_t fallbacks = 0;
        auto expectation = [&](const Vec3& q) {
            ScatteredInterpolant::QueryInfo info;
            const double val = interp.evaluate(q, &info);
            if (info.method == ScatteredInterpolant::Method::idw) {
#pragma omp atomic
                ++fallbacks;
            }
            return val;
        };
        backward_step_particle(adj, v_prev, records, expectation);
        adj.time_index = k - 1;
        if (stats) {
            stats->queries += 2 * records.size();
            stats->fallbacks += fallbacks;
        }
        v_next = std::move(v_prev);
    }
    return adj;
}

double gradient_particle(std::span<const double> gamma0, std::span<const Vec3> v0,
                         const InitialConditionParams& params, Axis p) {
    if (gamma0.size() != v0.size()) throw ParameterError("gamma and velocity counts differ");
    params.validate();
    const double tp = params[p];
    const std::size_t c = index(p);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < v0.size(); ++i) {
        const double w = (v0[i][c] * v0[i][c] / tp - 1.0) / (2.0 * tp);
        acc += gamma0[i] * w;
    }
    return -static_cast<double>(acc / static_cast<long double>(v0.size()));
}

std::array<double, 3> continuous_particle_gradient_from_run(const ForwardRunResult& run,
                                                            const InitialConditionParams& params,
                                                            const ObjectiveAdapter& obj,
                                                            ParticleSchemeStats* stats) {
    const ScalarAdjointEnsemble adj0 = run_continuous_particle(
        final_condition_scalar(obj, run.final_ensemble), run.final_ensemble, run.log, stats);
    std::array<double, 3> g{};
    for (Axis a : kAllAxes) {
        g[index(a)] = gradient_particle(adj0.values, run.initial.velocities, params, a);
    }
    return g;
}

GradientReport continuous_particle_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj) {
    const ForwardRunResult run = run_forward(cfg);
    const auto g = continuous_particle_gradient_from_run(run, cfg.initial, obj);
    GradientReport rep;
    rep.objective = obj.name();
    rep.method = "continuous_particle";
    rep.n = cfg.n;
    rep.seed = cfg.seed;
    for (Axis a : kAllAxes) {
        rep.alpha_names.push_back(alpha_name(a));
        rep.values.push_back(g[index(a)]);
    }
    return rep;
}

}  // namespace boltzadj
