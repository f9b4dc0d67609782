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

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "boltzadj/core.hpp"
#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/objectives.hpp"
#include "boltzadj/report.hpp"

namespace boltzadj {

/// Scalar continuous-adjoint values carried on the forward particles.
struct ScalarAdjointEnsemble {
    std::vector<double> values;
    std::size_t time_index = 0;

    std::size_t size() const { return values.size(); }
};

/// gamma_i = -r(v_{F,i}), with misfit weights frozen at `final`.
ScalarAdjointEnsemble final_condition_scalar(const ObjectiveAdapter& obj,
                                             const ParticleEnsemble& final);

/// E[gamma(t_{k+1}) | v = query].
using ConditionalExpectation = std::function<double(const Vec3& query)>;

/// One backward step of the particle scheme (in place). `v_k` are the
/// pre-collision velocities of step k; for a pair (j, j1)
///   g_j  <- g_j + g_j1 - E[g | v = v_k[j1]]
///   g_j1 <- g_j + g_j1 - E[g | v = v_k[j]]
/// Non-colliding values are untouched.
void backward_step_particle(ScalarAdjointEnsemble& adj, std::span<const Vec3> v_k,
                            std::span<const CollisionPairRecord> records,
                            const ConditionalExpectation& expectation);

struct ParticleSchemeStats {
    std::size_t queries = 0;
    std::size_t fallbacks = 0;
};

/// Full backward sweep from t = T to t = 0. Velocities at earlier steps are
/// rebuilt from the final ensemble with apply_B; the interpolant at each step
/// is built on (V_{k+1}, Gamma_{k+1}).
ScalarAdjointEnsemble run_continuous_particle(ScalarAdjointEnsemble adj,
                                              const ParticleEnsemble& final,
                                              const CollisionLog& log,
                                              ParticleSchemeStats* stats = nullptr);

/// -(1/N) sum_i gamma_i(0) (1/(2 T_p)) ((v_{0,i}^p)^2 / T_p - 1).
double gradient_particle(std::span<const double> gamma0, std::span<const Vec3> v0,
                         const InitialConditionParams& params, Axis p);

std::array<double, 3> continuous_particle_gradient_from_run(const ForwardRunResult& run,
                                                            const InitialConditionParams& params,
                                                            const ObjectiveAdapter& obj,
                                                            ParticleSchemeStats* stats = nullptr);

GradientReport continuous_particle_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj);

}  // namespace boltzadj
