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

/// Discrete adjoint vectors gamma_{k,i}, one per particle.
struct AdjointEnsemble {
    std::vector<Vec3> gammas;
    std::size_t time_index = 0;

    std::size_t size() const { return gammas.size(); }
};

/// gamma_{F,i} = -N dJ/dv_{F,i}.
AdjointEnsemble final_condition(const ObjectiveAdapter& obj, const ParticleEnsemble& final);

/// One step back through the pairs of forward step k (in place):
///   gamma_k       = (g + gt)/2 + ((g - gt).sigma / 2) alpha_hat
///   gamma_tilde_k = (g + gt)/2 - ((g - gt).sigma / 2) alpha_hat
/// Throws ParameterError if a record indexes past the ensemble.
void backward_step(AdjointEnsemble& adj, std::span<const CollisionPairRecord> records);

using BackwardStepFn = std::function<void(AdjointEnsemble&, std::span<const CollisionPairRecord>)>;
/// Called with the adjoint at k = M and after each backward step.
using AdjointObserver = std::function<void(const AdjointEnsemble&)>;

/// Marches from k = M down to stop_k. `step_fn` replaces backward_step when
/// set (used by mutation tests).
AdjointEnsemble run_adjoint(AdjointEnsemble adj, const CollisionLog& log, std::size_t stop_k = 0,
                            const BackwardStepFn& step_fn = {},
                            const AdjointObserver& observer = {});

/// -(1/N) sum_i gamma_{0,i} . dv_{0,i}/dalpha.
double gradient_component(const AdjointEnsemble& adj0, std::span<const Vec3> sensitivity);

/// dJ/dT_p for the requested axes.
GradientReport gradient(const AdjointEnsemble& adj0, const NormalDrawCache& cache,
                        const InitialConditionParams& params, std::span<const Axis> axes);

/// Gradient with respect to all three temperatures for one finished forward run.
std::array<double, 3> adjoint_gradient_from_run(const ForwardRunResult& run,
                                                const InitialConditionParams& params,
                                                const ObjectiveAdapter& obj);

/// Forward run, adjoint solve and gradient assembly in one call.
GradientReport adjoint_dsmc_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj);

/// Parameter labels "Tx0", "Ty0", "Tz0".
std::string alpha_name(Axis a);

}  // namespace boltzadj
