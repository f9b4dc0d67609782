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
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "boltzadj/core.hpp"

namespace boltzadj {

struct SimConfig {
    std::size_t n = 100000;
    double dt = 0.1;
    double t_final = 2.0;
    double mu = 1.0;
    /// Constant collision kernel; mu = rho * integral of q over the sphere.
    double q_const = 1.0 / (4.0 * std::numbers::pi);
    std::uint64_t seed = 1;
    InitialConditionParams initial;

    /// Throws ParameterError on N < 2, dt*mu >= 1, or T/dt not integral.
    void validate() const;
    std::size_t steps() const;
    /// ceil(N dt mu) rounded up to even, capped at the largest even <= N.
    std::size_t collisions_per_step() const;
};

struct CollisionPairRecord {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    Vec3 sigma;
    Vec3 alpha_hat;
};

using CollisionStep = std::vector<CollisionPairRecord>;

struct CollisionLog {
    std::size_t n = 0;
    double dt = 0.0;
    double mu = 0.0;
    std::vector<CollisionStep> steps;

    double t_final() const { return dt * static_cast<double>(steps.size()); }
    std::size_t pair_count() const;
};

enum class MomentKind { p, T, m4 };

struct MomentSnapshot {
    std::size_t k = 0;
    double t = 0.0;
    std::array<double, 3> p{};
    std::array<double, 3> temperature{};
    std::array<double, 3> m4{};
};

/// (1/N) sum of v^l, (v^l)^2 or (v^l)^4.
double moment(std::span<const Vec3> v, MomentKind kind, Axis l);
MomentSnapshot moments(std::span<const Vec3> v, std::size_t k = 0, double t = 0.0);

/// Total momentum and twice the kinetic energy, accumulated in extended precision.
struct Invariants {
    Vec3 momentum;
    double energy = 0.0;
};
Invariants invariants(std::span<const Vec3> v);

/// One Nanbu-Babovsky round on ens (in place). The step index ens.time_index
/// selects the random streams and is advanced by one.
CollisionStep step(ParticleEnsemble& ens, const SimConfig& cfg);

struct ForwardRunResult {
    ParticleEnsemble initial;
    NormalDrawCache cache;
    ParticleEnsemble final_ensemble;
    CollisionLog log;
    std::vector<MomentSnapshot> moment_history;
};

/// Called with the ensemble at k = 0 and after every step.
using StepObserver = std::function<void(const ParticleEnsemble&)>;

ForwardRunResult run_forward(const SimConfig& cfg, const StepObserver& observer = {});

/// Same as run_forward but starting from a supplied initial ensemble.
ForwardRunResult run_forward_from(const SimConfig& cfg, InitialSample start,
                                  const StepObserver& observer = {});

/// Re-runs the logged pairs and scattering directions on a (possibly
/// perturbed) initial ensemble, recomputing relative directions from the
/// current velocities.
ParticleEnsemble replay_forward(const ParticleEnsemble& initial, const CollisionLog& log);

/// Pushes a velocity perturbation forward through the logged linear maps apply_A.
std::vector<Vec3> propagate_tangent(std::vector<Vec3> delta, const CollisionLog& log);

/// Undo one logged step in place with apply_B.
void unstep(std::span<Vec3> v, std::span<const CollisionPairRecord> records);

/// Marches final back to step k with apply_B on each logged collision.
ParticleEnsemble reconstruct_velocities_backward(const ParticleEnsemble& final,
                                                 const CollisionLog& log, std::size_t k);

}  // namespace boltzadj
