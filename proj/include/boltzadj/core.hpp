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
#include <span>
#include <vector>

#include "boltzadj/rng.hpp"
#include "boltzadj/vec3.hpp"

namespace boltzadj {

/// Initial temperatures of the anisotropic Gaussian; the optimization parameter.
struct InitialConditionParams {
    double tx0 = 0.5;
    double ty0 = 1.0;
    double tz0 = 1.0;

    double operator[](Axis a) const;
    double& operator[](Axis a);

    /// Equilibrium temperature (Tx0 + Ty0 + Tz0) / 3.
    double mean_temperature() const { return (tx0 + ty0 + tz0) / 3.0; }

    /// Throws ParameterError unless every temperature is finite and > 0.
    void validate() const;
};

/// N velocity samples standing for f(v, t_k) = (1/N) sum delta(v - v_i).
struct ParticleEnsemble {
    std::vector<Vec3> velocities;
    std::size_t time_index = 0;

    std::size_t size() const { return velocities.size(); }
};

/// Standard-normal draws behind an initial ensemble. Reused when the
/// temperatures change so the samples vary smoothly with the parameters.
class NormalDrawCache {
public:
    NormalDrawCache() = default;
    explicit NormalDrawCache(std::vector<Vec3> draws) : draws_(std::move(draws)) {}

    /// Draws 3N normals from the initial_normals stream of `seed`.
    static NormalDrawCache sample(std::size_t n, std::uint64_t seed);

    std::span<const Vec3> draws() const { return draws_; }
    std::size_t size() const { return draws_.size(); }

private:
    std::vector<Vec3> draws_;
};

struct InitialSample {
    ParticleEnsemble ensemble;
    NormalDrawCache cache;
};

/// v_i = (sqrt(Tx0) n_i^x, sqrt(Ty0) n_i^y, sqrt(Tz0) n_i^z).
ParticleEnsemble scale_draws(const NormalDrawCache& cache, const InitialConditionParams& params);

InitialSample sample_initial_ensemble(const InitialConditionParams& params, std::size_t n,
                                      std::uint64_t seed);

/// dv_i / dT_p = (v_i^p / (2 T_p)) e_p for the cached draws.
std::vector<Vec3> initial_sensitivity(const NormalDrawCache& cache,
                                      const InitialConditionParams& params, Axis p);

struct VelocityPair {
    Vec3 first;
    Vec3 second;
};

/// Post-collision velocities for scattering direction `sigma` (unit).
/// Both outputs share the same mean term.
VelocityPair collide_pair(const Vec3& v, const Vec3& v1, const Vec3& sigma);

/// Relative speeds below this are treated as coincident velocities.
inline constexpr double kDegenerateRelativeSpeed = 1e-14;

/// (v - v1)/|v - v1|, or nullopt when |v - v1| < kDegenerateRelativeSpeed.
std::optional<Vec3> relative_direction(const Vec3& v, const Vec3& v1);

/// Linearized collision map:
///   (a, b) -> ( (a+b)/2 + sigma alpha^T (a-b)/2 , (a+b)/2 - sigma alpha^T (a-b)/2 ).
/// With alpha the relative direction of (a, b) this is the collision itself.
VelocityPair apply_A(const Vec3& sigma, const Vec3& alpha_hat, const Vec3& a, const Vec3& b);

/// Transpose of apply_A (sigma and alpha swap roles). Inverts apply_A on
/// pairs whose difference is parallel to alpha_hat, which is the case for
/// every logged collision.
VelocityPair apply_B(const Vec3& sigma, const Vec3& alpha_hat, const Vec3& a, const Vec3& b);

/// Uniform direction on the unit sphere: cos(theta) then phi from two uniforms.
Vec3 sample_unit_sphere(Engine& eng);

}  // namespace boltzadj
