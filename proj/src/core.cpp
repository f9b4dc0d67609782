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

#include "boltzadj/core.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "boltzadj/errors.hpp"

namespace boltzadj {

Axis parse_axis(std::string_view name) {
    if (name == "x") return Axis::x;
    if (name == "y") return Axis::y;
    if (name == "z") return Axis::z;
    throw ParameterError("axis must be one of x, y, z (got '" + std::string(name) + "')");
}

std::string axis_name(Axis a) {
    switch (a) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
    }
    throw ParameterError("axis index out of range");
}

double InitialConditionParams::operator[](Axis a) const {
    switch (a) {
        case Axis::x: return tx0;
        case Axis::y: return ty0;
        case Axis::z: return tz0;
    }
    throw ParameterError("axis index out of range");
}

double& InitialConditionParams::operator[](Axis a) {
    switch (a) {
        case Axis::x: return tx0;
        case Axis::y: return ty0;
        case Axis::z: return tz0;
    }
    throw ParameterError("axis index out of range");
}

void InitialConditionParams::validate() const {
    for (Axis a : kAllAxes) {
        const double t = (*this)[a];
        if (!(std::isfinite(t) && t > 0.0)) {
            throw ParameterError("initial temperature T" + axis_name(a) +
                                 "0 must be positive (got " + std::to_string(t) + ")");
        }
    }
}

NormalDrawCache NormalDrawCache::sample(std::size_t n, std::uint64_t seed) {
    Engine eng = make_engine(seed, Stream::initial_normals);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec3> draws(n);
    for (auto& d : draws) {
        d.x = normal(eng);
        d.y = normal(eng);
        d.z = normal(eng);
    }
    return NormalDrawCache(std::move(draws));
}

ParticleEnsemble scale_draws(const NormalDrawCache& cache, const InitialConditionParams& params) {
    params.validate();
    const double sx = std::sqrt(params.tx0);
    const double sy = std::sqrt(params.ty0);
    const double sz = std::sqrt(params.tz0);
    ParticleEnsemble ens;
    ens.velocities.reserve(cache.size());
    for (const Vec3& d : cache.draws()) ens.velocities.push_back({sx * d.x, sy * d.y, sz * d.z});
    return ens;
}

InitialSample sample_initial_ensemble(const InitialConditionParams& params, std::size_t n,
                                      std::uint64_t seed) {
    params.validate();
    if (n < 2) throw ParameterError("ensemble needs at least 2 particles");
    InitialSample out;
    out.cache = NormalDrawCache::sample(n, seed);
    out.ensemble = scale_draws(out.cache, params);
    return out;
}

std::vector<Vec3> initial_sensitivity(const NormalDrawCache& cache,
                                      const InitialConditionParams& params, Axis p) {
    params.validate();
    const std::size_t c = index(p);
    if (c > 2) throw ParameterError("axis index out of range");
    // v^p / (2 T_p) = n^p sqrt(T_p) / (2 T_p) = n^p / (2 sqrt(T_p))
    const double scale = 1.0 / (2.0 * std::sqrt(params[p]));
    std::vector<Vec3> out(cache.size());
    const auto draws = cache.draws();
    for (std::size_t i = 0; i < draws.size(); ++i) out[i][c] = draws[i][c] * scale;
    return out;
}

VelocityPair collide_pair(const Vec3& v, const Vec3& v1, const Vec3& sigma) {
    const Vec3 mean = 0.5 * (v + v1);
    const Vec3 half = (0.5 * norm(v - v1)) * sigma;
    return {mean + half, mean - half};
}

std::optional<Vec3> relative_direction(const Vec3& v, const Vec3& v1) {
    const Vec3 d = v - v1;
    const double len = norm(d);
    if (!(len >= kDegenerateRelativeSpeed)) return std::nullopt;
    return d / len;
}

VelocityPair apply_A(const Vec3& sigma, const Vec3& alpha_hat, const Vec3& a, const Vec3& b) {
    const Vec3 mean = 0.5 * (a + b);
    const Vec3 t = (0.5 * dot(alpha_hat, a - b)) * sigma;
    return {mean + t, mean - t};
}

VelocityPair apply_B(const Vec3& sigma, const Vec3& alpha_hat, const Vec3& a, const Vec3& b) {
    const Vec3 mean = 0.5 * (a + b);
    const Vec3 t = (0.5 * dot(sigma, a - b)) * alpha_hat;
    return {mean + t, mean - t};
}

Vec3 sample_unit_sphere(Engine& eng) {
    const double cos_theta = 2.0 * uniform01(eng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform01(eng);
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    Vec3 s{sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
    // renormalize so |sigma| = 1 to rounding
    return s / norm(s);
}

}  // namespace boltzadj
