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

#include "boltzadj/forward_dsmc.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "boltzadj/errors.hpp"

namespace boltzadj {

namespace {

// ceil() of a product like 1e6 * 0.1 must not pick up the last ulp.
std::size_t guarded_ceil(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace

void SimConfig::validate() const {
    if (n < 2) throw ParameterError("N must be at least 2");
    if (n > 0xffffffffULL) throw ParameterError("N exceeds 32-bit particle index range");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be positive");
    if (!(dt * mu < 1.0)) throw ParameterError("dt * mu must be < 1");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ParameterError("T must be >= 0");
    const double m = t_final / dt;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m)) {
        throw ParameterError("T / dt must be an integer (got " + std::to_string(m) + ")");
    }
    initial.validate();
}

std::size_t SimConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

std::size_t SimConfig::collisions_per_step() const {
    std::size_t nc = guarded_ceil(static_cast<double>(n) * dt * mu);
    if (nc % 2 == 1) ++nc;
    const std::size_t cap = n - n % 2;
    return std::min(nc, cap);
}

std::size_t CollisionLog::pair_count() const {
    std::size_t c = 0;
    for (const auto& s : steps) c += s.size();
    return c;
}

double moment(std::span<const Vec3> v, MomentKind kind, Axis l) {
    const std::size_t c = index(l);
    long double acc = 0.0L;
    for (const Vec3& x : v) {
        const long double a = x[c];
        switch (kind) {
            case MomentKind::p: acc += a; break;
            case MomentKind::T: acc += a * a; break;
            case MomentKind::m4: acc += (a * a) * (a * a); break;
        }
    }
    return v.empty() ? 0.0 : static_cast<double>(acc / static_cast<long double>(v.size()));
}

MomentSnapshot moments(std::span<const Vec3> v, std::size_t k, double t) {
    MomentSnapshot s;
    s.k = k;
    s.t = t;
    std::array<long double, 9> acc{};
    for (const Vec3& x : v) {
        for (std::size_t c = 0; c < 3; ++c) {
            const long double a = x[c];
            const long double a2 = a * a;
            acc[c] += a;
            acc[3 + c] += a2;
            acc[6 + c] += a2 * a2;
        }
    }
    const long double inv = v.empty() ? 0.0L : 1.0L / static_cast<long double>(v.size());
    for (std::size_t c = 0; c < 3; ++c) {
        s.p[c] = static_cast<double>(acc[c] * inv);
        s.temperature[c] = static_cast<double>(acc[3 + c] * inv);
        s.m4[c] = static_cast<double>(acc[6 + c] * inv);
    }
    return s;
}

Invariants invariants(std::span<const Vec3> v) {
    long double px = 0, py = 0, pz = 0, e = 0;
    for (const Vec3& x : v) {
        px += x.x;
        py += x.y;
        pz += x.z;
        e += static_cast<long double>(x.x) * x.x + static_cast<long double>(x.y) * x.y +
             static_cast<long double>(x.z) * x.z;
    }
    return {{static_cast<double>(px), static_cast<double>(py), static_cast<double>(pz)},
            static_cast<double>(e)};
}

CollisionStep step(ParticleEnsemble& ens, const SimConfig& cfg) {
    const std::size_t n = ens.size();
    if (n != cfg.n) throw ParameterError("ensemble size does not match configuration");
    const std::size_t nc = cfg.collisions_per_step();
    const std::uint64_t counter = ens.time_index;

    // partial Fisher-Yates: the first nc entries are a uniform ordered sample
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0U);
    Engine pick = make_engine(cfg.seed, Stream::pair_selection, counter);
    for (std::size_t a = 0; a < nc; ++a) {
        std::uniform_int_distribution<std::size_t> u(a, n - 1);
        std::swap(perm[a], perm[u(pick)]);
    }

    CollisionStep records(nc / 2);
    Engine scatter = make_engine(cfg.seed, Stream::scattering, counter);
    for (std::size_t q = 0; q < records.size(); ++q) {
        records[q].i = perm[2 * q];
        records[q].j = perm[2 * q + 1];
        records[q].sigma = sample_unit_sphere(scatter);
    }

    std::vector<Vec3>& v = ens.velocities;
    const auto count = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < count; ++q) {
        CollisionPairRecord& r = records[static_cast<std::size_t>(q)];
        const Vec3 a = v[r.i];
        const Vec3 b = v[r.j];
        r.alpha_hat = relative_direction(a, b).value_or(r.sigma);
        const VelocityPair out = collide_pair(a, b, r.sigma);
        v[r.i] = out.first;
        v[r.j] = out.second;
    }
    ++ens.time_index;
    return records;
}

ForwardRunResult run_forward_from(const SimConfig& cfg, InitialSample start,
                                  const StepObserver& observer) {
    cfg.validate();
    if (start.ensemble.size() != cfg.n) {
        throw ParameterError("initial ensemble size does not match configuration");
    }
    ForwardRunResult res;
    res.initial = start.ensemble;
    res.initial.time_index = 0;
    res.cache = std::move(start.cache);
    res.log.n = cfg.n;
    res.log.dt = cfg.dt;
    res.log.mu = cfg.mu;

    ParticleEnsemble ens = std::move(start.ensemble);
    ens.time_index = 0;
    const std::size_t m = cfg.steps();
    res.log.steps.reserve(m);
    res.moment_history.reserve(m + 1);
    res.moment_history.push_back(moments(ens.velocities, 0, 0.0));
    if (observer) observer(ens);
    for (std::size_t k = 0; k < m; ++k) {
        res.log.steps.push_back(step(ens, cfg));
        res.moment_history.push_back(
            moments(ens.velocities, k + 1, cfg.dt * static_cast<double>(k + 1)));
        if (observer) observer(ens);
    }
    res.final_ensemble = std::move(ens);
    return res;
}

ForwardRunResult run_forward(const SimConfig& cfg, const StepObserver& observer) {
    cfg.validate();
    return run_forward_from(cfg, sample_initial_ensemble(cfg.initial, cfg.n, cfg.seed), observer);
}

namespace {

void check_log(std::size_t n, const CollisionLog& log) {
    if (n != log.n) throw ParameterError("collision log was recorded for a different N");
}

}  // namespace

ParticleEnsemble replay_forward(const ParticleEnsemble& initial, const CollisionLog& log) {
    check_log(initial.size(), log);
    ParticleEnsemble ens = initial;
    for (const CollisionStep& s : log.steps) {
        for (const CollisionPairRecord& r : s) {
            const VelocityPair out = collide_pair(ens.velocities[r.i], ens.velocities[r.j], r.sigma);
            ens.velocities[r.i] = out.first;
            ens.velocities[r.j] = out.second;
        }
        ++ens.time_index;
    }
    return ens;
}

std::vector<Vec3> propagate_tangent(std::vector<Vec3> delta, const CollisionLog& log) {
    check_log(delta.size(), log);
    for (const CollisionStep& s : log.steps) {
        for (const CollisionPairRecord& r : s) {
            const VelocityPair out = apply_A(r.sigma, r.alpha_hat, delta[r.i], delta[r.j]);
            delta[r.i] = out.first;
            delta[r.j] = out.second;
        }
    }
    return delta;
}

void unstep(std::span<Vec3> v, std::span<const CollisionPairRecord> records) {
    const auto count = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < count; ++q) {
        const CollisionPairRecord& r = records[static_cast<std::size_t>(q)];
        const VelocityPair out = apply_B(r.sigma, r.alpha_hat, v[r.i], v[r.j]);
        v[r.i] = out.first;
        v[r.j] = out.second;
    }
}

ParticleEnsemble reconstruct_velocities_backward(const ParticleEnsemble& final,
                                                 const CollisionLog& log, std::size_t k) {
    check_log(final.size(), log);
    const std::size_t m = log.steps.size();
    if (k > m) throw ParameterError("reconstruction target beyond the logged horizon");
    ParticleEnsemble ens = final;
    for (std::size_t s = m; s > k; --s) unstep(ens.velocities, log.steps[s - 1]);
    ens.time_index = k;
    return ens;
}

}  // namespace boltzadj
