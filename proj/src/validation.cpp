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

#include "boltzadj/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "boltzadj/errors.hpp"
#include "boltzadj/io.hpp"
#include "boltzadj/rng.hpp"

namespace boltzadj {

MeanError mean_and_error(std::span<const double> samples) {
    const std::size_t m = samples.size();
    if (m < 2) throw ParameterError("mean_and_error needs at least two samples");
    // sorted so the result does not depend on sample order
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    long double sum = 0.0L;
    for (double x : s) sum += x;
    const long double mean = sum / static_cast<long double>(m);
    long double ss = 0.0L;
    for (double x : s) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(static_cast<double>(ss / static_cast<long double>(m - 1)));
    return {static_cast<double>(mean), 2.0 * sigma / std::sqrt(static_cast<double>(m))};
}

FdErrorEstimates fd_error_estimates(const std::array<double, 4>& j, double h, double dalpha,
                                    double e_rand_j) {
    if (!(h > 0.0) || !(dalpha > 0.0)) throw ParameterError("stencil spacings must be positive");
    if (e_rand_j < 0.0) throw ParameterError("e_rand_J must be non-negative");
    FdErrorEstimates out;
    out.third_derivative = (-j[0] + 2.0 * j[1] - 2.0 * j[2] + j[3]) / (2.0 * h * h * h);
    const double d3 = std::fabs(out.third_derivative);
    out.e_fd = d3 * dalpha * dalpha / 6.0;
    out.e_rand = e_rand_j / dalpha;
    out.dalpha_star = d3 > 0.0 ? std::cbrt(3.0 * e_rand_j / d3) : std::numeric_limits<double>::infinity();
    return out;
}

namespace {

std::vector<double> evaluate_all(const SimConfig& cfg, std::span<const ObjectiveAdapter> objectives) {
    const ForwardRunResult run = run_forward(cfg);
    std::vector<double> out;
    out.reserve(objectives.size());
    for (const ObjectiveAdapter& o : objectives) out.push_back(o.evaluate(run.final_ensemble.velocities));
    return out;
}

SimConfig shifted(const SimConfig& cfg, Axis p, double delta, std::uint64_t seed) {
    SimConfig c = cfg;
    c.initial[p] += delta;
    c.seed = seed;
    return c;
}

}  // namespace

std::vector<FDGradientReport> fd_gradients(const SimConfig& cfg,
                                           std::span<const ObjectiveAdapter> objectives, Axis p,
                                           const FdOptions& opt) {
    cfg.validate();
    const double da = opt.delta_alpha;
    if (!(da > 0.0)) throw ParameterError("delta_alpha must be positive");
    if (!(da < cfg.initial[p])) {
        throw ParameterError("finite-difference stencil leaves the positive orthant: delta_alpha = " +
                             format_double(da) + " >= " + alpha_name(p) + " = " +
                             format_double(cfg.initial[p]));
    }
    if (opt.samples < 1) throw ParameterError("finite differences need at least one sample");
    if (opt.error_stencil && opt.samples < 2) {
        throw ParameterError("error estimates need at least two samples");
    }
    const std::size_t n_obj = objectives.size();
    const double h = da / 2.0;

    // [objective][sample]
    std::vector<std::vector<double>> grad(n_obj), j_plus(n_obj), j_minus(n_obj);
    std::vector<std::vector<std::array<double, 4>>> stencil(n_obj);
    for (std::size_t s = 0; s < opt.samples; ++s) {
        const std::uint64_t seed_a = replica_seed(cfg.seed, 2 * s);
        const std::uint64_t seed_b = opt.crn ? seed_a : replica_seed(cfg.seed, 2 * s + 1);
        const auto jp = evaluate_all(shifted(cfg, p, +da, seed_a), objectives);
        const auto jm = evaluate_all(shifted(cfg, p, -da, seed_b), objectives);
        std::vector<double> jp_c, jm_c, jph, jmh;
        if (opt.error_stencil) {
            // the third-derivative stencil is always taken with common random numbers
            jp_c = jp;  // already on seed_a
            jm_c = opt.crn ? jm : evaluate_all(shifted(cfg, p, -da, seed_a), objectives);
            jph = evaluate_all(shifted(cfg, p, +h, seed_a), objectives);
            jmh = evaluate_all(shifted(cfg, p, -h, seed_a), objectives);
        }
        for (std::size_t o = 0; o < n_obj; ++o) {
            grad[o].push_back((jp[o] - jm[o]) / (2.0 * da));
            j_plus[o].push_back(jp[o]);
            j_minus[o].push_back(jm[o]);
            if (opt.error_stencil) stencil[o].push_back({jm_c[o], jmh[o], jph[o], jp_c[o]});
        }
    }

    std::vector<FDGradientReport> out;
    for (std::size_t o = 0; o < n_obj; ++o) {
        FDGradientReport r;
        r.objective = objectives[o].name();
        r.axis = p;
        r.delta_alpha = da;
        r.crn = opt.crn;
        r.samples = opt.samples;
        if (opt.samples >= 2) {
            const MeanError g = mean_and_error(grad[o]);
            r.value = g.mean;
            r.error = g.error;
        } else {
            r.value = grad[o][0];
        }
        if (opt.error_stencil) {
            const double e_rand_j =
                0.5 * (mean_and_error(j_plus[o]).error + mean_and_error(j_minus[o]).error);
            std::array<double, 4> mean_j{};
            for (int q = 0; q < 4; ++q) {
                std::vector<double> col;
                for (const auto& st : stencil[o]) col.push_back(st[static_cast<std::size_t>(q)]);
                mean_j[static_cast<std::size_t>(q)] = mean_and_error(col).mean;
            }
            const FdErrorEstimates e = fd_error_estimates(mean_j, h, da, e_rand_j);
            r.e_fd = e.e_fd;
            r.e_rand = e.e_rand;
            r.dalpha_star = e.dalpha_star;
        }
        out.push_back(r);
    }
    return out;
}

FDGradientReport fd_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj, Axis p,
                             const FdOptions& opt) {
    return fd_gradients(cfg, std::span<const ObjectiveAdapter>(&obj, 1), p, opt).front();
}

GradientReport to_gradient_report(std::span<const FDGradientReport> per_axis, const SimConfig& cfg) {
    GradientReport rep;
    rep.method = "fd";
    rep.n = cfg.n;
    rep.seed = cfg.seed;
    for (const FDGradientReport& r : per_axis) {
        rep.objective = r.objective;
        rep.alpha_names.push_back(alpha_name(r.axis));
        rep.values.push_back(r.value);
        rep.errors.push_back(r.error);
        rep.e_fd.push_back(r.e_fd);
        rep.e_rand.push_back(r.e_rand);
        rep.dalpha_star.push_back(r.dalpha_star);
        rep.delta_alpha = r.delta_alpha;
        rep.crn = r.crn;
        rep.samples = r.samples;
    }
    return rep;
}

FrozenLogResult frozen_log_check(const ForwardRunResult& run, const ObjectiveAdapter& obj,
                                 std::size_t i, double eps, Axis component,
                                 const BackwardStepFn& step_fn) {
    const std::size_t n = run.initial.size();
    if (i >= n) throw ParameterError("particle index out of range");
    if (!(eps >= 1e-7 && eps <= 1e-4)) throw ParameterError("eps must lie in [1e-7, 1e-4]");
    const std::size_t c = index(component);

    const AdjointEnsemble adj0 =
        run_adjoint(final_condition(obj, run.final_ensemble), run.log, 0, step_fn);
    FrozenLogResult out;
    out.adjoint = -adj0.gammas[i][c] / static_cast<double>(n);

    // J(+h) - J(-h) on replays of the logged run
    auto central = [&](double h) {
        ParticleEnsemble plus = run.initial;
        ParticleEnsemble minus = run.initial;
        plus.velocities[i][c] += h;
        minus.velocities[i][c] -= h;
        return obj.difference(replay_forward(plus, run.log).velocities,
                              replay_forward(minus, run.log).velocities);
    };
    // fourth-order stencil; exact on the quartic map of a particle that never collides
    out.replay_fd = (8.0 * central(eps) - central(2.0 * eps)) / (12.0 * eps);

    const double scale = std::max(std::fabs(out.adjoint), std::fabs(out.replay_fd));
    out.rel_error = scale > 0.0 ? std::fabs(out.adjoint - out.replay_fd) / scale : 0.0;
    for (const CollisionStep& st : run.log.steps) {
        for (const CollisionPairRecord& r : st) {
            if (r.i == i || r.j == i) out.collided = true;
        }
    }
    return out;
}

FrozenLogResult frozen_log_check(const SimConfig& cfg, const ObjectiveAdapter& obj, std::size_t i,
                                 double eps, Axis component, const BackwardStepFn& step_fn) {
    return frozen_log_check(run_forward(cfg), obj, i, eps, component, step_fn);
}

double duality_defect(const CollisionLog& log, std::uint64_t seed) {
    Engine eng(seed);
    std::normal_distribution<double> normal;
    auto draw = [&] {
        std::vector<Vec3> v(log.n);
        for (Vec3& x : v) x = {normal(eng), normal(eng), normal(eng)};
        return v;
    };
    const std::vector<Vec3> delta0 = draw();
    const std::vector<Vec3> gamma_final = draw();
    const std::vector<Vec3> delta_final = propagate_tangent(delta0, log);
    AdjointEnsemble adj{gamma_final, log.steps.size()};
    const AdjointEnsemble adj0 = run_adjoint(std::move(adj), log);

    long double at_t = 0.0L, at_0 = 0.0L, mag = 0.0L;
    for (std::size_t i = 0; i < log.n; ++i) {
        at_t += dot(gamma_final[i], delta_final[i]);
        at_0 += dot(adj0.gammas[i], delta0[i]);
        mag += std::fabs(dot(adj0.gammas[i], delta0[i]));
    }
    // relative to the sum of magnitudes, since the pairing of random fields nearly cancels
    return static_cast<double>(std::fabs(at_t - at_0) / mag);
}

ConservationResult conservation_drift(const SimConfig& cfg) {
    const ForwardRunResult run = run_forward(cfg);
    const Invariants a = invariants(run.initial.velocities);
    const Invariants b = invariants(run.final_ensemble.velocities);
    const double n = static_cast<double>(run.initial.size());
    const double rms = std::sqrt(a.energy / n);
    ConservationResult out;
    for (std::size_t c = 0; c < 3; ++c) {
        out.momentum_drift = std::max(out.momentum_drift, std::fabs(b.momentum[c] - a.momentum[c]) / (n * rms));
    }
    out.energy_drift = std::fabs(b.energy - a.energy) / a.energy;
    return out;
}

double BridgeResult::fraction_within(double zmax) const {
    if (bins.empty()) return 0.0;
    std::size_t ok = 0;
    for (const BridgeBin& b : bins) {
        if (std::fabs(b.z[0]) <= zmax && std::fabs(b.z[1]) <= zmax && std::fabs(b.z[2]) <= zmax) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(bins.size());
}

BridgeResult bridge_check(std::span<const Vec3> v_k, std::span<const Vec3> gamma_k,
                          const GridField& grid_gamma_k, std::size_t n_min) {
    if (v_k.size() != gamma_k.size()) throw ParameterError("velocity and adjoint counts differ");
    const VelocityGrid& grid = grid_gamma_k.grid;
    const std::array<GridField, 3> grad = gradient_field(grid_gamma_k);
    const auto n = static_cast<long>(grid.n());

    struct Acc {
        std::size_t count = 0;
        std::array<long double, 3> sum_adj{}, sum_grid{}, sum_d{}, sum_d2{};
    };
    std::map<std::size_t, Acc> acc;
    for (std::size_t i = 0; i < v_k.size(); ++i) {
        const Vec3& v = v_k[i];
        std::array<long, 3> idx{};
        bool inside = true;
        for (std::size_t c = 0; c < 3; ++c) {
            idx[c] = std::lround((v[c] - grid.lo()) / grid.dv());
            if (idx[c] < 0 || idx[c] >= n) inside = false;
        }
        if (!inside) continue;
        const std::size_t node = grid.flat(static_cast<std::size_t>(idx[0]), static_cast<std::size_t>(idx[1]),
                                           static_cast<std::size_t>(idx[2]));
        Acc& a = acc[node];
        ++a.count;
        for (std::size_t c = 0; c < 3; ++c) {
            const double g = grad[c].interpolate(v);
            const double d = gamma_k[i][c] - g;
            a.sum_adj[c] += gamma_k[i][c];
            a.sum_grid[c] += g;
            a.sum_d[c] += d;
            a.sum_d2[c] += static_cast<long double>(d) * d;
        }
    }

    BridgeResult out;
    for (const auto& [node, a] : acc) {
        if (a.count < n_min) {
            ++out.skipped;
            continue;
        }
        BridgeBin b;
        b.node = node;
        b.count = a.count;
        b.velocity = grid.node(node);
        const auto m = static_cast<long double>(a.count);
        for (std::size_t c = 0; c < 3; ++c) {
            b.adjoint[c] = static_cast<double>(a.sum_adj[c] / m);
            b.grid[c] = static_cast<double>(a.sum_grid[c] / m);
            const long double mean_d = a.sum_d[c] / m;
            const long double var = std::max(0.0L, (a.sum_d2[c] - m * mean_d * mean_d) / (m - 1));
            b.se[c] = std::sqrt(static_cast<double>(var / m));
            const double diff = static_cast<double>(mean_d);
            out.max_abs_diff = std::max(out.max_abs_diff, std::fabs(diff));
            if (b.se[c] > 0.0) {
                b.z[c] = diff / b.se[c];
            } else {
                b.z[c] = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
            }
            out.max_z = std::max(out.max_z, std::fabs(b.z[c]));
        }
        out.bins.push_back(b);
    }
    return out;
}

std::string bridge_csv(const BridgeResult& r) {
    std::ostringstream os;
    os << "node,vx,vy,vz,count,adj_x,adj_y,adj_z,grid_x,grid_y,grid_z,se_x,se_y,se_z,z_x,z_y,z_z\n";
    for (const BridgeBin& b : r.bins) {
        os << b.node << ',' << format_double(b.velocity.x) << ',' << format_double(b.velocity.y) << ','
           << format_double(b.velocity.z) << ',' << b.count;
        for (const auto* arr : {&b.adjoint, &b.grid, &b.se, &b.z}) {
            for (double x : *arr) os << ',' << format_double(x);
        }
        os << '\n';
    }
    return os.str();
}

double bridge_final_bound(const FinalConditionKernel& kernel, const VelocityGrid& grid,
                          const Vec3& node, double scale) {
    const double h = grid.dv();
    double vmax = 0.0;
    for (std::size_t c = 0; c < 3; ++c) vmax = std::max(vmax, std::fabs(node[c]));
    double c4 = 0.0;
    for (double c : kernel.c4) c4 = std::max(c4, std::fabs(c));
    return 7.0 * c4 * (vmax + h) * h * h + 1e-9 * scale;
}

GridComparison run_grid_comparison(const SimConfig& cfg, std::span<const ObjectiveAdapter> objectives,
                                   const GridSchemeOptions& opt) {
    for (const ObjectiveAdapter& o : objectives) {
        if (!o.is_moment()) {
            throw ParameterError("the grid scheme currently supports moment objectives only, got " + o.name());
        }
    }
    GridComparison out{.run = {},
                       .densities = {VelocityGrid::for_params(opt.n_grid, cfg.initial), {}, 0.0},
                       .kernels = {},
                       .adjoint = {},
                       .grid = {},
                       .adjoint_final = {},
                       .adjoint_initial = {},
                       .grid_final = {},
                       .grid_initial = {}};
    out.run = run_forward(cfg, density_recorder(out.densities));
    const std::size_t m = out.run.log.steps.size();
    for (const ObjectiveAdapter& o : objectives) {
        out.kernels.push_back(o.kernel(out.run.final_ensemble.velocities));
        out.adjoint_final.push_back(final_condition(o, out.run.final_ensemble));
        out.adjoint_initial.push_back(run_adjoint(out.adjoint_final.back(), out.run.log));
        const GradientReport rep = gradient(out.adjoint_initial.back(), out.run.cache, cfg.initial, kAllAxes);
        out.adjoint.push_back({rep.values[0], rep.values[1], rep.values[2]});
    }
    out.grid = continuous_grid_gradients(
        out.densities, out.run.final_ensemble, cfg.initial, objectives, opt, cfg.dt, cfg.mu,
        [&](std::size_t k, std::span<const GridField> gammas) {
            if (k == m) out.grid_final.assign(gammas.begin(), gammas.end());
            if (k == 0) out.grid_initial.assign(gammas.begin(), gammas.end());
        });
    return out;
}

std::string table_csv(std::span<const TableRow> rows) {
    std::ostringstream os;
    os << "quantity,mean,two_se\n";
    for (const TableRow& r : rows) {
        os << r.quantity << ',' << format_double(r.mean) << ',' << format_double(r.error) << '\n';
    }
    return os.str();
}

}  // namespace boltzadj
