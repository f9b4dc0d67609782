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

#include "boltzadj/app.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "boltzadj/adjoint_dsmc.hpp"
#include "boltzadj/continuous_grid.hpp"
#include "boltzadj/continuous_particle.hpp"
#include "boltzadj/errors.hpp"
#include "boltzadj/io.hpp"
#include "boltzadj/rng.hpp"
#include "boltzadj/validation.hpp"

namespace boltzadj {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::array<double, 3> method_gradient(const std::string& method, const SimConfig& sim,
                                      const ObjectiveAdapter& obj, const GridSchemeOptions& grid) {
    if (method == "adjoint_dsmc") {
        return adjoint_gradient_from_run(run_forward(sim), sim.initial, obj);
    }
    if (method == "continuous_particle") {
        return continuous_particle_gradient_from_run(run_forward(sim), sim.initial, obj);
    }
    const GradientReport r = continuous_grid_gradient(sim, obj, grid);
    return {r.values[0], r.values[1], r.values[2]};
}

}  // namespace

std::vector<MomentSnapshot> cmd_forward(const RunConfig& cfg, const fs::path& out_dir) {
    ensure_dir(out_dir);
    spdlog::info("forward: N = {}, dt = {}, T = {}, seed = {}", cfg.sim.n, cfg.sim.dt, cfg.sim.t_final,
                 cfg.sim.seed);
    const ForwardRunResult run = run_forward(cfg.sim);
    write_text_file(out_dir / kMomentsFile, moments_csv(run.moment_history));
    save_collision_log(out_dir / kCollisionLogFile, run.log);
    save_ensemble(out_dir / kFinalEnsembleFile, run.final_ensemble);
    const MomentSnapshot& last = run.moment_history.back();
    spdlog::info("forward: T_x(T) = {:.6f}, m4_x(T) = {:.6f}", last.temperature[0], last.m4[0]);
    return run.moment_history;
}

GradientReport cmd_gradient(const RunConfig& cfg) {
    if (!cfg.method) throw ConfigError("gradient needs a method block");
    const MethodConfig& m = *cfg.method;
    if (m.kind == "continuous_grid" && !cfg.objective.is_moment()) {
        throw ConfigError("method continuous_grid currently supports moment objectives only, got objective " +
                          cfg.objective.name());
    }
    if (m.kind == "fd") {
        FdOptions opt = m.fd;
        opt.error_stencil = opt.samples >= 2;
        std::vector<FDGradientReport> per_axis;
        for (Axis a : kAllAxes) {
            spdlog::info("fd: axis {} ({} samples, delta_alpha = {}, crn = {})", axis_name(a), opt.samples,
                         opt.delta_alpha, opt.crn);
            per_axis.push_back(fd_gradient(cfg.sim, cfg.objective, a, opt));
        }
        GradientReport rep = to_gradient_report(per_axis, cfg.sim);
        if (opt.samples < 2) rep.errors.clear();
        return rep;
    }

    const std::size_t ms = m.fd.samples;
    std::array<std::vector<double>, 3> samples;
    for (std::size_t s = 0; s < ms; ++s) {
        SimConfig sim = cfg.sim;
        sim.seed = replica_seed(cfg.sim.seed, s);
        spdlog::info("{}: replica {} of {} (seed {})", m.kind, s + 1, ms, sim.seed);
        const auto g = method_gradient(m.kind, sim, cfg.objective, cfg.grid);
        for (std::size_t c = 0; c < 3; ++c) samples[c].push_back(g[c]);
    }
    GradientReport rep;
    rep.objective = cfg.objective.name();
    rep.method = m.kind;
    rep.n = cfg.sim.n;
    rep.seed = cfg.sim.seed;
    rep.samples = ms;
    for (Axis a : kAllAxes) {
        const auto& col = samples[index(a)];
        rep.alpha_names.push_back(alpha_name(a));
        if (ms >= 2) {
            const MeanError me = mean_and_error(col);
            rep.values.push_back(me.mean);
            rep.errors.push_back(me.error);
        } else {
            rep.values.push_back(col[0]);
        }
    }
    return rep;
}

OptHistory cmd_optimize(const RunConfig& cfg, const std::optional<fs::path>& out_dir) {
    if (!cfg.optimize) throw ConfigError("optimize needs an optimize block");
    const OptimizeConfig& oc = *cfg.optimize;
    const OptProblem problem = cfg.problem();
    spdlog::info("optimize: objective {}, {} free parameter(s), seed policy {}", cfg.objective.name(),
                 oc.free_axes.size(), seed_policy_name(oc.options.seed_policy));
    OptHistory hist = steepest_descent(problem, oc.alpha0, oc.options);
    const OptRecord& last = hist.records.back();
    spdlog::info("optimize: {} iteration(s), J = {:.6g}, |grad J| = {:.3g}", last.iter, last.value, last.grad_norm);
    if (out_dir) {
        ensure_dir(*out_dir);
        write_text_file(*out_dir / kHistoryCsvFile, hist.to_csv());
        write_text_file(*out_dir / kHistoryJsonFile, hist.to_json() + "\n");
    }
    return hist;
}

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

bool ValidationReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    for (const SuiteResult& s : suites) {
        for (const CheckResult& c : s.checks) {
            if (!c.passed) {
                out.push_back(s.name + ": " + c.what + ": observed " + format_double(c.observed) + ", expected <= " +
                              format_double(c.expected));
            }
        }
    }
    return out;
}

std::string ValidationReport::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["passed"] = passed();
    auto suites_j = nlohmann::ordered_json::array();
    for (const SuiteResult& s : suites) {
        nlohmann::ordered_json sj;
        sj["name"] = s.name;
        sj["passed"] = s.passed();
        auto checks = nlohmann::ordered_json::array();
        for (const CheckResult& c : s.checks) {
            checks.push_back({{"what", c.what}, {"observed", c.observed}, {"expected", c.expected}, {"passed", c.passed}});
        }
        sj["checks"] = std::move(checks);
        suites_j.push_back(std::move(sj));
    }
    j["suites"] = std::move(suites_j);
    return j.dump(indent);
}

namespace {

CheckResult at_most(std::string what, double observed, double bound) {
    return {std::move(what), observed, bound, observed <= bound};
}

SuiteResult suite_conservation(const RunConfig& cfg) {
    SuiteResult r{"conservation", {}};
    double mom = 0.0, en = 0.0;
    for (std::size_t s = 0; s < cfg.validate.conservation_seeds; ++s) {
        SimConfig sim = cfg.sim;
        sim.seed = replica_seed(cfg.sim.seed, s);
        const ConservationResult c = conservation_drift(sim);
        mom = std::max(mom, c.momentum_drift);
        en = std::max(en, c.energy_drift);
    }
    r.checks.push_back(at_most("max relative momentum drift", mom, 1e-12));
    r.checks.push_back(at_most("max relative energy drift", en, 1e-12));
    return r;
}

SuiteResult suite_frozen_log(const RunConfig& cfg) {
    const ValidateConfig& v = cfg.validate;
    SuiteResult r{"frozen_log", {}};
    double worst = 0.0;
    for (std::size_t s = 0; s < v.frozen_log_seeds; ++s) {
        SimConfig sim = cfg.sim;
        sim.n = v.frozen_log_n;
        sim.seed = replica_seed(cfg.sim.seed, s);
        const ForwardRunResult run = run_forward(sim);
        for (std::size_t q = 0; q < v.frozen_log_particles; ++q) {
            const std::size_t i = (q * sim.n) / v.frozen_log_particles + s;
            const Axis c = kAllAxes[(q + s) % 3];
            const FrozenLogResult fl = frozen_log_check(run, cfg.objective, i % sim.n, v.frozen_log_eps, c);
            worst = std::max(worst, fl.rel_error);
        }
    }
    r.checks.push_back(at_most("max relative error of adjoint vs replay finite difference", worst, 1e-6));
    return r;
}

SuiteResult suite_duality(const RunConfig& cfg) {
    SuiteResult r{"duality", {}};
    CollisionLog log;
    if (cfg.validate.collision_log) {
        log = load_collision_log(*cfg.validate.collision_log);
    } else {
        SimConfig sim = cfg.sim;
        sim.n = cfg.validate.duality_n;
        log = run_forward(sim).log;
    }
    r.checks.push_back(at_most("relative pairing defect", duality_defect(log, cfg.sim.seed), 1e-10));
    return r;
}

SuiteResult suite_agreement(const RunConfig& cfg, const GridComparison* grid,
                            std::vector<TableRow>& table) {
    const ValidateConfig& v = cfg.validate;
    SuiteResult r{"agreement", {}};
    std::array<std::vector<double>, 3> adj, part;
    for (std::size_t s = 0; s < v.agreement_samples; ++s) {
        SimConfig sim = cfg.sim;
        if (v.agreement_n > 0) sim.n = v.agreement_n;
        sim.seed = replica_seed(cfg.sim.seed, s);
        const ForwardRunResult run = run_forward(sim);
        const auto a = adjoint_gradient_from_run(run, sim.initial, cfg.objective);
        const auto p = continuous_particle_gradient_from_run(run, sim.initial, cfg.objective);
        for (std::size_t c = 0; c < 3; ++c) {
            adj[c].push_back(a[c]);
            part[c].push_back(p[c]);
        }
    }
    for (Axis ax : kAllAxes) {
        const std::size_t c = index(ax);
        const MeanError a = mean_and_error(adj[c]);
        const MeanError p = mean_and_error(part[c]);
        const std::string q = "d" + cfg.objective.name() + "/d" + alpha_name(ax);
        table.push_back({q + " adjoint_dsmc", a.mean, a.error});
        table.push_back({q + " continuous_particle", p.mean, p.error});
        // the radii are two standard errors
        const double combined = std::hypot(a.error, p.error) / 2.0;
        r.checks.push_back(at_most(q + ": |particle - adjoint| in combined standard errors",
                                   std::fabs(p.mean - a.mean) / combined, 3.0));
    }
    if (grid) {
        const Axis ax = cfg.objective.axis();
        const double a = grid->adjoint[0][index(ax)];
        const double g = grid->grid[0][index(ax)];
        const double tol = cfg.objective.kind() == ObjectiveKind::moment2 ? 0.10 : 0.15;
        const std::string q = "d" + cfg.objective.name() + "/d" + alpha_name(ax);
        table.push_back({q + " continuous_grid", g, 0.0});
        r.checks.push_back(at_most(q + ": |grid - adjoint| / |adjoint|", std::fabs(g - a) / std::fabs(a), tol));
    }
    return r;
}

SuiteResult suite_bridge(const RunConfig& cfg, const GridComparison& gc, const std::optional<fs::path>& out_dir) {
    const ValidateConfig& v = cfg.validate;
    SuiteResult r{"bridge", {}};
    const BridgeResult fin = bridge_check(gc.run.final_ensemble.velocities, gc.adjoint_final[0].gammas,
                                          gc.grid_final[0], v.bridge_n_min);
    double scale = 0.0;
    for (const BridgeBin& b : fin.bins) {
        for (double x : b.adjoint) scale = std::max(scale, std::fabs(x));
    }
    double worst = 0.0;
    for (const BridgeBin& b : fin.bins) {
        const double bound = bridge_final_bound(gc.kernels[0], gc.grid_final[0].grid, b.velocity, scale);
        for (std::size_t c = 0; c < 3; ++c) worst = std::max(worst, std::fabs(b.adjoint[c] - b.grid[c]) / bound);
    }
    r.checks.push_back(at_most("k = M: max |bin difference| / discretization bound", worst, 1.0));
    const BridgeResult ini = bridge_check(gc.run.initial.velocities, gc.adjoint_initial[0].gammas,
                                          gc.grid_initial[0], v.bridge_n_min);
    r.checks.push_back({"k = 0: fraction of bins within 3 standard errors", ini.fraction_within(3.0),
                        v.bridge_min_fraction, ini.fraction_within(3.0) >= v.bridge_min_fraction});
    r.checks.push_back({"k = 0: bins with enough particles", static_cast<double>(ini.bins.size()), 1.0,
                        !ini.bins.empty()});
    if (out_dir) {
        write_text_file(*out_dir / "bridge_final.csv", bridge_csv(fin));
        write_text_file(*out_dir / "bridge_initial.csv", bridge_csv(ini));
    }
    return r;
}

}  // namespace

ValidationReport cmd_validate(const RunConfig& cfg, const std::optional<fs::path>& out_dir) {
    if (out_dir) ensure_dir(*out_dir);
    const auto& suites = cfg.validate.suites;
    auto wants = [&](const char* s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };

    // one grid solve serves both the bridge and the grid agreement check
    std::unique_ptr<GridComparison> grid;
    const bool need_grid = wants("bridge") || (wants("agreement") && cfg.validate.agreement_grid);
    if (need_grid && !cfg.objective.is_moment()) {
        throw ConfigError("the bridge and grid agreement checks need a moment objective, got " + cfg.objective.name());
    }
    if (need_grid) {
        spdlog::info("validate: grid solve at n_grid = {}", cfg.grid.n_grid);
        const std::array<ObjectiveAdapter, 1> objs{cfg.objective};
        grid = std::make_unique<GridComparison>(run_grid_comparison(cfg.sim, objs, cfg.grid));
    }

    ValidationReport rep;
    std::vector<TableRow> table;
    for (const std::string& s : suites) {
        spdlog::info("validate: suite {}", s);
        if (s == "conservation") rep.suites.push_back(suite_conservation(cfg));
        if (s == "frozen_log") rep.suites.push_back(suite_frozen_log(cfg));
        if (s == "duality") rep.suites.push_back(suite_duality(cfg));
        if (s == "agreement") {
            rep.suites.push_back(suite_agreement(cfg, cfg.validate.agreement_grid ? grid.get() : nullptr, table));
        }
        if (s == "bridge") rep.suites.push_back(suite_bridge(cfg, *grid, out_dir));
        spdlog::info("validate: suite {} {}", s, rep.suites.back().passed() ? "passed" : "FAILED");
    }
    if (out_dir) {
        if (!table.empty()) write_text_file(*out_dir / "agreement.csv", table_csv(table));
        write_text_file(*out_dir / "validation.json", rep.to_json() + "\n");
    }
    return rep;
}

}  // namespace boltzadj
