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

// Python bindings. Axes are passed as "x" | "y" | "z"; velocity arrays come
// back as (N, 3) float64.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "boltzadj/adjoint_dsmc.hpp"
#include "boltzadj/config.hpp"
#include "boltzadj/continuous_grid.hpp"
#include "boltzadj/continuous_particle.hpp"
#include "boltzadj/errors.hpp"
#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/objectives.hpp"
#include "boltzadj/optimize.hpp"
#include "boltzadj/validation.hpp"

namespace py = pybind11;
using namespace boltzadj;

namespace {

py::array_t<double> to_array(std::span<const Vec3> v) {
    py::array_t<double> out({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) a(i, c) = v[i][c];
    }
    return out;
}

std::vector<Vec3> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2 || arr.shape(1) != 3) throw ParameterError("velocities must have shape (N, 3)");
    auto a = arr.unchecked<2>();
    std::vector<Vec3> v(static_cast<std::size_t>(arr.shape(0)));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {a(i, 0), a(i, 1), a(i, 2)};
    return v;
}

py::array_t<double> moment_table(const std::vector<MomentSnapshot>& h,
                                 std::array<double, 3> MomentSnapshot::*field) {
    py::array_t<double> out({static_cast<py::ssize_t>(h.size()), py::ssize_t{3}});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < h.size(); ++k) {
        for (std::size_t c = 0; c < 3; ++c) a(k, c) = (h[k].*field)[c];
    }
    return out;
}

py::dict forward(const SimConfig& cfg, bool keep_initial) {
    ForwardRunResult r;
    {
        py::gil_scoped_release release;
        r = run_forward(cfg);
    }
    std::vector<double> t;
    for (const MomentSnapshot& m : r.moment_history) t.push_back(m.t);
    py::dict d;
    d["t"] = py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
    d["p"] = moment_table(r.moment_history, &MomentSnapshot::p);
    d["T"] = moment_table(r.moment_history, &MomentSnapshot::temperature);
    d["m4"] = moment_table(r.moment_history, &MomentSnapshot::m4);
    d["final"] = to_array(r.final_ensemble.velocities);
    if (keep_initial) d["initial"] = to_array(r.initial.velocities);
    std::size_t collisions = 0;
    for (const CollisionStep& s : r.log.steps) collisions += s.size();
    d["collision_pairs"] = collisions;
    return d;
}

GradientReport gradient_py(const SimConfig& cfg, const ObjectiveAdapter& obj, const std::string& method,
                           const GridSchemeOptions& grid) {
    py::gil_scoped_release release;
    if (method == "adjoint_dsmc") return adjoint_dsmc_gradient(cfg, obj);
    if (method == "continuous_particle") return continuous_particle_gradient(cfg, obj);
    if (method == "continuous_grid") return continuous_grid_gradient(cfg, obj, grid);
    throw ParameterError("unknown method '" + method +
                         "' (expected adjoint_dsmc | continuous_particle | continuous_grid)");
}

py::dict fd_py(const SimConfig& cfg, const ObjectiveAdapter& obj, const std::string& axis,
               const FdOptions& opt) {
    FDGradientReport r;
    {
        py::gil_scoped_release release;
        r = fd_gradient(cfg, obj, parse_axis(axis), opt);
    }
    py::dict d;
    d["objective"] = r.objective;
    d["axis"] = axis_name(r.axis);
    d["value"] = r.value;
    d["error"] = r.error;
    d["delta_alpha"] = r.delta_alpha;
    d["e_fd"] = r.e_fd;
    d["e_rand"] = r.e_rand;
    d["dalpha_star"] = r.dalpha_star;
    d["crn"] = r.crn;
    d["samples"] = r.samples;
    return d;
}

py::dict optimize_py(const SimConfig& cfg, const ObjectiveAdapter& obj, const std::vector<std::string>& free,
                     std::vector<double> alpha0, const OptOptions& opt, const std::string& method) {
    OptProblem p;
    p.sim = cfg;
    p.objective = obj;
    for (const std::string& a : free) p.free_axes.push_back(parse_axis(a));
    p.gradient_method = method;
    OptHistory h;
    {
        py::gil_scoped_release release;
        h = steepest_descent(p, std::move(alpha0), opt);
    }
    std::vector<std::vector<double>> alpha;
    std::vector<double> j, gnorm, step;
    for (const OptRecord& r : h.records) {
        alpha.push_back(r.alpha);
        j.push_back(r.value);
        gnorm.push_back(r.grad_norm);
        step.push_back(r.step);
    }
    py::dict d;
    d["names"] = h.names;
    d["alpha"] = alpha;
    d["J"] = j;
    d["gradnorm"] = gnorm;
    d["step"] = step;
    d["converged"] = h.converged;
    d["csv"] = h.to_csv();
    d["json"] = h.to_json();
    return d;
}

}  // namespace

PYBIND11_MODULE(_boltzadj, m) {
    m.doc() = "Adjoint DSMC for the homogeneous Boltzmann equation with Maxwell molecules";

    auto base = py::register_exception<Error>(m, "BoltzadjError");
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<InitialConditionParams>(m, "InitialCondition")
        .def(py::init([](double tx0, double ty0, double tz0) { return InitialConditionParams{tx0, ty0, tz0}; }),
             py::arg("tx0") = 0.5, py::arg("ty0") = 1.0, py::arg("tz0") = 1.0)
        .def_readwrite("tx0", &InitialConditionParams::tx0)
        .def_readwrite("ty0", &InitialConditionParams::ty0)
        .def_readwrite("tz0", &InitialConditionParams::tz0)
        .def("validate", &InitialConditionParams::validate)
        .def("__repr__", [](const InitialConditionParams& p) {
            return "InitialCondition(tx0=" + std::to_string(p.tx0) + ", ty0=" + std::to_string(p.ty0) +
                   ", tz0=" + std::to_string(p.tz0) + ")";
        });

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](std::size_t n, double dt, double t_final, double mu, std::uint64_t seed,
                         const InitialConditionParams& initial) {
                 SimConfig c;
                 c.n = n;
                 c.dt = dt;
                 c.t_final = t_final;
                 c.mu = mu;
                 c.seed = seed;
                 c.initial = initial;
                 return c;
             }),
             py::arg("n") = 100000, py::arg("dt") = 0.1, py::arg("t_final") = 2.0, py::arg("mu") = 1.0,
             py::arg("seed") = 1, py::arg("initial") = InitialConditionParams{})
        .def_readwrite("n", &SimConfig::n)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_final", &SimConfig::t_final)
        .def_readwrite("mu", &SimConfig::mu)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("initial", &SimConfig::initial)
        .def("validate", &SimConfig::validate)
        .def("steps", &SimConfig::steps)
        .def("collisions_per_step", &SimConfig::collisions_per_step);

    py::class_<ObjectiveAdapter>(m, "Objective")
        .def_static("moment2", [](const std::string& l) { return ObjectiveAdapter::moment2(parse_axis(l)); },
                    py::arg("axis"))
        .def_static("moment4", [](const std::string& l) { return ObjectiveAdapter::moment4(parse_axis(l)); },
                    py::arg("axis"))
        .def_static("matching", &ObjectiveAdapter::matching)
        .def_static("least_squares", &ObjectiveAdapter::least_squares, py::arg("d_obs"))
        .def_property_readonly("name", &ObjectiveAdapter::name)
        .def_property_readonly("is_moment", &ObjectiveAdapter::is_moment)
        .def("evaluate",
             [](const ObjectiveAdapter& o, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                 return o.evaluate(from_array(v));
             },
             py::arg("velocities"))
        .def("adjoint_final",
             [](const ObjectiveAdapter& o, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                 return to_array(o.adjoint_final_vec(from_array(v)));
             },
             py::arg("velocities"), "-N dJ/dv_i for every particle")
        .def("__repr__", [](const ObjectiveAdapter& o) { return "Objective(" + o.name() + ")"; });

    py::class_<GradientReport>(m, "GradientReport")
        .def_readonly("objective", &GradientReport::objective)
        .def_readonly("alpha_names", &GradientReport::alpha_names)
        .def_readonly("values", &GradientReport::values)
        .def_readonly("errors", &GradientReport::errors)
        .def_readonly("method", &GradientReport::method)
        .def_readonly("n", &GradientReport::n)
        .def_readonly("samples", &GradientReport::samples)
        .def("to_json", &GradientReport::to_json, py::arg("indent") = 2)
        .def_static("from_json", &GradientReport::from_json);

    py::class_<GridSchemeOptions>(m, "GridSchemeOptions")
        .def(py::init([](std::size_t n_grid, std::size_t n_phi, std::size_t n_theta) {
                 return GridSchemeOptions{n_grid, n_phi, n_theta};
             }),
             py::arg("n_grid") = 40, py::arg("n_phi") = 10, py::arg("n_theta") = 10)
        .def_readwrite("n_grid", &GridSchemeOptions::n_grid)
        .def_readwrite("n_phi", &GridSchemeOptions::n_phi)
        .def_readwrite("n_theta", &GridSchemeOptions::n_theta);

    py::class_<FdOptions>(m, "FdOptions")
        .def(py::init([](double delta_alpha, std::size_t samples, bool crn, bool error_stencil) {
                 return FdOptions{delta_alpha, samples, crn, error_stencil};
             }),
             py::arg("delta_alpha") = 0.1, py::arg("samples") = 10, py::arg("crn") = false,
             py::arg("error_stencil") = true)
        .def_readwrite("delta_alpha", &FdOptions::delta_alpha)
        .def_readwrite("samples", &FdOptions::samples)
        .def_readwrite("crn", &FdOptions::crn)
        .def_readwrite("error_stencil", &FdOptions::error_stencil);

    py::class_<OptOptions>(m, "OptOptions")
        .def(py::init([](std::size_t max_iters, double c1, double beta, double s0, double tol,
                         const std::string& seed_policy) {
                 OptOptions o;
                 o.max_iters = max_iters;
                 o.c1 = c1;
                 o.beta = beta;
                 o.s0 = s0;
                 o.tol = tol;
                 o.seed_policy = parse_seed_policy(seed_policy);
                 return o;
             }),
             py::arg("max_iters") = 100, py::arg("c1") = 1e-4, py::arg("beta") = 0.5, py::arg("s0") = 0.5,
             py::arg("tol") = 1e-3, py::arg("seed_policy") = "fresh")
        .def_readwrite("max_iters", &OptOptions::max_iters)
        .def_readwrite("c1", &OptOptions::c1)
        .def_readwrite("beta", &OptOptions::beta)
        .def_readwrite("s0", &OptOptions::s0)
        .def_readwrite("m_max", &OptOptions::m_max)
        .def_readwrite("floor", &OptOptions::floor)
        .def_readwrite("tol", &OptOptions::tol)
        .def_property(
            "seed_policy", [](const OptOptions& o) { return seed_policy_name(o.seed_policy); },
            [](OptOptions& o, const std::string& s) { o.seed_policy = parse_seed_policy(s); });

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("sim", &RunConfig::sim)
        .def_readonly("objective", &RunConfig::objective)
        .def_readonly("grid", &RunConfig::grid);

    m.def("load_config", &load_config, py::arg("path"), "Parse a YAML run configuration");
    m.def("run_forward", &forward, py::arg("config"), py::arg("keep_initial") = false,
          "Forward DSMC. Returns t, per-step p/T/m4 tables and the final velocities.");
    m.def("gradient", &gradient_py, py::arg("config"), py::arg("objective"), py::arg("method") = "adjoint_dsmc",
          py::arg("grid") = GridSchemeOptions{},
          "dJ/d(Tx0, Ty0, Tz0) from one forward run and one backward solve");
    m.def("fd_gradient", &fd_py, py::arg("config"), py::arg("objective"), py::arg("axis"),
          py::arg("options") = FdOptions{}, "Central finite-difference gradient along one temperature");
    m.def("optimize", &optimize_py, py::arg("config"), py::arg("objective"), py::arg("free"),
          py::arg("alpha0"), py::arg("options") = OptOptions{}, py::arg("method") = "adjoint_dsmc",
          "Projected steepest descent with Armijo backtracking");
}
