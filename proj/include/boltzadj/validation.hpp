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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boltzadj/adjoint_dsmc.hpp"
#include "boltzadj/continuous_grid.hpp"
#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/objectives.hpp"
#include "boltzadj/report.hpp"

namespace boltzadj {

struct MeanError {
    double mean = 0.0;
    double error = 0.0;  // 2 sigma / sqrt(M_s), sample sigma with M_s - 1
};

MeanError mean_and_error(std::span<const double> samples);

struct FdErrorEstimates {
    double e_fd = 0.0;
    double e_rand = 0.0;
    double dalpha_star = 0.0;  // +inf when J''' vanishes
    double third_derivative = 0.0;
};

/// j = J(alpha0 + {-2, -1, +1, +2} h). The third derivative comes from the
/// four-point stencil (-J(-2h) + 2J(-h) - 2J(h) + J(2h)) / (2 h^3), then
///   e_FD = |J'''| dalpha^2 / 6,  e_rand = e_rand_J / dalpha,
///   dalpha* = (3 e_rand_J / |J'''|)^(1/3).
FdErrorEstimates fd_error_estimates(const std::array<double, 4>& j, double h, double dalpha,
                                    double e_rand_j);

struct FDGradientReport {
    std::string objective;
    Axis axis = Axis::x;
    double value = 0.0;
    double error = 0.0;  // two-standard-error radius over the samples
    double delta_alpha = 0.0;
    double e_fd = 0.0;
    double e_rand = 0.0;
    double dalpha_star = 0.0;
    bool crn = false;
    std::size_t samples = 0;
};

struct FdOptions {
    double delta_alpha = 0.1;
    std::size_t samples = 10;
    bool crn = false;
    /// Also run the +-dalpha/2 points (same seed as +-dalpha) for e_FD and dalpha*.
    bool error_stencil = true;
};

/// Central differences (J(a + da) - J(a - da)) / (2 da) along `p`, averaged
/// over replicas. Replica s uses replica_seed(seed, 2s) for both points with
/// CRN, or 2s and 2s + 1 without. Every objective is read off the same runs.
std::vector<FDGradientReport> fd_gradients(const SimConfig& cfg,
                                           std::span<const ObjectiveAdapter> objectives, Axis p,
                                           const FdOptions& opt);

FDGradientReport fd_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj, Axis p,
                             const FdOptions& opt);

/// Packs FD reports for the three axes of one objective.
GradientReport to_gradient_report(std::span<const FDGradientReport> per_axis, const SimConfig& cfg);

struct FrozenLogResult {
    double adjoint = 0.0;    // -(1/N) gamma_{0,i}[c]
    double replay_fd = 0.0;  // central difference over replays of the logged run
    double rel_error = 0.0;
    bool collided = false;   // particle i appears in the log
};

/// Perturbs v_{0,i} by +-eps and +-2 eps along `component`, replays the
/// logged pairs and scattering directions, and compares the fourth-order
/// central difference of J with the adjoint value. `step_fn` substitutes the
/// backward step (mutation tests).
FrozenLogResult frozen_log_check(const SimConfig& cfg, const ObjectiveAdapter& obj, std::size_t i,
                                 double eps, Axis component, const BackwardStepFn& step_fn = {});

/// Same as above on an existing run.
FrozenLogResult frozen_log_check(const ForwardRunResult& run, const ObjectiveAdapter& obj,
                                 std::size_t i, double eps, Axis component,
                                 const BackwardStepFn& step_fn = {});

/// Relative change of sum_i gamma_i . delta_i between t = T and t = 0 when
/// delta is pushed forward with apply_A and gamma backward with apply_B.
double duality_defect(const CollisionLog& log, std::uint64_t seed);

struct ConservationResult {
    double momentum_drift = 0.0;  // max component change / rms speed
    double energy_drift = 0.0;    // relative change of sum |v|^2
};

ConservationResult conservation_drift(const SimConfig& cfg);

struct BridgeBin {
    std::size_t node = 0;
    std::size_t count = 0;
    Vec3 velocity;                   // node position
    std::array<double, 3> adjoint{};  // bin mean of gamma_{k,i}
    std::array<double, 3> grid{};     // bin mean of grad gamma(v_{k,i}, t_k)
    std::array<double, 3> se{};       // standard error of the mean difference
    std::array<double, 3> z{};        // (adjoint - grid) / se
};

struct BridgeResult {
    std::vector<BridgeBin> bins;
    std::size_t skipped = 0;        // occupied bins below n_min
    double max_abs_diff = 0.0;      // largest |adjoint - grid| over kept bins
    double max_z = 0.0;
    double fraction_within(double z) const;
};

/// Compares particle adjoints gamma_{k,i} at velocities v_{k,i} with the
/// velocity gradient of the grid adjoint at t_k. Particles are binned on the
/// nearest grid node; bins with fewer than n_min particles are skipped.
BridgeResult bridge_check(std::span<const Vec3> v_k, std::span<const Vec3> gamma_k,
                          const GridField& grid_gamma_k, std::size_t n_min = 200);

std::string bridge_csv(const BridgeResult& r);

/// Largest |bin mean difference| the k = M comparison may show at `node`:
/// central differences and trilinear interpolation reproduce the v^2 part of
/// the kernel exactly and leave at most 7 |c4| (|v| + dv) dv^2 from the v^4
/// part, plus rounding.
double bridge_final_bound(const FinalConditionKernel& kernel, const VelocityGrid& grid,
                          const Vec3& node, double scale);

/// Everything the grid-vs-particle comparisons need from one forward run.
struct GridComparison {
    ForwardRunResult run;
    GridDensityHistory densities;
    std::vector<FinalConditionKernel> kernels;
    std::vector<std::array<double, 3>> adjoint;  // adjoint-DSMC gradient per objective
    std::vector<std::array<double, 3>> grid;     // grid-scheme gradient per objective
    std::vector<AdjointEnsemble> adjoint_final;  // gamma at k = M
    std::vector<AdjointEnsemble> adjoint_initial;
    std::vector<GridField> grid_final;           // gamma(v, T)
    std::vector<GridField> grid_initial;         // gamma(v, 0)
};

/// Moment objectives only (the grid scheme needs a kernel).
GridComparison run_grid_comparison(const SimConfig& cfg, std::span<const ObjectiveAdapter> objectives,
                                   const GridSchemeOptions& opt);

/// One row of a validation table: quantity, mean, two-standard-error radius.
struct TableRow {
    std::string quantity;
    double mean = 0.0;
    double error = 0.0;
};

std::string table_csv(std::span<const TableRow> rows);

}  // namespace boltzadj
