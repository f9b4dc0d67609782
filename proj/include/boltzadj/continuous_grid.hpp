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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "boltzadj/core.hpp"
#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/objectives.hpp"
#include "boltzadj/report.hpp"

namespace boltzadj {

/// Uniform grid on [-5 v_th, 5 v_th]^3 with n nodes per axis.
class VelocityGrid {
public:
    VelocityGrid(std::size_t n, double v_th);
    /// v_th = sqrt(T_M) of the initial temperatures.
    static VelocityGrid for_params(std::size_t n, const InitialConditionParams& params);

    std::size_t n() const { return n_; }
    std::size_t nodes() const { return n_ * n_ * n_; }
    double v_th() const { return v_th_; }
    double lo() const { return -5.0 * v_th_; }
    double dv() const { return dv_; }
    double cell_volume() const { return dv_ * dv_ * dv_; }

    double coord(std::size_t i) const { return lo() + static_cast<double>(i) * dv_; }
    Vec3 node(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return {coord(ix), coord(iy), coord(iz)};
    }
    Vec3 node(std::size_t flat) const;
    /// x fastest.
    std::size_t flat(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return ix + n_ * (iy + n_ * iz);
    }

    bool operator==(const VelocityGrid& o) const { return n_ == o.n_ && v_th_ == o.v_th_; }

private:
    std::size_t n_;
    double v_th_;
    double dv_;
};

enum class FieldKind { density, adjoint };

struct GridField {
    VelocityGrid grid;
    FieldKind kind = FieldKind::adjoint;
    std::vector<double> values;

    GridField(VelocityGrid g, FieldKind k) : grid(g), kind(k), values(g.nodes(), 0.0) {}

    /// sum of values * dv^3.
    double mass() const;
    /// Trilinear interpolation; points outside the grid are clamped onto it.
    double interpolate(const Vec3& v) const;
};

/// Directions from uniform phi and midpoint cos(theta), each weighted 4 pi / (n_phi n_theta).
class AngularQuadrature {
public:
    AngularQuadrature(std::size_t n_phi, std::size_t n_theta);

    std::span<const Vec3> nodes() const { return nodes_; }
    double weight() const { return weight_; }
    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<Vec3> nodes_;
    double weight_;
};

struct HistogramResult {
    GridField density;
    std::size_t dropped = 0;
    double dropped_fraction = 0.0;
};

/// Counts in cells centered on the nodes, divided by N dv^3.
HistogramResult histogram_density(std::span<const Vec3> v, const VelocityGrid& grid);

/// Scales a density to unit discrete mass (no-op on an all-zero field).
void renormalize(GridField& f);

/// Explicit step back from t_{k+1} to t_k for a batch of adjoint fields
/// sharing one density f(t_{k+1}):
///   g_k(v) = g(v) + dt [ 2 mu/(4 pi rho) sum_v1 sum_sigma g(v') f(v1) dsigma dv^3
///                        - (mu/rho) sum_v1 g(v1) f(v1) dv^3 - mu g(v) ]
/// with v' = (v + v1)/2 + |v - v1| sigma / 2 and g(v') trilinear.
void backward_step_grid(std::span<GridField* const> gammas, const GridField& f_next,
                        const AngularQuadrature& quad, double dt, double mu = 1.0,
                        double rho = 1.0);

GridField backward_step_grid(const GridField& gamma_next, const GridField& f_next,
                             const AngularQuadrature& quad, double dt, double mu = 1.0,
                             double rho = 1.0);

/// gamma(v, T) = -r(v) on the nodes.
GridField final_condition_grid(const FinalConditionKernel& kernel, const VelocityGrid& grid);

/// Called with the batch at k = M and after each step back.
using GridObserver = std::function<void(std::size_t k, std::span<const GridField> gammas)>;

/// densities[k] = f(t_k) for k = 0..M; marches all fields from M to 0.
std::vector<GridField> run_grid_adjoint(std::vector<GridField> gammas,
                                        std::span<const GridField> densities,
                                        const AngularQuadrature& quad, double dt, double mu = 1.0,
                                        const GridObserver& observer = {});

/// -sum gamma(v,0) ((v_p^2/T_p - 1)/(2 T_p)) f0(v) dv^3 with the analytic Gaussian f0.
double gradient_grid(const GridField& gamma0, const InitialConditionParams& params, Axis p);

/// Central-difference velocity gradient (one-sided on the boundary).
std::array<GridField, 3> gradient_field(const GridField& g);

struct GridSchemeOptions {
    std::size_t n_grid = 40;
    std::size_t n_phi = 10;
    std::size_t n_theta = 10;
};

/// Histograms of every step of a forward run, renormalized.
struct GridDensityHistory {
    VelocityGrid grid;
    std::vector<GridField> densities;
    double max_dropped_fraction = 0.0;
};

/// Observer that records a renormalized histogram per step of run_forward.
StepObserver density_recorder(GridDensityHistory& history);

/// Gradients for several objectives from one forward run, solved in one batch.
std::vector<std::array<double, 3>> continuous_grid_gradients(
    const GridDensityHistory& history, const ParticleEnsemble& final,
    const InitialConditionParams& params, std::span<const ObjectiveAdapter> objectives,
    const GridSchemeOptions& opt, double dt, double mu, const GridObserver& observer = {});

GradientReport continuous_grid_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj,
                                        const GridSchemeOptions& opt);

void write_grid_field(std::ostream& os, const GridField& g, double t);
/// Reads a snapshot; the second member is t.
std::pair<GridField, double> read_grid_field(std::istream& is, FieldKind kind = FieldKind::adjoint);
void save_grid_field(const std::filesystem::path& path, const GridField& g, double t);
std::pair<GridField, double> load_grid_field(const std::filesystem::path& path,
                                             FieldKind kind = FieldKind::adjoint);

}  // namespace boltzadj
