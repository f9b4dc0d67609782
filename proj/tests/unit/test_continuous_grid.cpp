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


#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "boltzadj/continuous_grid.hpp"
#include "boltzadj/errors.hpp"
#include "common.hpp"

using namespace boltzadj;

namespace {

GridField gaussian_density(const VelocityGrid& grid, double t) {
    GridField f(grid, FieldKind::density);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        f.values[i] = std::exp(-norm2(grid.node(i)) / (2 * t));
    }
    renormalize(f);
    return f;
}

// Direct evaluation of the explicit step, node by node.
GridField reference_step(const GridField& g, const GridField& f, const AngularQuadrature& quad,
                         double dt, double mu) {
    const VelocityGrid& grid = g.grid;
    const double dv3 = grid.cell_volume();
    double loss = 0.0;
    for (std::size_t j = 0; j < grid.nodes(); ++j) loss += g.values[j] * f.values[j] * dv3;
    GridField out(grid, FieldKind::adjoint);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const Vec3 v = grid.node(i);
        double gain = 0.0;
        for (std::size_t j = 0; j < grid.nodes(); ++j) {
            if (f.values[j] == 0.0) continue;
            const Vec3 v1 = grid.node(j);
            const Vec3 m = 0.5 * (v + v1);
            const double half = 0.5 * norm(v - v1);
            double s = 0.0;
            for (const Vec3& sigma : quad.nodes()) s += g.interpolate(m + half * sigma);
            gain += s * quad.weight() * f.values[j] * dv3;
        }
        out.values[i] = g.values[i] + dt * (2 * mu / (4 * std::numbers::pi) * gain - mu * loss - mu * g.values[i]);
    }
    return out;
}

}  // namespace

TEST_CASE("grid geometry") {
    const VelocityGrid g(11, 2.0);
    CHECK(g.lo() == -10.0);
    CHECK(g.dv() == doctest::Approx(2.0));
    CHECK(g.coord(10) == doctest::Approx(10.0));
    CHECK(g.flat(1, 2, 3) == 1 + 11 * (2 + 11 * 3));
    CHECK(g.node(g.flat(1, 2, 3)) == g.node(1, 2, 3));
    CHECK_THROWS_AS(VelocityGrid(4, 1.0), ParameterError);
    const VelocityGrid p = VelocityGrid::for_params(24, {0.5, 1.0, 1.0});
    CHECK(p.v_th() == doctest::Approx(std::sqrt(2.5 / 3.0)));
}

TEST_CASE("angular quadrature") {
    const AngularQuadrature q(8, 6);
    CHECK(q.size() == 48);
    CHECK(q.weight() * 48 == doctest::Approx(4 * std::numbers::pi));
    Vec3 sum;
    double zz = 0.0;
    for (const Vec3& s : q.nodes()) {
        CHECK(norm(s) == doctest::Approx(1.0));
        sum += s;
        zz += s.z * s.z;
    }
    CHECK(norm(sum) < 1e-12);
    CHECK(zz / 48 == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("trilinear interpolation and clamping") {
    const VelocityGrid grid(9, 1.0);
    GridField g(grid, FieldKind::adjoint);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const Vec3 v = grid.node(i);
        g.values[i] = 1 + 2 * v.x - 3 * v.y + 0.5 * v.z;
    }
    CHECK(g.interpolate(Vec3{0.3, -1.1, 2.7}) == doctest::Approx(1 + 0.6 + 3.3 + 1.35));
    // outside: clamped onto the face
    CHECK(g.interpolate(Vec3{100, 0, 0}) == doctest::Approx(1 + 2 * 5));
}

TEST_CASE("histogram has unit mass") {
    const auto v = sample_initial_ensemble({1, 1, 1}, 50000, 3).ensemble.velocities;
    const VelocityGrid grid(16, 1.0);
    const HistogramResult h = histogram_density(v, grid);
    CHECK(h.dropped == 0);
    CHECK(h.density.mass() == doctest::Approx(1.0));
    std::vector<Vec3> with_far = v;
    with_far.push_back(Vec3{40, 0, 0});
    GridField f = histogram_density(with_far, grid).density;
    CHECK(f.mass() < 1.0);
    renormalize(f);
    CHECK(f.mass() == doctest::Approx(1.0));
}

TEST_CASE("backward step matches direct evaluation") {
    const VelocityGrid grid(8, 0.9);
    const GridField f = gaussian_density(grid, 0.8);
    GridField g(grid, FieldKind::adjoint);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const Vec3 v = grid.node(i);
        g.values[i] = -v.x * v.x + 0.1 * v.y * v.y * v.y * v.y - 0.3 * v.z;
    }
    const AngularQuadrature quad(5, 4);
    const GridField fast = backward_step_grid(g, f, quad, 0.1, 1.0);
    const GridField ref = reference_step(g, f, quad, 0.1, 1.0);
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        scale = std::max(scale, std::fabs(ref.values[i]));
        err = std::max(err, std::fabs(fast.values[i] - ref.values[i]));
    }
    CHECK(err < 1e-12 * scale);
}

TEST_CASE("constant adjoint is a fixed point with a unit-mass density") {
    const VelocityGrid grid(10, 1.0);
    const GridField f = gaussian_density(grid, 1.0);
    GridField g(grid, FieldKind::adjoint);
    std::fill(g.values.begin(), g.values.end(), 3.0);
    const GridField out = backward_step_grid(g, f, AngularQuadrature(4, 4), 0.1);
    for (double x : out.values) CHECK(x == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("grid gradient of a final condition without collisions") {
    // gamma(v, 0) = -v_x^2 gives d<v_x^2>/dTx0 = 1 and 0 for the other axes
    const InitialConditionParams p{0.5, 1.0, 1.0};
    const VelocityGrid grid = VelocityGrid::for_params(40, p);
    FinalConditionKernel k;
    k.c2 = {-1.0, 0.0, 0.0};
    const GridField g = final_condition_grid(k, grid);
    CHECK(gradient_grid(g, p, Axis::x) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::fabs(gradient_grid(g, p, Axis::y)) < 1e-3);
}

TEST_CASE("central differences are exact on quadratics in the interior") {
    const VelocityGrid grid(10, 1.0);
    FinalConditionKernel k;
    k.c2 = {-1.0, 2.0, 0.5};
    const GridField g = final_condition_grid(k, grid);
    const auto d = gradient_field(g);
    const Vec3 v = grid.node(4, 5, 6);
    const std::size_t i = grid.flat(4, 5, 6);
    CHECK(d[0].values[i] == doctest::Approx(-2 * v.x));
    CHECK(d[1].values[i] == doctest::Approx(4 * v.y));
    CHECK(d[2].values[i] == doctest::Approx(1 * v.z));
}

TEST_CASE("grid snapshot round-trips") {
    const VelocityGrid grid(8, 1.3);
    FinalConditionKernel k;
    k.c4 = {0.2, 0.0, -1.0};
    const GridField g = final_condition_grid(k, grid);
    std::ostringstream os;
    write_grid_field(os, g, 1.7);
    std::istringstream is(os.str());
    const auto [back, t] = read_grid_field(is);
    CHECK(t == 1.7);
    CHECK(back.grid == grid);
    CHECK(back.values == g.values);
    std::ostringstream os2;
    write_grid_field(os2, back, t);
    CHECK(os2.str() == os.str());
    CHECK_THROWS_AS(load_grid_field(test::scratch_dir("grid_io") / "nope.bin"), IoError);
}
