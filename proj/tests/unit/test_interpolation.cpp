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


#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "boltzadj/core.hpp"
#include "boltzadj/errors.hpp"
#include "boltzadj/scattered_interpolation.hpp"

using namespace boltzadj;

namespace {

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
    return sample_initial_ensemble({1, 1, 1}, n, seed).ensemble.velocities;
}

}  // namespace

TEST_CASE("kd-tree neighbours match brute force") {
    const auto pts = cloud(3000, 4);
    const KdTree tree(pts);
    CHECK(tree.size() == 3000);
    Engine eng(1);
    for (int t = 0; t < 50; ++t) {
        const Vec3 q{uniform01(eng) * 4 - 2, uniform01(eng) * 4 - 2, uniform01(eng) * 4 - 2};
        std::vector<double> d;
        for (const Vec3& p : pts) d.push_back(norm2(p - q));
        std::sort(d.begin(), d.end());
        const auto nn = tree.knn(q, 10);
        REQUIRE(nn.size() == 10);
        for (std::size_t i = 0; i < 10; ++i) CHECK(nn[i].first == d[i]);
        const std::uint32_t self[] = {nn[0].second};
        CHECK(tree.any_within(q, d[1] * 1.0001, self));
        CHECK_FALSE(tree.any_within(q, d[1] * 0.9999, self));
    }
}

TEST_CASE("linear data is reproduced inside the hull") {
    const auto pts = cloud(4000, 9);
    std::vector<double> vals;
    for (const Vec3& p : pts) vals.push_back(1.5 + 2 * p.x - p.y + 0.25 * p.z);
    const ScatteredInterpolant f(pts, vals);
    Engine eng(2);
    for (int t = 0; t < 200; ++t) {
        const Vec3 q{uniform01(eng) * 2 - 1, uniform01(eng) * 2 - 1, uniform01(eng) * 2 - 1};
        ScatteredInterpolant::QueryInfo info;
        const double got = f.evaluate(q, &info);
        CHECK(info.method == ScatteredInterpolant::Method::delaunay);
        CHECK(got == doctest::Approx(1.5 + 2 * q.x - q.y + 0.25 * q.z).epsilon(1e-9));
        double wsum = 0.0;
        for (double w : info.weights) {
            CHECK(w >= -1e-12);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0));
    }
}

TEST_CASE("queries on samples and outside the hull") {
    const auto pts = cloud(500, 3);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = static_cast<double>(i);
    const ScatteredInterpolant f(pts, vals);
    ScatteredInterpolant::QueryInfo info;
    CHECK(f.evaluate(pts[42], &info) == doctest::Approx(42.0));
    const double far = f.evaluate(Vec3{50, 50, 50}, &info);
    CHECK(info.method == ScatteredInterpolant::Method::idw);
    CHECK(far >= 0.0);
    CHECK(far <= 499.0);
    CHECK(interpolate_conditional(pts, vals, pts[7]) == doctest::Approx(7.0));
    CHECK_THROWS_AS(ScatteredInterpolant(std::span(pts).first(3), std::span(vals).first(3)), ParameterError);
}
