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

#include "boltzadj/errors.hpp"
#include "boltzadj/optimize.hpp"
#include "common.hpp"

using namespace boltzadj;

namespace {

// (x - 2)^2 with its exact gradient; the seed is ignored.
const EvalFn quad_eval = [](std::span<const double> x, std::uint64_t) {
    return Evaluation{(x[0] - 2) * (x[0] - 2), {2 * (x[0] - 2)}};
};
const ValueFn quad_value = [](std::span<const double> x, std::uint64_t) { return (x[0] - 2) * (x[0] - 2); };

OptProblem small_problem() {
    OptProblem p;
    p.sim = test::relaxation(5000, 3);
    p.objective = ObjectiveAdapter::matching();
    p.free_axes = {Axis::y};
    return p;
}

}  // namespace

TEST_CASE("convex quadratic converges") {
    OptOptions o;
    o.tol = 1e-12;
    o.max_iters = 60;
    const OptHistory h = steepest_descent(quad_eval, quad_value, {o.floor}, o, 1, {"a"});
    CHECK(std::fabs(h.records.back().alpha[0] - 2.0) < 1e-6);
    CHECK(h.records.size() <= 61);
    CHECK(h.records.front().step == 0.5);
    CHECK(h.records.back().step == 0.0);
}

TEST_CASE("anisotropic quadratic needs backtracking") {
    const EvalFn eval = [](std::span<const double> x, std::uint64_t) {
        const double a = x[0] - 1, b = x[1] - 3;
        return Evaluation{a * a + 10 * b * b, {2 * a, 20 * b}};
    };
    const ValueFn value = [](std::span<const double> x, std::uint64_t) {
        const double a = x[0] - 1, b = x[1] - 3;
        return a * a + 10 * b * b;
    };
    OptOptions o;
    o.tol = 1e-10;
    o.max_iters = 500;
    const OptHistory h = steepest_descent(eval, value, {4.0, 0.5}, o, 1);
    CHECK(h.converged);
    CHECK(h.records.back().alpha[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(h.records.back().alpha[1] == doctest::Approx(3.0).epsilon(1e-6));
    for (std::size_t i = 1; i < h.records.size(); ++i) CHECK(h.records[i].value <= h.records[i - 1].value);
    CHECK(h.names == std::vector<std::string>{"a0", "a1"});
}

TEST_CASE("projection keeps iterates on the floor") {
    const EvalFn eval = [](std::span<const double> x, std::uint64_t) {
        return Evaluation{(x[0] + 1) * (x[0] + 1), {2 * (x[0] + 1)}};
    };
    const ValueFn value = [](std::span<const double> x, std::uint64_t) { return (x[0] + 1) * (x[0] + 1); };
    OptOptions o;
    o.max_iters = 20;
    o.seed_policy = SeedPolicy::fixed;
    const OptHistory h = steepest_descent(eval, value, {3.0}, o, 1);
    for (const OptRecord& r : h.records) CHECK(r.alpha[0] >= o.floor);
    CHECK(h.records.back().alpha[0] == o.floor);
    CHECK(h.records.back().stalled == false);
    CHECK(h.records[h.records.size() - 2].stalled);
}

TEST_CASE("options and seed policy") {
    OptOptions o;
    CHECK_NOTHROW(o.validate());
    o.beta = 1.0;
    CHECK_THROWS_AS(o.validate(), ParameterError);
    CHECK(parse_seed_policy("fixed") == SeedPolicy::fixed);
    CHECK(seed_policy_name(SeedPolicy::fresh) == "fresh");
    CHECK_THROWS_AS(parse_seed_policy("random"), ConfigError);
    CHECK(seed_for_iteration(5, SeedPolicy::fixed, 9) == 5);
    CHECK(seed_for_iteration(5, SeedPolicy::fresh, 0) == 5);
    CHECK(seed_for_iteration(5, SeedPolicy::fresh, 1) != seed_for_iteration(5, SeedPolicy::fresh, 2));
    CHECK_THROWS_AS(steepest_descent(quad_eval, quad_value, {0.0}, OptOptions{}, 1), ParameterError);
}

TEST_CASE("max_iters = 0 keeps only the initial point") {
    OptOptions o;
    o.max_iters = 0;
    const OptHistory h = steepest_descent(small_problem(), {1.0}, o);
    REQUIRE(h.records.size() == 1);
    CHECK(h.records[0].alpha == std::vector<double>{1.0});
    CHECK(h.names == std::vector<std::string>{"Ty0"});
    const std::string csv = h.to_csv();
    CHECK(csv.rfind("iter,Ty0,J,gradnorm,step\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(h.to_json().find("\"seed_policy\": \"fresh\"") != std::string::npos);
}

TEST_CASE("fixed seeds give a reproducible monotone descent") {
    OptOptions o;
    o.max_iters = 8;
    o.seed_policy = SeedPolicy::fixed;
    const OptHistory a = steepest_descent(small_problem(), {1.0}, o);
    const OptHistory b = steepest_descent(small_problem(), {1.0}, o);
    CHECK(a.to_csv() == b.to_csv());
    for (std::size_t i = 1; i < a.records.size(); ++i) CHECK(a.records[i].value <= a.records[i - 1].value);
    CHECK(a.records.back().value < a.records.front().value);
}

TEST_CASE("problem validation") {
    OptProblem p = small_problem();
    p.free_axes = {};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.free_axes = {Axis::x, Axis::x};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = small_problem();
    p.gradient_method = "continuous_grid";
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = small_problem();
    const InitialConditionParams q = p.params_at(std::vector<double>{0.7});
    CHECK(q.ty0 == 0.7);
    CHECK(q.tx0 == 0.5);
}
