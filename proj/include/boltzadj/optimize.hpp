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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boltzadj/forward_dsmc.hpp"
#include "boltzadj/objectives.hpp"

namespace boltzadj {

enum class SeedPolicy { fixed, fresh };

SeedPolicy parse_seed_policy(std::string_view name);
std::string seed_policy_name(SeedPolicy p);

/// fixed: the base seed at every iteration; fresh: replica_seed(base, iter).
std::uint64_t seed_for_iteration(std::uint64_t base, SeedPolicy policy, std::size_t iter);

struct OptOptions {
    std::size_t max_iters = 100;
    double c1 = 1e-4;
    double beta = 0.5;
    double s0 = 0.5;
    std::size_t m_max = 30;
    double floor = 1e-4;
    /// Stop once |grad J| <= tol |grad J(alpha_0)|.
    double tol = 1e-3;
    SeedPolicy seed_policy = SeedPolicy::fresh;
    /// Consecutive stalls after which s0 is halved (fresh seeds only).
    std::size_t stall_limit = 3;

    void validate() const;
};

struct OptRecord {
    std::size_t iter = 0;
    std::vector<double> alpha;
    double value = 0.0;
    std::vector<double> gradient;
    double grad_norm = 0.0;
    double step = 0.0;  // accepted s at this iterate; 0 on a stall or the last row
    std::uint64_t seed = 0;
    bool stalled = false;
};

struct OptHistory {
    std::vector<std::string> names;
    SeedPolicy seed_policy = SeedPolicy::fresh;
    std::vector<OptRecord> records;
    bool converged = false;

    /// iter,<names...>,J,gradnorm,step
    std::string to_csv() const;
    std::string to_json(int indent = 2) const;
};

struct Evaluation {
    double value = 0.0;
    std::vector<double> gradient;
};

using EvalFn = std::function<Evaluation(std::span<const double> x, std::uint64_t seed)>;
using ValueFn = std::function<double(std::span<const double> x, std::uint64_t seed)>;

/// Projected steepest descent with Armijo backtracking. At iterate x with
/// value J and gradient g, s = s0 beta^m is accepted for the first m with
///   J(P(x - s g)) <= J - c1 g . (x - P(x - s g)),
/// P clamping each coordinate to >= floor. The line search uses the seed of
/// the current iteration.
OptHistory steepest_descent(const EvalFn& eval, const ValueFn& value, std::vector<double> x0,
                            const OptOptions& opt, std::uint64_t base_seed,
                            std::vector<std::string> names = {});

struct OptProblem {
    SimConfig sim;  // N, dt, T, mu, base seed and the fixed temperatures
    ObjectiveAdapter objective = ObjectiveAdapter::moment2(Axis::x);
    std::vector<Axis> free_axes;
    /// adjoint_dsmc | continuous_particle
    std::string gradient_method = "adjoint_dsmc";

    void validate() const;
    InitialConditionParams params_at(std::span<const double> alpha) const;
};

/// Each evaluation is one forward DSMC run and one backward solve.
OptHistory steepest_descent(const OptProblem& problem, std::vector<double> alpha0,
                            const OptOptions& opt);

}  // namespace boltzadj
