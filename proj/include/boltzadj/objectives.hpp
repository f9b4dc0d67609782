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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boltzadj/vec3.hpp"

namespace boltzadj {

enum class ObjectiveKind { moment2, moment4, matching, least_squares };

/// Final-time moments used by the misfit objectives.
struct MomentVector {
    std::array<double, 3> d1{};      // (T_x, T_y, T_z)
    std::array<double, 3> d2{};      // (m4_x, m4_y, m4_z) / 2
    std::array<double, 3> d_pred{};  // (m4_x, m4_y, m4_z)

    static MomentVector from(std::span<const Vec3> v);
};

/// gamma(v) = sum_l c2[l] v_l^2 + c4[l] v_l^4, the scalar adjoint final
/// condition. Its velocity gradient is the per-particle vector condition.
struct FinalConditionKernel {
    std::array<double, 3> c2{};
    std::array<double, 3> c4{};

    double value(const Vec3& v) const;
    Vec3 gradient(const Vec3& v) const;
};

class ObjectiveAdapter {
public:
    static ObjectiveAdapter moment2(Axis l);
    static ObjectiveAdapter moment4(Axis l);
    /// sum_l (T_l - m4_l / 2)^2
    static ObjectiveAdapter matching();
    /// sum_l (d_obs_l - m4_l)^2
    static ObjectiveAdapter least_squares(std::array<double, 3> d_obs);

    /// Parses "moment2" | "moment4" | "matching" | "least_squares".
    static ObjectiveKind parse_kind(std::string_view name);

    ObjectiveKind kind() const { return kind_; }
    Axis axis() const { return axis_; }
    const std::array<double, 3>& d_obs() const { return d_obs_; }
    bool is_moment() const { return kind_ == ObjectiveKind::moment2 || kind_ == ObjectiveKind::moment4; }

    /// Short label: "T_x", "m4_y", "matching", "least_squares".
    std::string name() const;

    double evaluate(std::span<const Vec3> v) const;

    /// J(a) - J(b) for two ensembles of equal size, with the moment changes
    /// summed particle by particle so nearly equal ensembles do not cancel.
    double difference(std::span<const Vec3> a, std::span<const Vec3> b) const;

    /// Kernel with misfit weights frozen at the given ensemble.
    FinalConditionKernel kernel(std::span<const Vec3> v) const;

    /// -N dJ/dv_i for every particle.
    std::vector<Vec3> adjoint_final_vec(std::span<const Vec3> v) const;

    /// -(dJ/df)(v_i) for every particle.
    std::vector<double> adjoint_final_scalar(std::span<const Vec3> v) const;

private:
    ObjectiveKind kind_ = ObjectiveKind::moment2;
    Axis axis_ = Axis::x;
    std::array<double, 3> d_obs_{};
};

}  // namespace boltzadj
