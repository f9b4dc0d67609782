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

#include "boltzadj/objectives.hpp"

#include <string>

#include "boltzadj/errors.hpp"
#include "boltzadj/forward_dsmc.hpp"

namespace boltzadj {

MomentVector MomentVector::from(std::span<const Vec3> v) {
    const MomentSnapshot s = moments(v);
    MomentVector out;
    for (std::size_t l = 0; l < 3; ++l) {
        out.d1[l] = s.temperature[l];
        out.d_pred[l] = s.m4[l];
        out.d2[l] = 0.5 * s.m4[l];
    }
    return out;
}

double FinalConditionKernel::value(const Vec3& v) const {
    double g = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        const double a2 = v[l] * v[l];
        g += c2[l] * a2 + c4[l] * a2 * a2;
    }
    return g;
}

Vec3 FinalConditionKernel::gradient(const Vec3& v) const {
    Vec3 g;
    for (std::size_t l = 0; l < 3; ++l) {
        const double a = v[l];
        g[l] = 2.0 * c2[l] * a + 4.0 * c4[l] * a * a * a;
    }
    return g;
}

ObjectiveAdapter ObjectiveAdapter::moment2(Axis l) {
    ObjectiveAdapter o;
    o.kind_ = ObjectiveKind::moment2;
    o.axis_ = l;
    return o;
}

ObjectiveAdapter ObjectiveAdapter::moment4(Axis l) {
    ObjectiveAdapter o;
    o.kind_ = ObjectiveKind::moment4;
    o.axis_ = l;
    return o;
}

ObjectiveAdapter ObjectiveAdapter::matching() {
    ObjectiveAdapter o;
    o.kind_ = ObjectiveKind::matching;
    return o;
}

ObjectiveAdapter ObjectiveAdapter::least_squares(std::array<double, 3> d_obs) {
    ObjectiveAdapter o;
    o.kind_ = ObjectiveKind::least_squares;
    o.d_obs_ = d_obs;
    return o;
}

ObjectiveKind ObjectiveAdapter::parse_kind(std::string_view name) {
    if (name == "moment2") return ObjectiveKind::moment2;
    if (name == "moment4") return ObjectiveKind::moment4;
    if (name == "matching") return ObjectiveKind::matching;
    if (name == "least_squares") return ObjectiveKind::least_squares;
    throw ParameterError("unknown objective kind '" + std::string(name) + "'");
}

std::string ObjectiveAdapter::name() const {
    switch (kind_) {
        case ObjectiveKind::moment2: return "T_" + axis_name(axis_);
        case ObjectiveKind::moment4: return "m4_" + axis_name(axis_);
        case ObjectiveKind::matching: return "matching";
        case ObjectiveKind::least_squares: return "least_squares";
    }
    return "unknown";
}

double ObjectiveAdapter::evaluate(std::span<const Vec3> v) const {
    switch (kind_) {
        case ObjectiveKind::moment2: return moment(v, MomentKind::T, axis_);
        case ObjectiveKind::moment4: return moment(v, MomentKind::m4, axis_);
        case ObjectiveKind::matching: {
            const MomentVector m = MomentVector::from(v);
            double j = 0.0;
            for (std::size_t l = 0; l < 3; ++l) j += (m.d1[l] - m.d2[l]) * (m.d1[l] - m.d2[l]);
            return j;
        }
        case ObjectiveKind::least_squares: {
            const MomentVector m = MomentVector::from(v);
            double j = 0.0;
            for (std::size_t l = 0; l < 3; ++l) {
                j += (d_obs_[l] - m.d_pred[l]) * (d_obs_[l] - m.d_pred[l]);
            }
            return j;
        }
    }
    return 0.0;
}

double ObjectiveAdapter::difference(std::span<const Vec3> a, std::span<const Vec3> b) const {
    if (a.size() != b.size() || a.empty()) throw ParameterError("ensembles must be nonempty and of equal size");
    std::array<long double, 3> d2{}, d4{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t l = 0; l < 3; ++l) {
            if (a[i][l] == b[i][l]) continue;
            const long double x2 = static_cast<long double>(a[i][l]) * a[i][l];
            const long double y2 = static_cast<long double>(b[i][l]) * b[i][l];
            d2[l] += x2 - y2;
            d4[l] += x2 * x2 - y2 * y2;
        }
    }
    const auto n = static_cast<long double>(a.size());
    std::array<long double, 3> dt{}, dm4{};
    for (std::size_t l = 0; l < 3; ++l) {
        dt[l] = d2[l] / n;
        dm4[l] = d4[l] / n;
    }
    const std::size_t k = index(axis_);
    switch (kind_) {
        case ObjectiveKind::moment2: return static_cast<double>(dt[k]);
        case ObjectiveKind::moment4: return static_cast<double>(dm4[k]);
        case ObjectiveKind::matching: {
            // (R + dR)^2 - R^2 = dR (2R + dR)
            const MomentVector m = MomentVector::from(b);
            long double j = 0.0L;
            for (std::size_t l = 0; l < 3; ++l) {
                const long double r = static_cast<long double>(m.d1[l]) - m.d2[l];
                const long double dr = dt[l] - dm4[l] / 2;
                j += dr * (2 * r + dr);
            }
            return static_cast<double>(j);
        }
        case ObjectiveKind::least_squares: {
            const MomentVector m = MomentVector::from(b);
            long double j = 0.0L;
            for (std::size_t l = 0; l < 3; ++l) {
                const long double r = static_cast<long double>(d_obs_[l]) - m.d_pred[l];
                j += -dm4[l] * (2 * r - dm4[l]);
            }
            return static_cast<double>(j);
        }
    }
    return 0.0;
}

FinalConditionKernel ObjectiveAdapter::kernel(std::span<const Vec3> v) const {
    FinalConditionKernel k;
    switch (kind_) {
        case ObjectiveKind::moment2: k.c2[index(axis_)] = -1.0; break;
        case ObjectiveKind::moment4: k.c4[index(axis_)] = -1.0; break;
        case ObjectiveKind::matching: {
            // -dJ/df = -2 R_l (v_l^2 - v_l^4 / 2), R_l = T_l - m4_l / 2
            const MomentVector m = MomentVector::from(v);
            for (std::size_t l = 0; l < 3; ++l) {
                const double r = m.d1[l] - m.d2[l];
                k.c2[l] = -2.0 * r;
                k.c4[l] = r;
            }
            break;
        }
        case ObjectiveKind::least_squares: {
            const MomentVector m = MomentVector::from(v);
            for (std::size_t l = 0; l < 3; ++l) k.c4[l] = 2.0 * (d_obs_[l] - m.d_pred[l]);
            break;
        }
    }
    return k;
}

std::vector<Vec3> ObjectiveAdapter::adjoint_final_vec(std::span<const Vec3> v) const {
    const FinalConditionKernel k = kernel(v);
    std::vector<Vec3> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) g[i] = k.gradient(v[i]);
    return g;
}

std::vector<double> ObjectiveAdapter::adjoint_final_scalar(std::span<const Vec3> v) const {
    const FinalConditionKernel k = kernel(v);
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) g[i] = k.value(v[i]);
    return g;
}

}  // namespace boltzadj
