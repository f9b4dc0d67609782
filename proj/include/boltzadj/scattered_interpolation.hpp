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
#include <span>
#include <utility>
#include <vector>

#include "boltzadj/vec3.hpp"

namespace boltzadj {

/// Static 3-D kd-tree over a point set it copies.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::span<const Vec3> points);

    std::size_t size() const { return points_.size(); }
    const Vec3& point(std::uint32_t i) const { return points_[i]; }

    /// k nearest points as (squared distance, index), closest first.
    std::vector<std::pair<double, std::uint32_t>> knn(const Vec3& q, std::size_t k) const;

    /// True if some point other than those in `exclude` lies strictly within
    /// squared distance r2 of q.
    bool any_within(const Vec3& q, double r2, std::span<const std::uint32_t> exclude) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        Vec3 lo;
        Vec3 hi;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

/*!
 * Piecewise-linear interpolation on the Delaunay tetrahedralization of a
 * scattered 3-D point cloud.
 *
 * The containing Delaunay tetrahedron is found per query: the K nearest
 * samples are triangulated locally (Bowyer-Watson), the tetrahedron holding
 * the query is taken, and its circumsphere is checked empty against the
 * whole cloud. K doubles on failure. Queries outside the hull, or where the
 * search gives up, fall back to inverse-distance weighting over the 8
 * nearest samples.
 */
class ScatteredInterpolant {
public:
    enum class Method { delaunay, nearest_exact, idw };

    struct QueryInfo {
        Method method = Method::delaunay;
        std::size_t neighbors = 0;
        std::array<std::uint32_t, 4> vertices{};
        std::array<double, 4> weights{};
    };

    static constexpr std::size_t kInitialNeighbors = 24;
    static constexpr std::size_t kMaxNeighbors = 192;
    static constexpr std::size_t kFallbackNeighbors = 8;

    ScatteredInterpolant(std::span<const Vec3> points, std::span<const double> values);

    double evaluate(const Vec3& q, QueryInfo* info = nullptr) const;

    std::size_t size() const { return values_.size(); }

private:
    bool try_delaunay(const Vec3& q, std::size_t k, double& out, QueryInfo* info) const;
    double idw(const Vec3& q, QueryInfo* info) const;

    KdTree tree_;
    std::vector<double> values_;
};

/// E[value | v = query] from the cloud (points, values).
double interpolate_conditional(std::span<const Vec3> points, std::span<const double> values,
                               const Vec3& query);

}  // namespace boltzadj
