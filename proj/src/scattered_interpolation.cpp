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

#include "boltzadj/scattered_interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "boltzadj/errors.hpp"

namespace boltzadj {

namespace {

constexpr std::uint32_t kLeafSize = 8;

double box_dist2(const Vec3& q, const Vec3& lo, const Vec3& hi) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        double d = 0.0;
        if (q[c] < lo[c]) d = lo[c] - q[c];
        else if (q[c] > hi[c]) d = q[c] - hi[c];
        d2 += d * d;
    }
    return d2;
}

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
    return a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) +
           a.z * (b.x * c.y - b.y * c.x);
}

struct Tet {
    std::array<std::uint32_t, 4> v{};
    Vec3 center;
    double r2 = 0.0;
    bool alive = true;
};

// Circumsphere of (a, b, c, d); r2 = inf for flat tetrahedra.
void circumsphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, Vec3& center,
                  double& r2) {
    const Vec3 ba = b - a;
    const Vec3 ca = c - a;
    const Vec3 da = d - a;
    const double det = det3(ba, ca, da);
    if (!(std::abs(det) > 1e-12 * norm(ba) * norm(ca) * norm(da))) {
        center = a;
        r2 = std::numeric_limits<double>::infinity();
        return;
    }
    const double rb = 0.5 * norm2(ba);
    const double rc = 0.5 * norm2(ca);
    const double rd = 0.5 * norm2(da);
    // Cramer's rule for [ba; ca; da] x = (rb, rc, rd)
    const Vec3 col0{ba.x, ca.x, da.x};
    const Vec3 col1{ba.y, ca.y, da.y};
    const Vec3 col2{ba.z, ca.z, da.z};
    const Vec3 rhs{rb, rc, rd};
    const double inv = 1.0 / det3(col0, col1, col2);
    const Vec3 x{det3(rhs, col1, col2) * inv, det3(col0, rhs, col2) * inv,
                 det3(col0, col1, rhs) * inv};
    center = a + x;
    r2 = norm2(x);
}

// Barycentric coordinates of q in (a, b, c, d); false if flat.
bool barycentric(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                 std::array<double, 4>& lam) {
    const Vec3 ba = b - a;
    const Vec3 ca = c - a;
    const Vec3 da = d - a;
    const Vec3 qa = q - a;
    const double det = det3(ba, ca, da);
    if (det == 0.0 || !std::isfinite(det)) return false;
    lam[1] = det3(qa, ca, da) / det;
    lam[2] = det3(ba, qa, da) / det;
    lam[3] = det3(ba, ca, qa) / det;
    lam[0] = 1.0 - lam[1] - lam[2] - lam[3];
    return true;
}

class LocalDelaunay {
public:
    explicit LocalDelaunay(std::vector<Vec3> pts) : pts_(std::move(pts)) {
        const std::size_t k = pts_.size();
        constexpr double m = 100.0;
        pts_.push_back({m, m, m});
        pts_.push_back({m, -m, -m});
        pts_.push_back({-m, m, -m});
        pts_.push_back({-m, -m, m});
        add_tet({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k + 1),
                 static_cast<std::uint32_t>(k + 2), static_cast<std::uint32_t>(k + 3)});
        for (std::uint32_t i = 0; i < k; ++i) insert(i);
        n_real_ = k;
    }

    /// Real-vertex tetrahedron containing the origin, with its barycentric weights.
    bool locate_origin(std::array<std::uint32_t, 4>& verts, std::array<double, 4>& lam,
                       Vec3& center, double& r2) const {
        double best = -std::numeric_limits<double>::infinity();
        bool found = false;
        for (const Tet& t : tets_) {
            if (!t.alive) continue;
            if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_ || t.v[3] >= n_real_) {
                continue;
            }
            std::array<double, 4> l{};
            if (!barycentric({}, pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], pts_[t.v[3]], l)) {
                continue;
            }
            const double lo = *std::min_element(l.begin(), l.end());
            if (lo >= -1e-12 && lo > best) {
                best = lo;
                verts = t.v;
                lam = l;
                center = t.center;
                r2 = t.r2;
                found = true;
            }
        }
        return found;
    }

private:
    void add_tet(const std::array<std::uint32_t, 4>& v) {
        Tet t;
        t.v = v;
        circumsphere(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[v[3]], t.center, t.r2);
        tets_.push_back(t);
    }

    void insert(std::uint32_t p) {
        const Vec3& x = pts_[p];
        faces_.clear();
        for (Tet& t : tets_) {
            if (!t.alive) continue;
            if (norm2(x - t.center) < t.r2) {
                t.alive = false;
                const auto& v = t.v;
                push_face(v[0], v[1], v[2]);
                push_face(v[0], v[1], v[3]);
                push_face(v[0], v[2], v[3]);
                push_face(v[1], v[2], v[3]);
            }
        }
        std::sort(faces_.begin(), faces_.end());
        for (std::size_t a = 0; a < faces_.size();) {
            std::size_t b = a + 1;
            while (b < faces_.size() && faces_[b] == faces_[a]) ++b;
            if (b - a == 1) {
                const std::uint64_t f = faces_[a];
                add_tet({static_cast<std::uint32_t>(f >> 40), static_cast<std::uint32_t>((f >> 20) & 0xfffff),
                         static_cast<std::uint32_t>(f & 0xfffff), p});
            }
            a = b;
        }
        if (tets_.size() > 64 && dead_fraction() > 0.5) compact();
    }

    void push_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        faces_.push_back((std::uint64_t{a} << 40) | (std::uint64_t{b} << 20) | c);
    }

    double dead_fraction() const {
        std::size_t dead = 0;
        for (const Tet& t : tets_) dead += t.alive ? 0 : 1;
        return static_cast<double>(dead) / static_cast<double>(tets_.size());
    }

    void compact() {
        std::erase_if(tets_, [](const Tet& t) { return !t.alive; });
    }

    std::vector<Vec3> pts_;
    std::vector<Tet> tets_;
    std::vector<std::uint64_t> faces_;
    std::size_t n_real_ = 0;
};

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("kd-tree supports fewer than 2^32 points");
    }
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0U);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    if (!points_.empty()) build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo = node.hi = points_[order_[begin]];
    for (std::uint32_t i = begin; i < end; ++i) {
        const Vec3& p = points_[order_[i]];
        for (std::size_t c = 0; c < 3; ++c) {
            node.lo[c] = std::min(node.lo[c], p[c]);
            node.hi[c] = std::max(node.hi[c], p[c]);
        }
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) return id;

    std::size_t dim = 0;
    double extent = -1.0;
    for (std::size_t c = 0; c < 3; ++c) {
        if (node.hi[c] - node.lo[c] > extent) {
            extent = node.hi[c] - node.lo[c];
            dim = c;
        }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return points_[a][dim] < points_[b][dim]; });
    const std::int32_t l = build(begin, mid);
    const std::int32_t r = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
}

std::vector<std::pair<double, std::uint32_t>> KdTree::knn(const Vec3& q, std::size_t k) const {
    std::vector<std::pair<double, std::uint32_t>> heap;  // max-heap on distance
    if (nodes_.empty() || k == 0) return heap;
    heap.reserve(k + 1);
    auto worst = [&]() {
        return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.front().first;
    };
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const Node& nd = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (box_dist2(q, nd.lo, nd.hi) >= worst()) continue;
        if (nd.left < 0) {
            for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
                const std::uint32_t idx = order_[i];
                const double d2 = norm2(points_[idx] - q);
                if (d2 < worst()) {
                    heap.emplace_back(d2, idx);
                    std::push_heap(heap.begin(), heap.end());
                    if (heap.size() > k) {
                        std::pop_heap(heap.begin(), heap.end());
                        heap.pop_back();
                    }
                }
            }
            continue;
        }
        const Node& l = nodes_[static_cast<std::size_t>(nd.left)];
        const Node& r = nodes_[static_cast<std::size_t>(nd.right)];
        // visit the nearer child first
        if (box_dist2(q, l.lo, l.hi) <= box_dist2(q, r.lo, r.hi)) {
            stack.push_back(nd.right);
            stack.push_back(nd.left);
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    std::sort_heap(heap.begin(), heap.end());
    return heap;
}

bool KdTree::any_within(const Vec3& q, double r2, std::span<const std::uint32_t> exclude) const {
    if (nodes_.empty()) return false;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const Node& nd = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (box_dist2(q, nd.lo, nd.hi) >= r2) continue;
        if (nd.left < 0) {
            for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
                const std::uint32_t idx = order_[i];
                if (norm2(points_[idx] - q) < r2 &&
                    std::find(exclude.begin(), exclude.end(), idx) == exclude.end()) {
                    return true;
                }
            }
            continue;
        }
        stack.push_back(nd.left);
        stack.push_back(nd.right);
    }
    return false;
}

ScatteredInterpolant::ScatteredInterpolant(std::span<const Vec3> points,
                                           std::span<const double> values)
    : tree_(points), values_(values.begin(), values.end()) {
    if (points.size() != values.size()) {
        throw ParameterError("interpolant needs one value per point");
    }
    if (points.size() < 4) throw ParameterError("interpolant needs at least 4 points");
}

double ScatteredInterpolant::evaluate(const Vec3& q, QueryInfo* info) const {
    const auto nearest = tree_.knn(q, 1);
    if (nearest.front().first == 0.0) {
        if (info) {
            info->method = Method::nearest_exact;
            info->neighbors = 1;
        }
        return values_[nearest.front().second];
    }
    double out = 0.0;
    for (std::size_t k = kInitialNeighbors; k <= kMaxNeighbors; k *= 2) {
        if (try_delaunay(q, std::min(k, size()), out, info)) return out;
        if (k >= size()) break;
    }
    return idw(q, info);
}

bool ScatteredInterpolant::try_delaunay(const Vec3& q, std::size_t k, double& out,
                                        QueryInfo* info) const {
    const auto nn = tree_.knn(q, k);
    const double scale = std::sqrt(nn.back().first);
    if (!(scale > 0.0)) return false;
    std::vector<Vec3> local;
    local.reserve(nn.size());
    for (const auto& [d2, idx] : nn) local.push_back((tree_.point(idx) - q) / scale);

    const LocalDelaunay dt(std::move(local));
    std::array<std::uint32_t, 4> lv{};
    std::array<double, 4> lam{};
    Vec3 center;
    double r2 = 0.0;
    if (!dt.locate_origin(lv, lam, center, r2)) return false;
    if (!std::isfinite(r2)) return false;

    std::array<std::uint32_t, 4> gv{};
    for (std::size_t a = 0; a < 4; ++a) gv[a] = nn[lv[a]].second;
    const Vec3 gc = q + scale * center;
    const double gr2 = scale * scale * r2;
    if (tree_.any_within(gc, gr2 * (1.0 - 1e-9), gv)) return false;

    out = 0.0;
    for (std::size_t a = 0; a < 4; ++a) out += lam[a] * values_[gv[a]];
    if (info) {
        info->method = Method::delaunay;
        info->neighbors = k;
        info->vertices = gv;
        info->weights = lam;
    }
    return true;
}

double ScatteredInterpolant::idw(const Vec3& q, QueryInfo* info) const {
    const auto nn = tree_.knn(q, std::min(kFallbackNeighbors, size()));
    double wsum = 0.0;
    double acc = 0.0;
    for (const auto& [d2, idx] : nn) {
        const double w = 1.0 / std::sqrt(d2);
        wsum += w;
        acc += w * values_[idx];
    }
    if (info) {
        info->method = Method::idw;
        info->neighbors = nn.size();
    }
    return acc / wsum;
}

double interpolate_conditional(std::span<const Vec3> points, std::span<const double> values,
                               const Vec3& query) {
    return ScatteredInterpolant(points, values).evaluate(query);
}

}  // namespace boltzadj
