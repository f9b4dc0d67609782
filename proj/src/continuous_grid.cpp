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

#include "boltzadj/continuous_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "boltzadj/adjoint_dsmc.hpp"
#include "boltzadj/errors.hpp"
#include "boltzadj/io.hpp"

namespace boltzadj {

VelocityGrid::VelocityGrid(std::size_t n, double v_th) : n_(n), v_th_(v_th) {
    if (n < 8) throw ParameterError("n_grid must be at least 8");
    if (!(v_th > 0.0) || !std::isfinite(v_th)) throw ParameterError("v_th must be positive");
    dv_ = 10.0 * v_th / static_cast<double>(n - 1);
}

VelocityGrid VelocityGrid::for_params(std::size_t n, const InitialConditionParams& params) {
    params.validate();
    return VelocityGrid(n, std::sqrt(params.mean_temperature()));
}

Vec3 VelocityGrid::node(std::size_t flat) const {
    const std::size_t ix = flat % n_;
    const std::size_t iy = (flat / n_) % n_;
    const std::size_t iz = flat / (n_ * n_);
    return node(ix, iy, iz);
}

namespace {

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

// Index-space trilinear interpolation into a node-major, batch-minor array.
// p must already lie in [0, n-1]^3.
template <int B>
inline void trilinear_acc(const double* g, std::size_t n, double px, double py, double pz,
                          double* acc) {
    const std::size_t hi = n - 2;
    std::size_t x0 = std::min(static_cast<std::size_t>(px), hi);
    std::size_t y0 = std::min(static_cast<std::size_t>(py), hi);
    std::size_t z0 = std::min(static_cast<std::size_t>(pz), hi);
    const double fx = px - static_cast<double>(x0);
    const double fy = py - static_cast<double>(y0);
    const double fz = pz - static_cast<double>(z0);
    const std::size_t sx = B;
    const std::size_t sy = n * B;
    const std::size_t sz = n * n * B;
    const double* c = g + (x0 + n * (y0 + n * z0)) * B;
    for (int b = 0; b < B; ++b) {
        const double c00 = lerp(c[b], c[b + sx], fx);
        const double c10 = lerp(c[b + sy], c[b + sy + sx], fx);
        const double c01 = lerp(c[b + sz], c[b + sz + sx], fx);
        const double c11 = lerp(c[b + sz + sy], c[b + sz + sy + sx], fx);
        acc[b] += lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz);
    }
}

// Points outside the grid are first clamped onto its boundary.
template <int B>
inline void interp_acc(const double* g, std::size_t n, double px, double py, double pz,
                       double* acc) {
    const double top = static_cast<double>(n - 1);
    trilinear_acc<B>(g, n, std::clamp(px, 0.0, top), std::clamp(py, 0.0, top),
                     std::clamp(pz, 0.0, top), acc);
}

// Contiguous x-range of nonzero density in one (y, z) row of the grid.
struct SourceRow {
    int y, z;
    int x_begin, x_end;         // [x_begin, x_end)
    std::vector<double> weight;  // f dv^3 over the range
};

std::vector<SourceRow> source_rows(const GridField& f) {
    const auto n = static_cast<int>(f.grid.n());
    const double dv3 = f.grid.cell_volume();
    std::vector<SourceRow> rows;
    for (int z = 0; z < n; ++z) {
        for (int y = 0; y < n; ++y) {
            int lo = n;
            int hi = -1;
            for (int x = 0; x < n; ++x) {
                if (f.values[f.grid.flat(x, y, z)] != 0.0) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
            }
            if (hi < lo) continue;
            SourceRow r{y, z, lo, hi + 1, {}};
            for (int x = lo; x <= hi; ++x) r.weight.push_back(f.values[f.grid.flat(x, y, z)] * dv3);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

// Splits p in [0, n-1] into a cell index in [0, n-2] and a fraction in [0, 1].
inline void cell_of(double p, int n, int& cell, double& frac) {
    cell = std::min(static_cast<int>(p), n - 2);
    frac = p - static_cast<double>(cell);
}

/*
 * Gain sums G_b(i) = sum_{i1} w(i1) sum_sigma g_b(i + off(i - i1, sigma)) with
 * off(d, sigma) = -d/2 + |d| sigma / 2 in index units. For a fixed difference
 * d the offset, and therefore the trilinear weights, are the same for every
 * node along a row, so the innermost loop runs over a contiguous row segment.
 * Work is split over target rows, which keeps the result independent of the
 * thread count.
 */
template <int B>
void gain_kernel(const std::vector<double>& g, std::size_t n_grid, std::span<const SourceRow> rows,
                 std::span<const Vec3> sigma, std::vector<double>& gain) {
    const int n = static_cast<int>(n_grid);
    const int max_d2 = 3 * (n - 1) * (n - 1);
    std::vector<double> half_len(static_cast<std::size_t>(max_d2) + 1);
    for (int d2 = 0; d2 <= max_d2; ++d2) half_len[static_cast<std::size_t>(d2)] = 0.5 * std::sqrt(static_cast<double>(d2));
    const std::size_t ns = sigma.size();
    const double* gp = g.data();
    const auto sx = static_cast<std::ptrdiff_t>(B);
    const auto sy = static_cast<std::ptrdiff_t>(n) * B;
    const auto sz = static_cast<std::ptrdiff_t>(n) * n * B;
    const double top = static_cast<double>(n - 1);

#pragma omp parallel
    {
        std::vector<double> acc(static_cast<std::size_t>(n) * B);
        std::vector<double> row_gain(static_cast<std::size_t>(n) * B);
#pragma omp for schedule(dynamic, 1)
        for (int target = 0; target < n * n; ++target) {
            const int y = target % n;
            const int z = target / n;
            std::fill(row_gain.begin(), row_gain.end(), 0.0);
            for (const SourceRow& src : rows) {
                const int dy = y - src.y;
                const int dz = z - src.z;
                for (int dx = -(n - 1); dx <= n - 1; ++dx) {
                    // source x1 with target x1 + dx inside the grid
                    const int x1_lo = std::max(src.x_begin, -dx);
                    const int x1_hi = std::min(src.x_end, n - dx);
                    if (x1_lo >= x1_hi) continue;
                    const int len = x1_hi - x1_lo;
                    const double r = half_len[static_cast<std::size_t>(dx * dx + dy * dy + dz * dz)];
                    std::fill(acc.begin(), acc.begin() + len * B, 0.0);
                    for (std::size_t s = 0; s < ns; ++s) {
                        const double ox = -0.5 * dx + r * sigma[s].x;
                        const double py = y - 0.5 * dy + r * sigma[s].y;
                        const double pz = z - 0.5 * dz + r * sigma[s].z;
                        int cy = 0, cz = 0;
                        double fy = 0.0, fz = 0.0;
                        const double py_c = std::clamp(py, 0.0, top);
                        const double pz_c = std::clamp(pz, 0.0, top);
                        cell_of(py_c, n, cy, fy);
                        cell_of(pz_c, n, cz, fz);
                        // px = x1 + dx + ox; the fraction is the same for every x1
                        const double fl = std::floor(ox);
                        const double fx_raw = ox - fl;
                        const int shift = dx + static_cast<int>(fl);
                        // need 0 <= x1 + shift and x1 + shift + fx_raw <= n - 1
                        const int in_lo = std::clamp(-shift, x1_lo, x1_hi);
                        const int last = (fx_raw > 0.0) ? n - 2 - shift : n - 1 - shift;
                        const int in_hi = std::clamp(last + 1, in_lo, x1_hi);
                        // beyond either end of the row: clamp x onto the boundary
                        for (int x1 = x1_lo; x1 < x1_hi; ++x1) {
                            if (x1 >= in_lo && x1 < in_hi) {
                                x1 = in_hi - 1;
                                continue;
                            }
                            const double px = std::clamp(x1 + shift + fx_raw, 0.0, top);
                            trilinear_acc<B>(gp, n_grid, px, py_c, pz_c,
                                             acc.data() + static_cast<std::ptrdiff_t>(x1 - x1_lo) * B);
                        }
                        if (in_lo >= in_hi) continue;
                        // a zero fraction at the last node would need cell n - 1
                        int vec_hi = in_hi;
                        if (in_hi - 1 + shift == n - 1) {
                            --vec_hi;
                            trilinear_acc<B>(gp, n_grid, top, py_c, pz_c,
                                             acc.data() + static_cast<std::ptrdiff_t>(vec_hi - x1_lo) * B);
                        }
                        const double fx = fx_raw;
                        const double* c000 = gp + cy * sy + cz * sz + static_cast<std::ptrdiff_t>(shift) * sx;
                        const double* c010 = c000 + sy;
                        const double* c001 = c000 + sz;
                        const double* c011 = c000 + sy + sz;
                        double* a = acc.data() + static_cast<std::ptrdiff_t>(in_lo - x1_lo) * B;
                        for (int x1 = in_lo; x1 < vec_hi; ++x1) {
                            const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(x1) * sx;
                            for (int b = 0; b < B; ++b) {
                                const double e00 = lerp(c000[o + b], c000[o + b + sx], fx);
                                const double e10 = lerp(c010[o + b], c010[o + b + sx], fx);
                                const double e01 = lerp(c001[o + b], c001[o + b + sx], fx);
                                const double e11 = lerp(c011[o + b], c011[o + b + sx], fx);
                                a[b] += lerp(lerp(e00, e10, fy), lerp(e01, e11, fy), fz);
                            }
                            a += B;
                        }
                    }
                    for (int x1 = x1_lo; x1 < x1_hi; ++x1) {
                        const double w = src.weight[static_cast<std::size_t>(x1 - src.x_begin)];
                        const double* a = acc.data() + static_cast<std::ptrdiff_t>(x1 - x1_lo) * B;
                        double* out = row_gain.data() + static_cast<std::ptrdiff_t>(x1 + dx) * B;
                        for (int b = 0; b < B; ++b) out[b] += w * a[b];
                    }
                }
            }
            const std::size_t row0 = static_cast<std::size_t>(target) * static_cast<std::size_t>(n) * B;
            std::copy(row_gain.begin(), row_gain.end(), gain.begin() + static_cast<std::ptrdiff_t>(row0));
        }
    }
}

template <int B>
void step_batch(std::span<GridField* const> gammas, const GridField& f_next,
                const AngularQuadrature& quad, double dt, double mu, double rho) {
    const VelocityGrid& grid = f_next.grid;
    const std::size_t n = grid.n();
    const std::size_t nodes = grid.nodes();
    const double dv3 = grid.cell_volume();

    const std::vector<SourceRow> rows = source_rows(f_next);

    std::vector<double> g(nodes * B);
    double loss[B] = {};
    for (int b = 0; b < B; ++b) {
        const auto& vals = gammas[static_cast<std::size_t>(b)]->values;
        long double l = 0.0L;
        for (std::size_t i = 0; i < nodes; ++i) {
            g[i * B + static_cast<std::size_t>(b)] = vals[i];
            l += static_cast<long double>(vals[i]) * f_next.values[i] * dv3;
        }
        loss[b] = static_cast<double>(l);
    }

    std::vector<double> gain(nodes * B, 0.0);
    gain_kernel<B>(g, n, rows, quad.nodes(), gain);

    const double gain_coef = 2.0 * mu / (4.0 * std::numbers::pi * rho) * quad.weight();
    for (int b = 0; b < B; ++b) {
        auto& vals = gammas[static_cast<std::size_t>(b)]->values;
        for (std::size_t i = 0; i < nodes; ++i) {
            const double gi = vals[i];
            const double rhs = gain_coef * gain[i * B + static_cast<std::size_t>(b)] -
                               (mu / rho) * loss[b] - mu * gi;
            vals[i] = gi + dt * rhs;
        }
    }
}

double gaussian_pdf(double v, double t) {
    return std::exp(-0.5 * v * v / t) / std::sqrt(2.0 * std::numbers::pi * t);
}

}  // namespace

double GridField::mass() const {
    long double acc = 0.0L;
    for (double x : values) acc += x;
    return static_cast<double>(acc) * grid.cell_volume();
}

double GridField::interpolate(const Vec3& v) const {
    const double inv = 1.0 / grid.dv();
    const double px = (v.x - grid.lo()) * inv;
    const double py = (v.y - grid.lo()) * inv;
    const double pz = (v.z - grid.lo()) * inv;
    double acc[1] = {0.0};
    interp_acc<1>(values.data(), grid.n(), px, py, pz, acc);
    return acc[0];
}

AngularQuadrature::AngularQuadrature(std::size_t n_phi, std::size_t n_theta) {
    if (n_phi == 0 || n_theta == 0) throw ParameterError("angular quadrature needs n_phi, n_theta >= 1");
    weight_ = 4.0 * std::numbers::pi / static_cast<double>(n_phi * n_theta);
    nodes_.reserve(n_phi * n_theta);
    for (std::size_t j = 0; j < n_phi; ++j) {
        const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) /
                                                   static_cast<double>(n_phi);
        for (std::size_t h = 0; h < n_theta; ++h) {
            const double ct = -1.0 + (1.0 + 2.0 * static_cast<double>(h)) / static_cast<double>(n_theta);
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            nodes_.push_back({st * std::cos(phi), st * std::sin(phi), ct});
        }
    }
}

HistogramResult histogram_density(std::span<const Vec3> v, const VelocityGrid& grid) {
    HistogramResult res{GridField(grid, FieldKind::density), 0, 0.0};
    const double inv = 1.0 / grid.dv();
    const auto n = static_cast<long>(grid.n());
    std::vector<std::size_t> counts(grid.nodes(), 0);
    for (const Vec3& x : v) {
        const long ix = std::lround((x.x - grid.lo()) * inv);
        const long iy = std::lround((x.y - grid.lo()) * inv);
        const long iz = std::lround((x.z - grid.lo()) * inv);
        if (ix < 0 || iy < 0 || iz < 0 || ix >= n || iy >= n || iz >= n) {
            ++res.dropped;
            continue;
        }
        ++counts[grid.flat(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy),
                           static_cast<std::size_t>(iz))];
    }
    if (!v.empty()) {
        const double scale = 1.0 / (static_cast<double>(v.size()) * grid.cell_volume());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            res.density.values[i] = static_cast<double>(counts[i]) * scale;
        }
        res.dropped_fraction = static_cast<double>(res.dropped) / static_cast<double>(v.size());
    }
    return res;
}

void renormalize(GridField& f) {
    const double m = f.mass();
    if (m > 0.0) {
        for (double& x : f.values) x /= m;
    }
}

void backward_step_grid(std::span<GridField* const> gammas, const GridField& f_next,
                        const AngularQuadrature& quad, double dt, double mu, double rho) {
    for (const GridField* g : gammas) {
        if (!(g->grid == f_next.grid)) throw ParameterError("adjoint and density grids differ");
    }
    std::size_t start = 0;
    while (start < gammas.size()) {
        const std::size_t b = std::min<std::size_t>(4, gammas.size() - start);
        const auto chunk = gammas.subspan(start, b);
        switch (b) {
            case 1: step_batch<1>(chunk, f_next, quad, dt, mu, rho); break;
            case 2: step_batch<2>(chunk, f_next, quad, dt, mu, rho); break;
            case 3: step_batch<3>(chunk, f_next, quad, dt, mu, rho); break;
            default: step_batch<4>(chunk, f_next, quad, dt, mu, rho); break;
        }
        start += b;
    }
}

GridField backward_step_grid(const GridField& gamma_next, const GridField& f_next,
                             const AngularQuadrature& quad, double dt, double mu, double rho) {
    GridField out = gamma_next;
    GridField* p = &out;
    backward_step_grid(std::span<GridField* const>(&p, 1), f_next, quad, dt, mu, rho);
    return out;
}

GridField final_condition_grid(const FinalConditionKernel& kernel, const VelocityGrid& grid) {
    GridField g(grid, FieldKind::adjoint);
    for (std::size_t i = 0; i < grid.nodes(); ++i) g.values[i] = kernel.value(grid.node(i));
    return g;
}

std::vector<GridField> run_grid_adjoint(std::vector<GridField> gammas,
                                        std::span<const GridField> densities,
                                        const AngularQuadrature& quad, double dt, double mu,
                                        const GridObserver& observer) {
    if (densities.empty()) throw ParameterError("density history is empty");
    const std::size_t m = densities.size() - 1;
    std::vector<GridField*> ptrs;
    for (GridField& g : gammas) ptrs.push_back(&g);
    if (observer) observer(m, gammas);
    for (std::size_t k = m; k > 0; --k) {
        backward_step_grid(ptrs, densities[k], quad, dt, mu, 1.0);
        if (observer) observer(k - 1, gammas);
    }
    return gammas;
}

double gradient_grid(const GridField& gamma0, const InitialConditionParams& params, Axis p) {
    params.validate();
    const VelocityGrid& grid = gamma0.grid;
    const std::size_t n = grid.n();
    const double tp = params[p];
    const std::size_t c = index(p);
    std::array<std::vector<double>, 3> pdf;
    for (std::size_t l = 0; l < 3; ++l) {
        pdf[l].resize(n);
        for (std::size_t i = 0; i < n; ++i) pdf[l][i] = gaussian_pdf(grid.coord(i), params[kAllAxes[l]]);
    }
    long double acc = 0.0L;
    for (std::size_t iz = 0; iz < n; ++iz) {
        for (std::size_t iy = 0; iy < n; ++iy) {
            for (std::size_t ix = 0; ix < n; ++ix) {
                const std::array<std::size_t, 3> id{ix, iy, iz};
                const double vp = grid.coord(id[c]);
                const double f0 = pdf[0][ix] * pdf[1][iy] * pdf[2][iz];
                const double w = (vp * vp / tp - 1.0) / (2.0 * tp);
                acc += gamma0.values[grid.flat(ix, iy, iz)] * w * f0;
            }
        }
    }
    return -static_cast<double>(acc) * grid.cell_volume();
}

std::array<GridField, 3> gradient_field(const GridField& g) {
    const VelocityGrid& grid = g.grid;
    const std::size_t n = grid.n();
    std::array<GridField, 3> out{GridField(grid, FieldKind::adjoint), GridField(grid, FieldKind::adjoint),
                                 GridField(grid, FieldKind::adjoint)};
    const double inv = 1.0 / grid.dv();
    for (std::size_t iz = 0; iz < n; ++iz) {
        for (std::size_t iy = 0; iy < n; ++iy) {
            for (std::size_t ix = 0; ix < n; ++ix) {
                const std::array<std::size_t, 3> id{ix, iy, iz};
                for (std::size_t c = 0; c < 3; ++c) {
                    auto lo = id;
                    auto hi = id;
                    double span = 2.0;
                    if (id[c] == 0) {
                        span = 1.0;
                    } else {
                        lo[c] -= 1;
                    }
                    if (id[c] == n - 1) {
                        span -= 1.0;
                    } else {
                        hi[c] += 1;
                    }
                    const double d = g.values[grid.flat(hi[0], hi[1], hi[2])] -
                                     g.values[grid.flat(lo[0], lo[1], lo[2])];
                    out[c].values[grid.flat(ix, iy, iz)] = d * inv / span;
                }
            }
        }
    }
    return out;
}

StepObserver density_recorder(GridDensityHistory& history) {
    return [&history](const ParticleEnsemble& ens) {
        HistogramResult h = histogram_density(ens.velocities, history.grid);
        history.max_dropped_fraction = std::max(history.max_dropped_fraction, h.dropped_fraction);
        renormalize(h.density);
        history.densities.push_back(std::move(h.density));
    };
}

std::vector<std::array<double, 3>> continuous_grid_gradients(
    const GridDensityHistory& history, const ParticleEnsemble& final,
    const InitialConditionParams& params, std::span<const ObjectiveAdapter> objectives,
    const GridSchemeOptions& opt, double dt, double mu, const GridObserver& observer) {
    const AngularQuadrature quad(opt.n_phi, opt.n_theta);
    std::vector<GridField> finals;
    for (const ObjectiveAdapter& obj : objectives) {
        finals.push_back(final_condition_grid(obj.kernel(final.velocities), history.grid));
    }
    const auto g0 = run_grid_adjoint(std::move(finals), history.densities, quad, dt, mu, observer);
    std::vector<std::array<double, 3>> out;
    for (const GridField& g : g0) {
        std::array<double, 3> row{};
        for (Axis a : kAllAxes) row[index(a)] = gradient_grid(g, params, a);
        out.push_back(row);
    }
    return out;
}

GradientReport continuous_grid_gradient(const SimConfig& cfg, const ObjectiveAdapter& obj,
                                        const GridSchemeOptions& opt) {
    GridDensityHistory hist{VelocityGrid::for_params(opt.n_grid, cfg.initial), {}, 0.0};
    const ForwardRunResult run = run_forward(cfg, density_recorder(hist));
    const std::array<ObjectiveAdapter, 1> objs{obj};
    const auto g = continuous_grid_gradients(hist, run.final_ensemble, cfg.initial, objs, opt,
                                             cfg.dt, cfg.mu);
    GradientReport rep;
    rep.objective = obj.name();
    rep.method = "continuous_grid";
    rep.n = cfg.n;
    rep.seed = cfg.seed;
    for (Axis a : kAllAxes) {
        rep.alpha_names.push_back(alpha_name(a));
        rep.values.push_back(g[0][index(a)]);
    }
    return rep;
}

void write_grid_field(std::ostream& os, const GridField& g, double t) {
    detail::write_u64(os, g.grid.n());
    detail::write_f64(os, g.grid.v_th());
    detail::write_f64(os, t);
    for (double x : g.values) detail::write_f64(os, x);
}

std::pair<GridField, double> read_grid_field(std::istream& is, FieldKind kind) {
    const std::uint64_t n = detail::read_u64(is);
    const double v_th = detail::read_f64(is);
    const double t = detail::read_f64(is);
    if (n < 8 || n > 4096) throw IoError("implausible n_grid in grid snapshot");
    GridField g(VelocityGrid(n, v_th), kind);
    for (double& x : g.values) x = detail::read_f64(is);
    return {std::move(g), t};
}

void save_grid_field(const std::filesystem::path& path, const GridField& g, double t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path.string());
    write_grid_field(os, g, t);
}

std::pair<GridField, double> load_grid_field(const std::filesystem::path& path, FieldKind kind) {
    if (!std::filesystem::exists(path)) throw IoError("file not found: " + path.string());
    std::ifstream is(path, std::ios::binary);
    return read_grid_field(is, kind);
}

}  // namespace boltzadj
