// Copyright 2026 The geostat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "geostat/common.hpp"
#include "geostat/geo.hpp"
#include "geostat/stats.hpp"

namespace geostat {

/// Rectangular study window, km. Patterns live in [0,width] x [0,height].
struct Window {
    double width = 1.0;
    double height = 1.0;
    double area() const { return width * height; }
};

/// Planar point set for one tag (or one side of a tag pair) inside a tile.
struct TagPointPattern {
    std::string tag;
    std::vector<PlanarPoint> points;
    Window window;

    std::size_t n() const { return points.size(); }
    double intensity() const { return static_cast<double>(points.size()) / window.area(); }
};

/// Strictly increasing, equidistant distance scales h_1..h_K in km.
struct ScaleGrid {
    std::vector<double> h;

    std::size_t size() const { return h.size(); }

    static ScaleGrid regular(double start = 0.1, double step = 0.1, std::size_t count = 10) {
        if (start <= 0.0 || step <= 0.0 || count == 0)
            throw std::invalid_argument("scale grid needs positive start, step and count");
        ScaleGrid g;
        g.h.reserve(count);
        for (std::size_t k = 0; k < count; ++k)
            g.h.push_back(start + step * static_cast<double>(k));
        return g;
    }
};

namespace detail {

/// Ordered-pair counts within each h_k for two (possibly identical) point
/// sets; the self case excludes k == l. Counting is exact integer work so a
/// binned production path and the O(n^2) oracle cannot drift apart.
inline std::vector<std::uint64_t> pair_counts(const std::vector<PlanarPoint>& a,
                                              const std::vector<PlanarPoint>& b, bool self,
                                              const ScaleGrid& grid) {
    std::vector<double> h2(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) h2[k] = grid.h[k] * grid.h[k];
    std::vector<std::uint64_t> at(grid.size() + 1, 0);
    const double hmax2 = h2.back();
    if (self) {
        for (std::size_t i = 0; i + 1 < a.size(); ++i) {
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                double dx = a[i].x - a[j].x, dy = a[i].y - a[j].y;
                double d2 = dx * dx + dy * dy;
                if (d2 > hmax2) continue;
                std::size_t k = std::lower_bound(h2.begin(), h2.end(), d2) - h2.begin();
                at[k] += 2;  // both orderings of the pair
            }
        }
    } else {
        for (const auto& pa : a) {
            for (const auto& pb : b) {
                double dx = pa.x - pb.x, dy = pa.y - pb.y;
                double d2 = dx * dx + dy * dy;
                if (d2 > hmax2) continue;
                std::size_t k = std::lower_bound(h2.begin(), h2.end(), d2) - h2.begin();
                ++at[k];
            }
        }
    }
    std::vector<std::uint64_t> cum(grid.size());
    std::uint64_t run = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        run += at[k];
        cum[k] = run;
    }
    return cum;
}

}  // namespace detail

/// Self K-function estimate over the grid: (1/(lambda^2 A)) * ordered pairs
/// within h, no edge correction. Needs n >= 2; smaller patterns are
/// degenerate and yield nullopt (callers zero their features).
inline std::optional<std::vector<double>> estimate_k(const TagPointPattern& p,
                                                     const ScaleGrid& grid) {
    std::size_t n = p.n();
    if (n < 2) return std::nullopt;
    auto counts = detail::pair_counts(p.points, p.points, /*self=*/true, grid);
    double scale = p.window.area() / (static_cast<double>(n) * static_cast<double>(n));
    std::vector<double> k(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        k[i] = static_cast<double>(counts[i]) * scale;
    return k;
}

/// Cross K-function estimate; both patterns must share the window and be
/// non-empty. Symmetric in its arguments.
inline std::optional<std::vector<double>> estimate_k_cross(const TagPointPattern& pi,
                                                           const TagPointPattern& pj,
                                                           const ScaleGrid& grid) {
    if (pi.n() < 1 || pj.n() < 1) return std::nullopt;
    auto counts = detail::pair_counts(pi.points, pj.points, /*self=*/false, grid);
    double scale =
        pi.window.area() / (static_cast<double>(pi.n()) * static_cast<double>(pj.n()));
    std::vector<double> k(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        k[i] = static_cast<double>(counts[i]) * scale;
    return k;
}

struct LDSeries {
    std::vector<double> lhat;
    std::vector<double> dhat;
};

/// L = sqrt(K/pi), D = L - h; the variance-stabilized zero-centered form.
inline LDSeries k_to_d(const std::vector<double>& khat, const ScaleGrid& grid) {
    LDSeries out;
    out.lhat.resize(khat.size());
    out.dhat.resize(khat.size());
    for (std::size_t i = 0; i < khat.size(); ++i) {
        out.lhat[i] = std::sqrt(khat[i] / std::numbers::pi);
        out.dhat[i] = out.lhat[i] - grid.h[i];
    }
    return out;
}

enum class PatternKind { kSelf, kCross };

/// Null-model summary per grid point from n_sims Monte Carlo replicates.
struct NullEnvelope {
    std::vector<double> lo;     // minimum of the simulated D curves
    std::vector<double> hi;     // maximum
    std::vector<double> var_d;  // sample variance across simulations
};

/// K/L/D values with the null envelope for one pattern (or pattern pair).
struct DProfile {
    ScaleGrid grid;
    PatternKind kind = PatternKind::kSelf;
    std::vector<double> khat, lhat, dhat;
    std::vector<double> var_d, env_lo, env_hi;
};

/// Monte Carlo null: CSR resampling for a single pattern, random labelling
/// over the pooled points for a pair. Per-simulation seeds are derived by
/// index, so results do not depend on the worker count. The envelope is the
/// pointwise min/max of the simulated curves: with 99 simulations this is
/// the classical 95% Monte Carlo envelope test for a curve that may exit
/// anywhere on the scale grid.
inline std::optional<NullEnvelope> simulate_null(const TagPointPattern& pi,
                                                 const TagPointPattern* pj, PatternKind kind,
                                                 const ScaleGrid& grid, std::size_t n_sims,
                                                 std::uint64_t seed) {
    if (n_sims < 2) throw std::invalid_argument("simulate_null needs n_sims >= 2");
    if (kind == PatternKind::kSelf) {
        if (pi.n() < 2) return std::nullopt;
    } else {
        if (!pj || pi.n() < 1 || pj->n() < 1) return std::nullopt;
    }

    std::vector<PlanarPoint> pooled;
    if (kind == PatternKind::kCross) {
        pooled = pi.points;
        pooled.insert(pooled.end(), pj->points.begin(), pj->points.end());
    }

    std::vector<std::vector<double>> sims(n_sims);
    parallel_for(n_sims, [&](std::size_t s) {
        auto rng = make_rng(derive_seed(seed, s));
        if (kind == PatternKind::kSelf) {
            TagPointPattern sim;
            sim.window = pi.window;
            sim.points.resize(pi.n());
            for (auto& pt : sim.points) {
                pt.x = uniform01(rng) * pi.window.width;
                pt.y = uniform01(rng) * pi.window.height;
            }
            sims[s] = k_to_d(*estimate_k(sim, grid), grid).dhat;
        } else {
            std::vector<std::uint32_t> order(pooled.size());
            for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
            shuffle_indices(order, rng);
            TagPointPattern a, b;
            a.window = b.window = pi.window;
            a.points.reserve(pi.n());
            b.points.reserve(pj->n());
            for (std::size_t i = 0; i < order.size(); ++i)
                (i < pi.n() ? a : b).points.push_back(pooled[order[i]]);
            sims[s] = k_to_d(*estimate_k_cross(a, b, grid), grid).dhat;
        }
    });

    NullEnvelope env;
    env.lo.resize(grid.size());
    env.hi.resize(grid.size());
    env.var_d.resize(grid.size());
    std::vector<double> col(n_sims);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (std::size_t s = 0; s < n_sims; ++s) col[s] = sims[s][k];
        env.lo[k] = *std::min_element(col.begin(), col.end());
        env.hi[k] = *std::max_element(col.begin(), col.end());
        env.var_d[k] = sample_variance(col);
    }
    return env;
}

/// Full profile for one pattern against the CSR null.
inline std::optional<DProfile> profile_self(const TagPointPattern& p, const ScaleGrid& grid,
                                            std::size_t n_sims, std::uint64_t seed) {
    auto k = estimate_k(p, grid);
    if (!k) return std::nullopt;
    auto env = simulate_null(p, nullptr, PatternKind::kSelf, grid, n_sims, seed);
    if (!env) return std::nullopt;
    DProfile prof;
    prof.grid = grid;
    prof.kind = PatternKind::kSelf;
    prof.khat = std::move(*k);
    auto ld = k_to_d(prof.khat, grid);
    prof.lhat = std::move(ld.lhat);
    prof.dhat = std::move(ld.dhat);
    prof.env_lo = std::move(env->lo);
    prof.env_hi = std::move(env->hi);
    prof.var_d = std::move(env->var_d);
    return prof;
}

/// Full cross profile for a pattern pair against the random-labelling null.
inline std::optional<DProfile> profile_cross(const TagPointPattern& pi,
                                             const TagPointPattern& pj, const ScaleGrid& grid,
                                             std::size_t n_sims, std::uint64_t seed) {
    auto k = estimate_k_cross(pi, pj, grid);
    if (!k) return std::nullopt;
    auto env = simulate_null(pi, &pj, PatternKind::kCross, grid, n_sims, seed);
    if (!env) return std::nullopt;
    DProfile prof;
    prof.grid = grid;
    prof.kind = PatternKind::kCross;
    prof.khat = std::move(*k);
    auto ld = k_to_d(prof.khat, grid);
    prof.lhat = std::move(ld.lhat);
    prof.dhat = std::move(ld.dhat);
    prof.env_lo = std::move(env->lo);
    prof.env_hi = std::move(env->hi);
    prof.var_d = std::move(env->var_d);
    return prof;
}

enum class Interaction { kRepulsion, kIndependence, kAttraction };

struct InteractionVerdict {
    std::vector<Interaction> per_scale;
    Interaction overall = Interaction::kIndependence;
};

/// Envelope test per scale; the overall call is attraction when the D curve
/// breaks the upper envelope somewhere and never the lower one (mirrored for
/// repulsion), independence otherwise.
inline InteractionVerdict classify_interaction(const DProfile& prof) {
    InteractionVerdict v;
    v.per_scale.resize(prof.dhat.size(), Interaction::kIndependence);
    bool any_up = false, any_down = false;
    for (std::size_t k = 0; k < prof.dhat.size(); ++k) {
        if (prof.dhat[k] > prof.env_hi[k]) {
            v.per_scale[k] = Interaction::kAttraction;
            any_up = true;
        } else if (prof.dhat[k] < prof.env_lo[k]) {
            v.per_scale[k] = Interaction::kRepulsion;
            any_down = true;
        }
    }
    if (any_up && !any_down)
        v.overall = Interaction::kAttraction;
    else if (any_down && !any_up)
        v.overall = Interaction::kRepulsion;
    return v;
}

}  // namespace geostat
