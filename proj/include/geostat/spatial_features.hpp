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
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "geostat/pointpattern.hpp"

namespace geostat {

inline constexpr double kVarianceFloor = 1e-12;

/// D values normalized by the null-model standard deviation, plus the
/// finite-difference derivatives of that series. Invalid series carry all
/// zeros so downstream feature rows keep a fixed layout.
struct NormalizedDSeries {
    std::vector<double> z;
    int order = 0;
    bool valid = false;
};

inline NormalizedDSeries normalize_profile(const DProfile& prof) {
    NormalizedDSeries s;
    s.order = 0;
    s.valid = true;
    s.z.resize(prof.dhat.size());
    for (std::size_t k = 0; k < prof.dhat.size(); ++k)
        s.z[k] = prof.dhat[k] / std::sqrt(std::max(prof.var_d[k], kVarianceFloor));
    return s;
}

/// Forward difference z_{k+1} - z_k; positive where the curve rises.
inline NormalizedDSeries finite_difference(const NormalizedDSeries& s) {
    NormalizedDSeries out;
    out.order = s.order + 1;
    if (!s.valid || s.z.size() < 2) {
        out.valid = false;
        return out;
    }
    out.valid = true;
    out.z.resize(s.z.size() - 1);
    for (std::size_t k = 0; k + 1 < s.z.size(); ++k) out.z[k] = s.z[k + 1] - s.z[k];
    return out;
}

/// Relative discrete positive area over [h_f, h_g] (1-based, inclusive):
/// the signed sum of the normalized series.
inline double g_sum(const NormalizedDSeries& s, std::size_t f, std::size_t g) {
    if (!s.valid || f < 1 || g > s.z.size() || f > g) return 0.0;
    double acc = 0.0;
    for (std::size_t k = f; k <= g; ++k) acc += s.z[k - 1];
    return acc;
}

/// Relative discrete maximum distance over [h_f, h_g].
inline double g_max(const NormalizedDSeries& s, std::size_t f, std::size_t g) {
    if (!s.valid || f < 1 || g > s.z.size() || f > g) return 0.0;
    double best = s.z[f - 1];
    for (std::size_t k = f + 1; k <= g; ++k) best = std::max(best, s.z[k - 1]);
    return best;
}

/// Whole-interval aggregates (the f=1, g=K case of g_sum / g_max).
inline double i_sum(const NormalizedDSeries& s) { return g_sum(s, 1, s.z.size()); }
inline double i_max(const NormalizedDSeries& s) { return g_max(s, 1, s.z.size()); }

/// Four contiguous, near-equal sub-intervals covering [1, len] (1-based).
/// A degenerate interval (possible only for len < 4) comes out empty.
inline std::array<std::pair<std::size_t, std::size_t>, 4> sub_intervals(std::size_t len) {
    std::array<std::pair<std::size_t, std::size_t>, 4> out;
    std::size_t prev = 0;
    for (std::size_t i = 1; i <= 4; ++i) {
        std::size_t cut = (i * len) / 4;
        out[i - 1] = {prev + 1, cut};
        prev = cut;
    }
    return out;
}

// Fixed feature layout: 6 families x 3 orders x (4 sub-intervals + whole).
inline constexpr std::size_t kSpatialFamilies = 6;
inline constexpr std::size_t kSpatialOrders = 3;
inline constexpr std::size_t kSpatialSlots = 5;
inline constexpr std::size_t kSpatialFeatureCount =
    kSpatialFamilies * kSpatialOrders * kSpatialSlots;

/// Family order: the g_Max vectors for the candidate pattern, the joint
/// e-and-query pattern and the cross pair, then the matching g_Sum vectors.
inline const std::array<std::string, kSpatialFamilies>& spatial_family_names() {
    static const std::array<std::string, kSpatialFamilies> kNames = {
        "RDMD1", "RDMD12", "RDMDL12", "RDPA1", "RDPA12", "RDPAL12"};
    return kNames;
}

inline std::size_t spatial_feature_index(std::size_t family, std::size_t order,
                                         std::size_t slot) {
    return (family * kSpatialOrders + order) * kSpatialSlots + slot;
}

inline std::vector<std::string> spatial_feature_names() {
    std::vector<std::string> names(kSpatialFeatureCount);
    for (std::size_t fam = 0; fam < kSpatialFamilies; ++fam) {
        for (std::size_t ord = 0; ord < kSpatialOrders; ++ord) {
            for (std::size_t slot = 0; slot < kSpatialSlots; ++slot) {
                std::string n = spatial_family_names()[fam] + "_o" + std::to_string(ord) +
                                (slot == 4 ? "_sw" : "_s" + std::to_string(slot + 1));
                names[spatial_feature_index(fam, ord, slot)] = n;
            }
        }
    }
    return names;
}

struct SpatialFeatureVector {
    std::array<double, kSpatialFeatureCount> values{};
    std::array<bool, kSpatialFamilies> valid{};  // per family; zeros when invalid

    double at(std::size_t family, std::size_t order, std::size_t slot) const {
        return values[spatial_feature_index(family, order, slot)];
    }
};

namespace detail {

inline void fill_family_pair(SpatialFeatureVector& v, std::size_t max_family,
                             std::size_t sum_family, const std::optional<DProfile>& prof) {
    if (!prof) return;
    v.valid[max_family] = true;
    v.valid[sum_family] = true;
    NormalizedDSeries series = normalize_profile(*prof);
    for (std::size_t ord = 0; ord < kSpatialOrders; ++ord) {
        if (series.valid) {
            auto subs = sub_intervals(series.z.size());
            for (std::size_t sl = 0; sl < 4; ++sl) {
                v.values[spatial_feature_index(max_family, ord, sl)] =
                    g_max(series, subs[sl].first, subs[sl].second);
                v.values[spatial_feature_index(sum_family, ord, sl)] =
                    g_sum(series, subs[sl].first, subs[sl].second);
            }
            v.values[spatial_feature_index(max_family, ord, 4)] = i_max(series);
            v.values[spatial_feature_index(sum_family, ord, 4)] = i_sum(series);
        }
        series = finite_difference(series);
    }
}

}  // namespace detail

/// Builds the six feature families from the three profiles: self-D of the
/// candidate pattern, self-D of the joint pattern, cross-D of the pair.
/// Missing profiles (degenerate patterns or no tile) leave zeroed families
/// with the validity flag off, so the layout never changes shape.
inline SpatialFeatureVector spatial_vector_from_profiles(
    const std::optional<DProfile>& self_e, const std::optional<DProfile>& self_eq,
    const std::optional<DProfile>& cross_eq) {
    SpatialFeatureVector v;
    detail::fill_family_pair(v, 0, 3, self_e);
    detail::fill_family_pair(v, 1, 4, self_eq);
    detail::fill_family_pair(v, 2, 5, cross_eq);
    return v;
}

}  // namespace geostat
