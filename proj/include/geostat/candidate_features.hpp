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

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geostat/common.hpp"
#include "geostat/geo.hpp"
#include "geostat/pointpattern.hpp"
#include "geostat/retrieval.hpp"
#include "geostat/spatial_features.hpp"
#include "geostat/temporal_term_features.hpp"

namespace geostat {

/// The X (term), Y (temporal) and Z (spatial) vectors for one candidate
/// expansion term against one query.
struct CandidateFeatures {
    TermFeatureVector term;
    TemporalFeatureVector temporal;
    SpatialFeatureVector spatial;

    bool spatial_available() const {
        for (bool v : spatial.valid)
            if (v) return true;
        return false;
    }
};

namespace detail {

inline void push_opt(std::vector<double>& row, const std::optional<double>& v) {
    row.push_back(v.value_or(0.0));
}

}  // namespace detail

/// Term+temporal row (the temporal classifier's input): 12 statistics, 5
/// temporal values, then the 7 validity indicators.
inline std::vector<double> flatten_term_temporal(const CandidateFeatures& f) {
    std::vector<double> row;
    row.reserve(24);
    for (const ScopeTermStats* s : {&f.term.feedback, &f.term.whole}) {
        row.push_back(s->df0);
        row.push_back(s->df1);
        row.push_back(s->df2);
        row.push_back(s->df3);
        row.push_back(s->cooc_single);
        row.push_back(s->cooc_pair);
    }
    detail::push_opt(row, f.temporal.kurt_e);
    detail::push_opt(row, f.temporal.kurt_eq);
    detail::push_opt(row, f.temporal.ac_e);
    detail::push_opt(row, f.temporal.ac_eq);
    detail::push_opt(row, f.temporal.cc);
    row.push_back(f.term.feedback.defined ? 1.0 : 0.0);
    row.push_back(f.term.whole.defined ? 1.0 : 0.0);
    row.push_back(f.temporal.kurt_e.has_value() ? 1.0 : 0.0);
    row.push_back(f.temporal.kurt_eq.has_value() ? 1.0 : 0.0);
    row.push_back(f.temporal.ac_e.has_value() ? 1.0 : 0.0);
    row.push_back(f.temporal.ac_eq.has_value() ? 1.0 : 0.0);
    row.push_back(f.temporal.cc.has_value() ? 1.0 : 0.0);
    return row;
}

/// Full row for the spatio-temporal classifier: the term+temporal block,
/// the 90 spatial values and the 6 family validity flags.
inline std::vector<double> flatten_full(const CandidateFeatures& f) {
    std::vector<double> row = flatten_term_temporal(f);
    row.reserve(row.size() + kSpatialFeatureCount + kSpatialFamilies);
    for (double v : f.spatial.values) row.push_back(v);
    for (bool v : f.spatial.valid) row.push_back(v ? 1.0 : 0.0);
    return row;
}

inline std::vector<std::string> term_temporal_feature_names() {
    std::vector<std::string> names;
    for (const char* scope : {"Feedback", "Whole"}) {
        for (const char* base : {"DF0", "DF1", "DF2", "DF3", "CoOccSingle", "CoOccPair"})
            names.push_back(std::string(base) + "_" + scope);
    }
    for (const char* n : {"KURT1", "KURT12", "AC1", "AC12", "CC"}) names.push_back(n);
    for (const char* n : {"valid_df_fb", "valid_df_whole", "valid_kurt1", "valid_kurt12",
                          "valid_ac1", "valid_ac12", "valid_cc"})
        names.push_back(n);
    return names;
}

inline std::vector<std::string> full_feature_names() {
    std::vector<std::string> names = term_temporal_feature_names();
    for (const auto& n : spatial_feature_names()) names.push_back(n);
    for (const auto& fam : spatial_family_names()) names.push_back("valid_" + fam);
    return names;
}

/// Spatial feature extraction settings. Patterns larger than
/// max_pattern_points are deterministically subsampled before profiling to
/// bound the Monte Carlo cost; 0 disables the cap.
struct SpatialConfig {
    ScaleGrid grid = ScaleGrid::regular();
    std::size_t n_sims = 99;
    std::uint64_t seed = 1;
    std::size_t max_pattern_points = 256;
};

/// Builds tag point patterns from a tile roster and turns them into the six
/// spatial feature families. Self profiles are cached per (tile, tag).
class SpatialFeatureExtractor {
  public:
    SpatialFeatureExtractor(const Corpus& corpus, const TileIndex& tiles, SpatialConfig cfg = {})
        : corpus_(&corpus), tiles_(&tiles), cfg_(std::move(cfg)) {}

    const SpatialConfig& config() const { return cfg_; }

    /// Pictures in the tile carrying `tag`, projected to tile km coordinates.
    TagPointPattern pattern_for_tag(std::int32_t tile_id, const std::string& tag) const {
        return make_pattern(tile_id, tag,
                            [&](const Picture& p) { return p.has_tag(tag); });
    }

    /// Pictures in the tile carrying at least one of the query terms.
    TagPointPattern pattern_for_any(std::int32_t tile_id,
                                    const std::vector<std::string>& terms) const {
        std::string label = "q";
        for (const auto& t : terms) {
            label += '|';
            label += t;
        }
        return make_pattern(tile_id, label,
                            [&](const Picture& p) { return p.has_any(terms); });
    }

    std::optional<DProfile> self_profile(std::int32_t tile_id, const std::string& tag) {
        std::string key = std::to_string(tile_id) + "/" + tag;
        {
            std::lock_guard lock(mu_);
            auto it = self_cache_.find(key);
            if (it != self_cache_.end()) return it->second;
        }
        TagPointPattern p = pattern_for_tag(tile_id, tag);
        auto prof = profile_self(p, cfg_.grid, cfg_.n_sims, pattern_seed(tile_id, tag, 0));
        std::lock_guard lock(mu_);
        return self_cache_.emplace(std::move(key), std::move(prof)).first->second;
    }

    /// Assembles the six families from three profiles: self-D of P(e),
    /// self-D of P(e and Q), cross-D of (P(e), P(Q)). No tile means every
    /// family is invalid.
    SpatialFeatureVector extract(const std::string& e, const std::vector<std::string>& terms,
                                 std::optional<std::int32_t> tile_id) {
        if (!tile_id) return SpatialFeatureVector{};
        auto self_e = self_profile(*tile_id, e);

        TagPointPattern p_eq = make_pattern(*tile_id, e + "&q", [&](const Picture& p) {
            return p.has_tag(e) && p.has_any(terms);
        });
        auto self_eq =
            profile_self(p_eq, cfg_.grid, cfg_.n_sims, pattern_seed(*tile_id, e, 1));

        TagPointPattern p_e = pattern_for_tag(*tile_id, e);
        TagPointPattern p_q = pattern_for_any(*tile_id, terms);
        auto cross =
            profile_cross(p_e, p_q, cfg_.grid, cfg_.n_sims, pattern_seed(*tile_id, e, 2));

        return spatial_vector_from_profiles(self_e, self_eq, cross);
    }

  private:
    template <typename Pred>
    TagPointPattern make_pattern(std::int32_t tile_id, const std::string& label,
                                 Pred pred) const {
        TagPointPattern out;
        out.tag = label;
        out.window = Window{tile_width_km(tile_id), tile_height_km(tile_id)};
        const Tile* t = tiles_->tile(tile_id);
        if (!t) return out;
        for (std::uint32_t doc : t->pictures) {
            const Picture& p = corpus_->pictures[doc];
            if (!pred(p)) continue;
            out.points.push_back(project(p.geo->lat, p.geo->lon, tile_id));
        }
        if (cfg_.max_pattern_points > 0 && out.points.size() > cfg_.max_pattern_points) {
            auto rng = make_rng(derive_seed(fnv1a(label) ^ cfg_.seed,
                                            static_cast<std::uint64_t>(tile_id)));
            shuffle_indices(out.points, rng);
            out.points.resize(cfg_.max_pattern_points);
        }
        return out;
    }

    std::uint64_t pattern_seed(std::int32_t tile_id, const std::string& tag,
                               std::uint64_t which) const {
        return derive_seed(cfg_.seed ^ fnv1a(tag),
                           (static_cast<std::uint64_t>(tile_id) << 2) | which);
    }

    const Corpus* corpus_;
    const TileIndex* tiles_;
    SpatialConfig cfg_;
    std::mutex mu_;
    std::unordered_map<std::string, std::optional<DProfile>> self_cache_;
};

}  // namespace geostat
