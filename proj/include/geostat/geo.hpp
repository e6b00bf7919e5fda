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
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geostat/common.hpp"
#include "geostat/corpus.hpp"

namespace geostat {

// 1-degree world grid, latitudes clipped to [-70, 70) to skip the polar
// bands; 360 x 140 = 50,400 cells of constant 111 km height.
inline constexpr double kKmPerDegree = 111.0;
inline constexpr int kLatFloorMin = -70;
inline constexpr int kLatFloorMax = 69;
inline constexpr std::int32_t kTileCount = 360 * 140;

inline std::int32_t tile_id_from_floors(int lat_floor, int lon_floor) {
    return (lon_floor + 180) + 360 * (lat_floor + 70);
}

inline int tile_lat_floor(std::int32_t tile_id) { return tile_id / 360 - 70; }
inline int tile_lon_floor(std::int32_t tile_id) { return tile_id % 360 - 180; }

inline double tile_center_lat(std::int32_t tile_id) {
    return static_cast<double>(tile_lat_floor(tile_id)) + 0.5;
}

/// East-west extent in km (narrows toward the poles); north-south is 111 km.
inline double tile_width_km(std::int32_t tile_id) {
    return kKmPerDegree * std::cos(tile_center_lat(tile_id) * std::numbers::pi / 180.0);
}
inline double tile_height_km(std::int32_t /*tile_id*/) { return kKmPerDegree; }
inline double tile_area_km2(std::int32_t tile_id) {
    return tile_width_km(tile_id) * tile_height_km(tile_id);
}

/// Maps a geotag to its tile; out-of-band (polar) latitudes give nullopt.
inline std::optional<std::int32_t> assign_tile(double lat, double lon) {
    int lat_floor = static_cast<int>(std::floor(lat));
    if (lat_floor < kLatFloorMin || lat_floor > kLatFloorMax) return std::nullopt;
    int lon_floor = static_cast<int>(std::floor(lon));
    if (lon_floor == 180) lon_floor = -180;  // the antimeridian folds over
    return tile_id_from_floors(lat_floor, lon_floor);
}

inline std::optional<std::int32_t> assign_tile(const GeoTag& g) {
    return assign_tile(g.lat, g.lon);
}

/// Km offsets from the tile's south-west corner (equirectangular, with the
/// longitude scale taken at the tile center latitude).
struct PlanarPoint {
    double x = 0.0;  // km east
    double y = 0.0;  // km north
};

inline PlanarPoint project(double lat, double lon, std::int32_t tile_id) {
    double lat_floor = tile_lat_floor(tile_id);
    double lon_floor = tile_lon_floor(tile_id);
    double lon_off = lon - lon_floor;
    if (lon_off >= 360.0 - 1e-9) lon_off -= 360.0;  // folded antimeridian
    PlanarPoint p;
    p.y = (lat - lat_floor) * kKmPerDegree;
    p.x = lon_off * kKmPerDegree *
          std::cos(tile_center_lat(tile_id) * std::numbers::pi / 180.0);
    return p;
}

struct Tile {
    std::int32_t id = 0;
    std::uint32_t picture_count = 0;            // all geotagged pictures, tagged or not
    std::vector<std::uint32_t> pictures;        // corpus indices, ascending
    bool significant = false;                   // picture_count > threshold
};

struct TilePosting {
    std::int32_t tile = 0;
    std::uint32_t tf = 0;
};

/// Inverted index over tiles: tag -> [(tile, tf)], plus per-tile rosters.
class TileIndex {
  public:
    std::uint32_t min_tile_pictures = 1000;

    void build(const Corpus& corpus, std::uint32_t threshold = 1000) {
        min_tile_pictures = threshold;
        tiles_.clear();
        postings_.clear();
        corpus_hash_ = corpus.content_hash;
        std::unordered_map<std::string, std::unordered_map<std::int32_t, std::uint32_t>> acc;
        for (std::uint32_t i = 0; i < corpus.pictures.size(); ++i) {
            const Picture& p = corpus.pictures[i];
            if (!p.geo) continue;
            auto tid = assign_tile(*p.geo);
            if (!tid) continue;
            Tile& t = tiles_[*tid];
            t.id = *tid;
            ++t.picture_count;
            t.pictures.push_back(i);
            for (const auto& tag : p.tags) ++acc[tag][*tid];
        }
        for (auto& [_, t] : tiles_) t.significant = t.picture_count > min_tile_pictures;
        for (auto& [tag, per_tile] : acc) {
            auto& plist = postings_[tag];
            plist.reserve(per_tile.size());
            for (const auto& [tid, tf] : per_tile) plist.push_back({tid, tf});
            std::sort(plist.begin(), plist.end(),
                      [](const TilePosting& a, const TilePosting& b) { return a.tile < b.tile; });
        }
    }

    const Tile* tile(std::int32_t id) const {
        auto it = tiles_.find(id);
        return it == tiles_.end() ? nullptr : &it->second;
    }
    const std::unordered_map<std::int32_t, Tile>& tiles() const { return tiles_; }
    std::size_t populated_tiles() const { return tiles_.size(); }
    std::uint64_t corpus_hash() const { return corpus_hash_; }

    const std::vector<TilePosting>* postings(const std::string& tag) const {
        auto it = postings_.find(tag);
        return it == postings_.end() ? nullptr : &it->second;
    }

    std::uint32_t tile_df(const std::string& tag) const {
        auto* p = postings(tag);
        return p ? static_cast<std::uint32_t>(p->size()) : 0u;
    }

    std::uint32_t tf(const std::string& tag, std::int32_t tile_id) const {
        auto* p = postings(tag);
        if (!p) return 0;
        auto it = std::lower_bound(p->begin(), p->end(), tile_id,
                                   [](const TilePosting& a, std::int32_t t) { return a.tile < t; });
        return (it != p->end() && it->tile == tile_id) ? it->tf : 0u;
    }

    std::uint64_t posting_total() const {
        std::uint64_t n = 0;
        for (const auto& [_, plist] : postings_)
            for (const auto& p : plist) n += p.tf;
        return n;
    }

    // Sidecar persistence (structured text keyed by corpus content hash).
    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DataError("cannot write tile index: " + path);
        out << "geostat-tileindex 1 " << corpus_hash_ << ' ' << min_tile_pictures << '\n';
        out << tiles_.size() << '\n';
        for (const auto& [id, t] : tiles_) {
            out << id << ' ' << t.picture_count;
            for (auto d : t.pictures) out << ' ' << d;
            out << '\n';
        }
        out << postings_.size() << '\n';
        for (const auto& [tag, plist] : postings_) {
            out << tag << ' ' << plist.size();
            for (const auto& p : plist) out << ' ' << p.tile << ' ' << p.tf;
            out << '\n';
        }
    }

    static TileIndex load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot read tile index: " + path);
        std::string magic;
        int version = 0;
        TileIndex idx;
        in >> magic >> version >> idx.corpus_hash_ >> idx.min_tile_pictures;
        if (magic != "geostat-tileindex" || version != 1)
            throw DataError("unrecognized tile index file: " + path);
        std::size_t ntiles = 0;
        in >> ntiles;
        for (std::size_t i = 0; i < ntiles; ++i) {
            std::int32_t id = 0;
            std::uint32_t count = 0;
            in >> id >> count;
            Tile t;
            t.id = id;
            t.picture_count = count;
            t.pictures.resize(count);
            for (auto& d : t.pictures) in >> d;
            t.significant = count > idx.min_tile_pictures;
            idx.tiles_.emplace(id, std::move(t));
        }
        std::size_t nterms = 0;
        in >> nterms;
        for (std::size_t i = 0; i < nterms; ++i) {
            std::string tag;
            std::size_t len = 0;
            in >> tag >> len;
            auto& plist = idx.postings_[tag];
            plist.resize(len);
            for (auto& p : plist) in >> p.tile >> p.tf;
        }
        if (!in) throw DataError("truncated tile index file: " + path);
        return idx;
    }

  private:
    std::unordered_map<std::int32_t, Tile> tiles_;
    std::unordered_map<std::string, std::vector<TilePosting>> postings_;
    std::uint64_t corpus_hash_ = 0;
};

/// Picks the tile for spatial feature extraction: among tiles holding at
/// least one of the first K geotagged pictures of the ranked list, the one
/// with the highest TF-IDF score for the query (ties to the lowest id).
/// nullopt means no geotagged picture in the top K; callers fall back to
/// term+temporal features only.
inline std::optional<std::int32_t> select_best_tile(const std::vector<std::string>& query_terms,
                                                    const std::vector<std::uint32_t>& ranked_docs,
                                                    const Corpus& corpus, const TileIndex& tiles,
                                                    std::size_t top_k = 100) {
    std::vector<std::int32_t> candidates;
    std::size_t seen_geo = 0;
    for (std::uint32_t doc : ranked_docs) {
        const Picture& p = corpus.pictures[doc];
        if (!p.geo) continue;
        auto tid = assign_tile(*p.geo);
        if (tid && std::find(candidates.begin(), candidates.end(), *tid) == candidates.end())
            candidates.push_back(*tid);
        if (++seen_geo >= top_k) break;
    }
    if (candidates.empty()) return std::nullopt;

    double total = static_cast<double>(tiles.populated_tiles());
    std::optional<std::int32_t> best;
    double best_score = 0.0;
    std::sort(candidates.begin(), candidates.end());
    for (std::int32_t tid : candidates) {
        double score = 0.0;
        for (const auto& q : query_terms) {
            std::uint32_t df = tiles.tile_df(q);
            if (df == 0) continue;
            score += static_cast<double>(tiles.tf(q, tid)) * std::log(total / df);
        }
        if (!best || score > best_score) {
            best = tid;
            best_score = score;
        }
    }
    return best;
}

}  // namespace geostat
