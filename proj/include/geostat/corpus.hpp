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
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "geostat/common.hpp"
#include "geostat/text.hpp"

namespace geostat {

struct GeoTag {
    double lat = 0.0;
    double lon = 0.0;
};

inline bool geotag_in_range(double lat, double lon) {
    return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

/// One tagged, optionally geotagged and timestamped resource.
struct Picture {
    std::string id;
    std::optional<GeoTag> geo;
    std::optional<std::int64_t> ts;
    std::vector<std::string> tags;  // preprocessed, unique, first-seen order

    bool has_tag(const std::string& t) const {
        return std::find(tags.begin(), tags.end(), t) != tags.end();
    }
    bool has_any(const std::vector<std::string>& ts_) const {
        for (const auto& t : ts_)
            if (has_tag(t)) return true;
        return false;
    }
};

struct Query {
    std::string id;
    std::vector<std::string> terms;  // preprocessed, unique, non-empty
};

struct Corpus {
    std::vector<Picture> pictures;
    std::unordered_map<std::string, std::uint32_t> id_index;
    std::unordered_map<std::string, std::uint32_t> doc_freq;  // vocabulary with df
    std::size_t skipped = 0;          // malformed records dropped at ingest
    std::uint64_t content_hash = 0;   // FNV-1a over the source bytes

    std::size_t size() const { return pictures.size(); }
    std::size_t vocabulary_size() const { return doc_freq.size(); }
    std::uint32_t df(const std::string& tag) const {
        auto it = doc_freq.find(tag);
        return it == doc_freq.end() ? 0u : it->second;
    }
    const Picture& operator[](std::size_t i) const { return pictures[i]; }

    std::optional<std::uint32_t> find(const std::string& id) const {
        auto it = id_index.find(id);
        if (it == id_index.end()) return std::nullopt;
        return it->second;
    }

    /// Timestamp span over all timestamped pictures; nullopt when none exist.
    std::optional<std::pair<std::int64_t, std::int64_t>> timestamp_span() const {
        std::optional<std::pair<std::int64_t, std::int64_t>> span;
        for (const auto& p : pictures) {
            if (!p.ts) continue;
            if (!span) {
                span = {*p.ts, *p.ts};
            } else {
                span->first = std::min(span->first, *p.ts);
                span->second = std::max(span->second, *p.ts);
            }
        }
        return span;
    }

    /// Appends a picture whose tags are already preprocessed. Duplicate ids
    /// are a hard error; ingestion uses this after validation.
    void add(Picture p) {
        auto [it, fresh] = id_index.emplace(p.id, static_cast<std::uint32_t>(pictures.size()));
        if (!fresh) throw DataError("duplicate picture id: " + p.id);
        for (const auto& t : p.tags) ++doc_freq[t];
        pictures.push_back(std::move(p));
    }
};

namespace detail {

/// Preprocesses a list of raw tag strings into a unique token list.
inline std::vector<std::string> preprocess_tag_list(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& r : raw) {
        for (auto& tok : preprocess(r)) {
            if (seen.insert(tok).second) out.push_back(std::move(tok));
        }
    }
    return out;
}

inline std::optional<double> json_number(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw DataError("field is not a number");
    return it->get<double>();
}

}  // namespace detail

/// Parses one picture record; returns nullopt for malformed records (the
/// caller counts them). Throws DataError only for duplicate ids upstream.
inline std::optional<Picture> parse_picture_record(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    try {
        Picture p;
        if (!j.contains("id") || !j["id"].is_string()) return std::nullopt;
        p.id = j["id"].get<std::string>();
        if (p.id.empty()) return std::nullopt;

        auto lat = detail::json_number(j, "lat");
        auto lon = detail::json_number(j, "lon");
        if (lat.has_value() != lon.has_value()) return std::nullopt;
        if (lat) {
            if (!geotag_in_range(*lat, *lon)) return std::nullopt;
            p.geo = GeoTag{*lat, *lon};
        }

        if (auto it = j.find("ts"); it != j.end() && !it->is_null()) {
            if (!it->is_number_integer()) return std::nullopt;
            p.ts = it->get<std::int64_t>();
        }

        std::vector<std::string> raw;
        if (auto it = j.find("tags"); it != j.end() && !it->is_null()) {
            if (!it->is_array()) return std::nullopt;
            for (const auto& t : *it) {
                if (!t.is_string()) return std::nullopt;
                raw.push_back(t.get<std::string>());
            }
        }
        p.tags = detail::preprocess_tag_list(raw);
        return p;
    } catch (const DataError&) {
        return std::nullopt;
    }
}

/// Reads a line-delimited picture record file. Malformed records are skipped
/// and counted; a duplicate picture id aborts ingestion.
inline Corpus parse_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read corpus file: " + path);
    Corpus c;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::string line;
    while (std::getline(in, line)) {
        h = fnv1a(line, h);
        h = fnv1a("\n", h);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto p = parse_picture_record(line);
        if (!p) {
            ++c.skipped;
            continue;
        }
        c.add(std::move(*p));
    }
    c.content_hash = h;
    return c;
}

/// Event ground truth: disjoint picture clusters keyed by event id.
struct EventGroundTruth {
    std::map<std::string, std::vector<std::uint32_t>> events;  // sorted doc indices

    const std::vector<std::uint32_t>* relevant_for(const std::string& event_id) const {
        auto it = events.find(event_id);
        return it == events.end() ? nullptr : &it->second;
    }
    std::size_t total_pictures() const {
        std::size_t n = 0;
        for (const auto& [_, v] : events) n += v.size();
        return n;
    }
};

/// Ground truth lines: {"event": string, "pictures": [string,...]}.
/// Unknown picture ids and pictures claimed by two events are hard errors.
inline EventGroundTruth parse_ground_truth(const std::string& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read ground truth file: " + path);
    EventGroundTruth gt;
    std::unordered_map<std::uint32_t, std::string> owner;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("event") || !j.contains("pictures"))
            throw DataError("malformed ground truth record: " + line);
        std::string ev = j["event"].get<std::string>();
        auto& cluster = gt.events[ev];
        for (const auto& pid : j["pictures"]) {
            std::string id = pid.get<std::string>();
            auto idx = corpus.find(id);
            if (!idx) throw DataError("ground truth references unknown picture id: " + id);
            auto [it, fresh] = owner.emplace(*idx, ev);
            if (!fresh && it->second != ev)
                throw DataError("picture " + id + " assigned to two events: " + it->second + ", " + ev);
            if (fresh) cluster.push_back(*idx);
        }
        std::sort(cluster.begin(), cluster.end());
    }
    return gt;
}

/// Query lines: {"id": string, "terms": [string,...]}. Terms get the same
/// preprocessing as corpus tags; queries left empty by it are skipped.
inline std::vector<Query> parse_queries(const std::string& path, std::size_t* skipped = nullptr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read query file: " + path);
    std::vector<Query> out;
    std::size_t dropped = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("terms"))
            throw DataError("malformed query record: " + line);
        Query q;
        q.id = j["id"].get<std::string>();
        std::vector<std::string> raw;
        for (const auto& t : j["terms"]) raw.push_back(t.get<std::string>());
        q.terms = detail::preprocess_tag_list(raw);
        if (q.terms.empty()) {
            ++dropped;
            continue;
        }
        out.push_back(std::move(q));
    }
    if (skipped) *skipped = dropped;
    return out;
}

}  // namespace geostat
