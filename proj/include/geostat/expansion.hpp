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
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geostat/candidate_features.hpp"
#include "geostat/corpus.hpp"
#include "geostat/geo.hpp"
#include "geostat/learn.hpp"
#include "geostat/retrieval.hpp"

namespace geostat {

inline constexpr double kKlEpsilon = 1e-12;

/// Expansion knobs; defaults follow the evaluated parameter ranges.
struct ExpansionConfig {
    std::size_t fb_docs = 40;    // pseudo-relevant feedback depth k
    std::size_t fb_terms = 35;   // expansion terms kept n
    double beta = 0.4;           // Rocchio blend
    double alpha = 0.5;          // KL vs classifier confidence blend
    double theta = 0.005;        // good/bad label threshold on AP_diff
    std::size_t cutoff = kDefaultCutoff;
    std::size_t best_tile_k = 100;
    Bm25Params bm25;
};

enum class ExpansionMode { kKl, kKlT, kKlSt, kKlZkyc };

inline const char* mode_name(ExpansionMode m) {
    switch (m) {
        case ExpansionMode::kKl: return "kl";
        case ExpansionMode::kKlT: return "kl_t";
        case ExpansionMode::kKlSt: return "kl_st";
        case ExpansionMode::kKlZkyc: return "kl_zkyc";
    }
    return "?";
}

inline std::optional<ExpansionMode> mode_from_name(const std::string& s) {
    if (s == "kl") return ExpansionMode::kKl;
    if (s == "kl_t") return ExpansionMode::kKlT;
    if (s == "kl_st") return ExpansionMode::kKlSt;
    if (s == "kl_zkyc") return ExpansionMode::kKlZkyc;
    return std::nullopt;
}

/// Term occurrence totals over a feedback document set.
struct FeedbackStats {
    std::unordered_map<std::string, std::uint32_t> tf;
    std::uint64_t total = 0;

    static FeedbackStats from_docs(std::span<const std::uint32_t> docs, const Corpus& corpus) {
        FeedbackStats s;
        for (std::uint32_t d : docs) {
            for (const auto& t : corpus.pictures[d].tags) {
                ++s.tf[t];
                ++s.total;
            }
        }
        return s;
    }
};

/// Unique feedback tags minus the original query terms, in first-appearance
/// order over the ranked feedback documents.
inline std::vector<std::string> extract_candidates(std::span<const std::uint32_t> feedback_docs,
                                                   const std::vector<std::string>& query_terms,
                                                   const Corpus& corpus) {
    std::unordered_set<std::string> q(query_terms.begin(), query_terms.end());
    std::unordered_set<std::string> seen;
    std::vector<std::string> out;
    for (std::uint32_t d : feedback_docs) {
        for (const auto& t : corpus.pictures[d].tags) {
            if (q.count(t) || !seen.insert(t).second) continue;
            out.push_back(t);
        }
    }
    return out;
}

/// KL contribution of one term: P_Rel log(P_Rel / P_Coll) with maximum-
/// likelihood term distributions over the feedback set and the collection.
inline double kl_score(const std::string& e, const FeedbackStats& fb,
                       const InvertedIndex& index) {
    if (fb.total == 0) return 0.0;
    auto it = fb.tf.find(e);
    double tf_fb = it == fb.tf.end() ? 0.0 : static_cast<double>(it->second);
    if (tf_fb == 0.0) return 0.0;
    double p_rel = tf_fb / static_cast<double>(fb.total);
    double p_coll = index.total_term_count() > 0
                        ? static_cast<double>(index.df(e)) /
                              static_cast<double>(index.total_term_count())
                        : 0.0;
    return p_rel * std::log(p_rel / std::max(p_coll, kKlEpsilon));
}

/// Relative AP change from adding e to the query; nullopt (skip) when the
/// base query has zero AP.
inline std::optional<double> ap_diff(const std::vector<std::string>& query_terms,
                                     const std::string& e, const InvertedIndex& index,
                                     const std::unordered_set<std::uint32_t>& relevant,
                                     const Bm25Params& params = {},
                                     std::size_t cutoff = kDefaultCutoff) {
    auto base = average_precision(search(index, query_terms, params, cutoff), relevant);
    if (!base || *base == 0.0) return std::nullopt;
    std::vector<std::string> expanded = query_terms;
    expanded.push_back(e);
    auto with_e = average_precision(search(index, expanded, params, cutoff), relevant);
    return (with_e.value_or(0.0) - *base) / *base;
}

/// Good iff the AP improvement exceeds theta; equality counts as bad.
inline bool label_good(double ap_diff_value, double theta) { return ap_diff_value > theta; }

/// Final-score selection over the two classifier confidences. 0.5 counts as
/// confident; a missing spatio-temporal confidence (no usable spatial
/// features) falls back to the temporal confidence alone.
inline double combine_conf(std::optional<double> conf_t, std::optional<double> conf_st) {
    if (!conf_st) return conf_t.value_or(0.0);
    if (!conf_t) return *conf_st;
    bool t_up = *conf_t >= 0.5, st_up = *conf_st >= 0.5;
    if (t_up && st_up) return (*conf_t + *conf_st) / 2.0;
    if (t_up) return *conf_t;
    if (st_up) return *conf_st;
    return 0.0;
}

/// alpha-blend of the normalized KL score and the classifier confidence.
inline double kl_final(double kl_normalized, double conf, double alpha) {
    return alpha * kl_normalized + (1.0 - alpha) * conf;
}

/// Rocchio Beta reweighting: query term frequency blended with expansion
/// weights, each normalized by its maximum. Expansion-only terms carry
/// beta * w / max_w; an empty candidate list leaves the query unchanged.
inline std::vector<std::pair<std::string, double>> rocchio_reweight(
    const std::vector<std::string>& query_terms,
    const std::vector<std::pair<std::string, double>>& expansion, double beta) {
    std::vector<std::pair<std::string, double>> qtf;
    for (const auto& t : query_terms) {
        auto it = std::find_if(qtf.begin(), qtf.end(), [&](const auto& e) { return e.first == t; });
        if (it == qtf.end())
            qtf.emplace_back(t, 1.0);
        else
            it->second += 1.0;
    }
    double max_tf = 0.0;
    for (const auto& [_, tf] : qtf) max_tf = std::max(max_tf, tf);
    double max_w = 0.0;
    for (const auto& [_, w] : expansion) max_w = std::max(max_w, w);

    std::vector<std::pair<std::string, double>> out;
    out.reserve(qtf.size() + expansion.size());
    for (const auto& [t, tf] : qtf) out.emplace_back(t, tf / max_tf);
    if (max_w > 0.0) {
        for (const auto& [t, w] : expansion) {
            auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == t; });
            double add = beta * w / max_w;
            if (it == out.end())
                out.emplace_back(t, add);
            else
                it->second += add;
        }
    }
    return out;
}

/// Geo-temporal tag profiles over fixed 1-degree x two-week bins, compared
/// by Euclidean distance of the l2-normalized count vectors. Picture counts
/// stand in for unique users (the record format carries no user identity).
class ZkycTable {
  public:
    ZkycTable(const Corpus& corpus, std::int64_t bin_seconds = 14 * 86400)
        : corpus_(&corpus), bin_seconds_(bin_seconds) {
        if (auto span = corpus.timestamp_span()) origin_ = span->first;
    }

    struct Distance {
        double value = std::numbers::sqrt2;
        bool defined = false;  // false when either tag has no geo-temporal data
    };

    Distance distance(const std::string& a, const std::string& b) {
        const auto& va = vec(a);
        const auto& vb = vec(b);
        Distance d;
        if (va.empty() || vb.empty()) return d;
        double dot = 0.0;
        std::size_t i = 0, j = 0;
        while (i < va.size() && j < vb.size()) {
            if (va[i].first < vb[j].first) {
                ++i;
            } else if (vb[j].first < va[i].first) {
                ++j;
            } else {
                dot += va[i].second * vb[j].second;
                ++i;
                ++j;
            }
        }
        d.value = std::sqrt(std::max(0.0, 2.0 - 2.0 * dot));
        d.defined = true;
        return d;
    }

    /// Relatedness in [0,1] of a candidate against a query: mean over query
    /// terms of 1 - distance/sqrt(2).
    double relatedness(const std::string& e, const std::vector<std::string>& query_terms) {
        if (query_terms.empty()) return 0.0;
        double acc = 0.0;
        for (const auto& q : query_terms)
            acc += 1.0 - distance(e, q).value / std::numbers::sqrt2;
        return acc / static_cast<double>(query_terms.size());
    }

  private:
    // Sparse unit vector keyed by (tile, time-bin), sorted by key.
    // Thread-safe for the parallel per-candidate scoring loop.
    const std::vector<std::pair<std::uint64_t, double>>& vec(const std::string& tag) {
        {
            std::lock_guard lock(mu_);
            auto it = cache_.find(tag);
            if (it != cache_.end()) return it->second;
        }
        std::unordered_map<std::uint64_t, double> acc;
        for (const auto& p : corpus_->pictures) {
            if (!p.geo || !p.ts || !p.has_tag(tag)) continue;
            auto tile = assign_tile(*p.geo);
            if (!tile) continue;
            std::uint64_t bin = static_cast<std::uint64_t>((*p.ts - origin_) / bin_seconds_);
            acc[(static_cast<std::uint64_t>(static_cast<std::uint32_t>(*tile)) << 32) | bin] += 1.0;
        }
        std::vector<std::pair<std::uint64_t, double>> v(acc.begin(), acc.end());
        std::sort(v.begin(), v.end());
        double norm = 0.0;
        for (const auto& [_, c] : v) norm += c * c;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (auto& [_, c] : v) c /= norm;
        }
        std::lock_guard lock(mu_);
        return cache_.emplace(tag, std::move(v)).first->second;
    }

    const Corpus* corpus_;
    std::int64_t bin_seconds_;
    std::int64_t origin_ = 0;
    std::mutex mu_;
    std::unordered_map<std::string, std::vector<std::pair<std::uint64_t, double>>> cache_;
};

/// Everything expand_query needs. Null members disable the dependent modes:
/// without forests kl_t/kl_st degrade to plain KL confidence 0 paths.
struct ExpansionServices {
    const Corpus* corpus = nullptr;
    const InvertedIndex* index = nullptr;
    const TileIndex* tiles = nullptr;
    TemporalFeatureExtractor* temporal = nullptr;
    SpatialFeatureExtractor* spatial = nullptr;
    const RandomForest* forest_t = nullptr;
    const RandomForest* forest_st = nullptr;
    ZkycTable* zkyc = nullptr;
};

struct CandidateScore {
    std::string term;
    double kl = 0.0;
    double kl_norm = 0.0;
    std::optional<double> conf_t;
    std::optional<double> conf_st;  // absent when spatial features unavailable
    double zkyc_rel = 0.0;
    CandidateFeatures features;
};

/// Query-independent prep shared by all modes: initial run, feedback,
/// candidates with features and classifier confidences.
struct PreparedQuery {
    RankedList initial;
    std::vector<std::uint32_t> feedback;
    std::optional<std::int32_t> best_tile;
    std::vector<CandidateScore> candidates;
};

struct ExpansionResult {
    RankedList final_ranking;
    std::vector<std::pair<std::string, double>> expanded_query;
    std::vector<std::pair<std::string, double>> selected_terms;  // term, final score
};

class QueryExpander {
  public:
    QueryExpander(ExpansionServices services, ExpansionConfig config)
        : sv_(services), cfg_(config) {}

    const ExpansionConfig& config() const { return cfg_; }

    PreparedQuery prepare(const Query& q) {
        PreparedQuery prep;
        prep.initial = search(*sv_.index, q.terms, cfg_.bm25, cfg_.cutoff);
        if (prep.initial.empty()) return prep;

        std::size_t k = std::min<std::size_t>(cfg_.fb_docs, prep.initial.size());
        prep.feedback.reserve(k);
        for (std::size_t i = 0; i < k; ++i) prep.feedback.push_back(prep.initial[i].doc);

        auto cands = extract_candidates(prep.feedback, q.terms, *sv_.corpus);
        if (cands.empty()) return prep;

        if (sv_.tiles && sv_.spatial) {
            std::vector<std::uint32_t> ranked_docs(prep.initial.size());
            for (std::size_t i = 0; i < prep.initial.size(); ++i)
                ranked_docs[i] = prep.initial[i].doc;
            prep.best_tile = select_best_tile(q.terms, ranked_docs, *sv_.corpus, *sv_.tiles,
                                              cfg_.best_tile_k);
        }

        FeedbackStats fb = FeedbackStats::from_docs(prep.feedback, *sv_.corpus);
        TimeSeries query_ts;
        if (sv_.temporal) query_ts = sv_.temporal->query_series(q.terms);

        prep.candidates.resize(cands.size());
        bool need_features = sv_.forest_t || sv_.forest_st;
        parallel_for(cands.size(), [&](std::size_t i) {
            CandidateScore& cs = prep.candidates[i];
            cs.term = cands[i];
            cs.kl = kl_score(cs.term, fb, *sv_.index);
            if (need_features && sv_.temporal) {
                cs.features.term =
                    term_features(cs.term, q.terms, prep.feedback, *sv_.corpus, *sv_.index);
                cs.features.temporal = sv_.temporal->extract(cs.term, q.terms, query_ts);
            }
            if (need_features && sv_.spatial)
                cs.features.spatial = sv_.spatial->extract(cs.term, q.terms, prep.best_tile);
            if (sv_.forest_t) {
                auto row = flatten_term_temporal(cs.features);
                cs.conf_t = sv_.forest_t->predict(row);
            }
            if (sv_.forest_st && cs.features.spatial_available()) {
                auto row = flatten_full(cs.features);
                cs.conf_st = sv_.forest_st->predict(row);
            }
            if (sv_.zkyc) cs.zkyc_rel = sv_.zkyc->relatedness(cs.term, q.terms);
        });

        // Normalize KL over the candidate set: clamp negatives, divide by max.
        double max_kl = 0.0;
        for (const auto& c : prep.candidates) max_kl = std::max(max_kl, c.kl);
        for (auto& c : prep.candidates)
            c.kl_norm = max_kl > 0.0 ? std::max(c.kl, 0.0) / max_kl : 0.0;
        return prep;
    }

    /// Mode-specific term selection and the final weighted run.
    ExpansionResult finalize(const Query& q, const PreparedQuery& prep, ExpansionMode mode) {
        ExpansionResult res;
        if (prep.initial.empty()) {
            res.final_ranking = prep.initial;
            return res;
        }
        std::vector<std::pair<std::string, double>> scored;
        scored.reserve(prep.candidates.size());
        for (const auto& c : prep.candidates) {
            double score = 0.0;
            switch (mode) {
                case ExpansionMode::kKl:
                    score = c.kl_norm;
                    break;
                case ExpansionMode::kKlT:
                    score = kl_final(c.kl_norm, c.conf_t.value_or(0.0), cfg_.alpha);
                    break;
                case ExpansionMode::kKlSt:
                    score = kl_final(c.kl_norm, combine_conf(c.conf_t, c.conf_st), cfg_.alpha);
                    break;
                case ExpansionMode::kKlZkyc:
                    score = kl_final(c.kl_norm, c.zkyc_rel, cfg_.alpha);
                    break;
            }
            scored.emplace_back(c.term, score);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (scored.size() > cfg_.fb_terms) scored.resize(cfg_.fb_terms);
        res.selected_terms = scored;
        res.expanded_query = rocchio_reweight(q.terms, scored, cfg_.beta);
        res.final_ranking = search_weighted(*sv_.index, res.expanded_query, cfg_.bm25, cfg_.cutoff);
        return res;
    }

    ExpansionResult expand(const Query& q, ExpansionMode mode) {
        PreparedQuery prep = prepare(q);
        return finalize(q, prep, mode);
    }

  private:
    ExpansionServices sv_;
    ExpansionConfig cfg_;
};

}  // namespace geostat
