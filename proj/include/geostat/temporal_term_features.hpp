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
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "geostat/corpus.hpp"
#include "geostat/retrieval.hpp"
#include "geostat/stats.hpp"

namespace geostat {

inline constexpr std::int64_t kWeekSeconds = 7 * 86400;
inline constexpr int kDefaultMaxLag = 4;
inline constexpr double kDf3Epsilon = 1e-9;

/// Binned occurrence counts. All series over one corpus share the same
/// origin and span so they align bin-for-bin.
struct TimeSeries {
    std::int64_t bin_width = kWeekSeconds;
    std::int64_t origin = 0;
    std::vector<double> counts;
    bool empty = true;  // no timestamped pictures matched the predicate

    double total() const {
        double s = 0.0;
        for (double c : counts) s += c;
        return s;
    }
};

/// Counts timestamped pictures matching `pred` per bin over the corpus
/// timestamp span.
inline TimeSeries build_time_series(const Corpus& corpus,
                                    const std::function<bool(const Picture&)>& pred,
                                    std::int64_t bin_width = kWeekSeconds) {
    if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");
    TimeSeries ts;
    ts.bin_width = bin_width;
    auto span = corpus.timestamp_span();
    if (!span) return ts;
    ts.origin = span->first;
    std::size_t bins = static_cast<std::size_t>((span->second - span->first) / bin_width) + 1;
    ts.counts.assign(bins, 0.0);
    for (const auto& p : corpus.pictures) {
        if (!p.ts || !pred(p)) continue;
        ts.counts[static_cast<std::size_t>((*p.ts - ts.origin) / bin_width)] += 1.0;
        ts.empty = false;
    }
    return ts;
}

/// Peakedness mu4 / mu2^2 of the bin counts; undefined for constant series.
inline std::optional<double> kurtosis(const TimeSeries& ts) {
    if (ts.empty || ts.counts.size() < 2) return std::nullopt;
    double mu2 = central_moment(ts.counts, 2);
    if (mu2 == 0.0) return std::nullopt;
    return central_moment(ts.counts, 4) / (mu2 * mu2);
}

/// First-order autocorrelation; undefined for constant or length-1 series.
inline std::optional<double> autocorrelation(const TimeSeries& ts) {
    const auto& x = ts.counts;
    if (ts.empty || x.size() < 2) return std::nullopt;
    double m = mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t + 1 < x.size()) num += (x[t] - m) * (x[t + 1] - m);
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

namespace detail {

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) return std::nullopt;
    double ma = mean(a), mb = mean(b);
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return std::nullopt;
    return num / std::sqrt(va * vb);
}

}  // namespace detail

/// Maximum of the lagged Pearson correlations over lags in [-max_lag,
/// +max_lag]; each lag correlates the overlapping segments only. Degenerate
/// inputs (constant overlaps at every lag) are undefined.
inline std::optional<double> cross_correlation_max(const TimeSeries& a, const TimeSeries& b,
                                                   int max_lag = kDefaultMaxLag) {
    if (a.empty || b.empty) return std::nullopt;
    std::size_t n = std::min(a.counts.size(), b.counts.size());
    if (n < 2) return std::nullopt;
    std::optional<double> best;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        std::size_t start_a = lag < 0 ? static_cast<std::size_t>(-lag) : 0;
        std::size_t start_b = lag > 0 ? static_cast<std::size_t>(lag) : 0;
        if (start_a >= n || start_b >= n) continue;
        std::size_t len = n - std::max(start_a, start_b);
        if (len < 2) continue;
        auto r = detail::pearson({a.counts.data() + start_a, len},
                                 {b.counts.data() + start_b, len});
        if (r && (!best || *r > *best)) best = r;
    }
    return best;
}

/// Document-frequency statistics for one scope (feedback set or collection).
struct ScopeTermStats {
    double df0 = 0.0;
    double df1 = 0.0, df2 = 0.0, df3 = 0.0;
    bool defined = false;  // false when df0 == 0 in this scope
    double cooc_single = 0.0;
    double cooc_pair = 0.0;
};

struct TermFeatureVector {
    ScopeTermStats feedback;
    ScopeTermStats whole;
};

namespace detail {

inline void fill_df(ScopeTermStats& s, double df0, double n_docs) {
    s.df0 = df0;
    if (df0 <= 0.0) {
        s.defined = false;
        return;
    }
    s.defined = true;
    s.df1 = std::log(n_docs / df0);
    s.df2 = std::log(1.0 + n_docs / df0);
    double ratio = (n_docs - df0) / df0;
    s.df3 = std::log(std::max(ratio, kDf3Epsilon));
}

}  // namespace detail

/// DF0..DF3 plus query co-occurrence, in the feedback scope and the whole
/// collection. Natural logs; co-occurrence uses log1p so that zero counts
/// stay finite.
inline TermFeatureVector term_features(const std::string& e,
                                       const std::vector<std::string>& query_terms,
                                       std::span<const std::uint32_t> feedback_docs,
                                       const Corpus& corpus, const InvertedIndex& index) {
    TermFeatureVector out;
    const double n = static_cast<double>(query_terms.size());

    // Feedback scope by direct scan of the k documents.
    double fb_df = 0.0;
    std::vector<double> fb_single(query_terms.size(), 0.0);
    double fb_pair_sum = 0.0;
    for (std::uint32_t doc : feedback_docs) {
        const Picture& p = corpus.pictures[doc];
        if (!p.has_tag(e)) continue;
        fb_df += 1.0;
        std::vector<bool> has(query_terms.size());
        for (std::size_t i = 0; i < query_terms.size(); ++i) has[i] = p.has_tag(query_terms[i]);
        for (std::size_t i = 0; i < query_terms.size(); ++i) {
            if (!has[i]) continue;
            fb_single[i] += 1.0;
            for (std::size_t j = i + 1; j < query_terms.size(); ++j)
                if (has[j]) fb_pair_sum += 1.0;
        }
    }
    detail::fill_df(out.feedback, fb_df, static_cast<double>(feedback_docs.size()));
    double fb_single_sum = 0.0;
    for (double c : fb_single) fb_single_sum += c;
    out.feedback.cooc_single = std::log1p(fb_single_sum / n);
    out.feedback.cooc_pair = std::log1p(fb_pair_sum / n);

    // Whole collection via posting intersections.
    detail::fill_df(out.whole, static_cast<double>(index.df(e)),
                    static_cast<double>(corpus.size()));
    double w_single = 0.0, w_pair = 0.0;
    for (std::size_t i = 0; i < query_terms.size(); ++i) {
        std::vector<std::string> pair_ie = {query_terms[i], e};
        w_single += index.co_occurrence(pair_ie);
        for (std::size_t j = i + 1; j < query_terms.size(); ++j) {
            std::vector<std::string> triple = {query_terms[i], query_terms[j], e};
            w_pair += index.co_occurrence(triple);
        }
    }
    out.whole.cooc_single = std::log1p(w_single / n);
    out.whole.cooc_pair = std::log1p(w_pair / n);
    return out;
}

/// Kurtosis/autocorrelation of the candidate and joint series plus the
/// query-candidate cross correlation. nullopt marks undefined statistics;
/// flattened rows zero them and carry a validity flag.
struct TemporalFeatureVector {
    std::optional<double> kurt_e, kurt_eq, ac_e, ac_eq, cc;
};

/// Caches per-tag series; candidates across queries hit the same tags.
class TemporalFeatureExtractor {
  public:
    TemporalFeatureExtractor(const Corpus& corpus, const InvertedIndex& index,
                             std::int64_t bin_width = kWeekSeconds)
        : corpus_(&corpus), index_(&index), bin_width_(bin_width) {}

    /// Thread-safe: callers run per-candidate extraction in parallel.
    /// References stay valid across inserts (node-based container).
    const TimeSeries& tag_series(const std::string& tag) {
        {
            std::lock_guard lock(mu_);
            auto it = cache_.find(tag);
            if (it != cache_.end()) return it->second;
        }
        TimeSeries ts = build_time_series(
            *corpus_, [&](const Picture& p) { return p.has_tag(tag); }, bin_width_);
        std::lock_guard lock(mu_);
        return cache_.emplace(tag, std::move(ts)).first->second;
    }

    TimeSeries query_series(const std::vector<std::string>& terms) const {
        return build_time_series(
            *corpus_, [&](const Picture& p) { return p.has_any(terms); }, bin_width_);
    }

    /// Joint e-and-query series from e's postings instead of a corpus scan.
    TimeSeries joint_series(const std::string& e, const std::vector<std::string>& terms) const {
        TimeSeries ts;
        ts.bin_width = bin_width_;
        auto span = corpus_->timestamp_span();
        if (!span) return ts;
        ts.origin = span->first;
        ts.counts.assign(
            static_cast<std::size_t>((span->second - span->first) / bin_width_) + 1, 0.0);
        if (auto* plist = index_->postings(e)) {
            for (const Posting& p : *plist) {
                const Picture& pic = corpus_->pictures[p.doc];
                if (!pic.ts || !pic.has_any(terms)) continue;
                ts.counts[static_cast<std::size_t>((*pic.ts - ts.origin) / bin_width_)] += 1.0;
                ts.empty = false;
            }
        }
        return ts;
    }

    TemporalFeatureVector extract(const std::string& e, const std::vector<std::string>& terms,
                                  const TimeSeries& query_ts, int max_lag = kDefaultMaxLag) {
        TemporalFeatureVector v;
        const TimeSeries& se = tag_series(e);
        TimeSeries seq = joint_series(e, terms);
        v.kurt_e = kurtosis(se);
        v.ac_e = autocorrelation(se);
        v.kurt_eq = kurtosis(seq);
        v.ac_eq = autocorrelation(seq);
        v.cc = cross_correlation_max(query_ts, se, max_lag);
        return v;
    }

  private:
    const Corpus* corpus_;
    const InvertedIndex* index_;
    std::int64_t bin_width_;
    std::mutex mu_;
    std::unordered_map<std::string, TimeSeries> cache_;
};

}  // namespace geostat
