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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geostat/corpus.hpp"
#include "geostat/stats.hpp"

namespace geostat {

struct Bm25Params {
    double k1 = 1.2;
    double k3 = 8.0;
    double b = 0.75;
};

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
};

struct ScoredDoc {
    std::uint32_t doc = 0;
    double score = 0.0;
};

/// Descending by score, ties broken by ascending doc id.
using RankedList = std::vector<ScoredDoc>;

inline constexpr std::size_t kDefaultCutoff = 1000;

/// Tag inverted index. Tags are unique per picture so tf is 1 in practice,
/// but the posting keeps it for generality. Untagged pictures are never
/// indexed; collection stats cover indexed documents.
class InvertedIndex {
  public:
    void build(const Corpus& corpus) {
        postings_.clear();
        doc_len_.assign(corpus.pictures.size(), 0);
        indexed_docs_ = 0;
        total_terms_ = 0;
        for (std::uint32_t i = 0; i < corpus.pictures.size(); ++i) {
            const auto& tags = corpus.pictures[i].tags;
            if (tags.empty()) continue;
            ++indexed_docs_;
            doc_len_[i] = static_cast<std::uint32_t>(tags.size());
            total_terms_ += tags.size();
            for (const auto& t : tags) postings_[t].push_back({i, 1});
        }
        avg_doc_len_ = indexed_docs_ ? static_cast<double>(total_terms_) / indexed_docs_ : 0.0;
        // Corpus ingest walks pictures in order, so postings are already
        // ascending by doc id; keep the invariant explicit anyway.
        for (auto& [_, plist] : postings_)
            std::sort(plist.begin(), plist.end(),
                      [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
    }

    std::uint32_t doc_count() const { return indexed_docs_; }
    double avg_doc_len() const { return avg_doc_len_; }
    std::uint32_t doc_len(std::uint32_t doc) const { return doc_len_[doc]; }
    std::uint64_t total_term_count() const { return total_terms_; }

    const std::vector<Posting>* postings(const std::string& term) const {
        auto it = postings_.find(term);
        return it == postings_.end() ? nullptr : &it->second;
    }

    std::uint32_t df(const std::string& term) const {
        auto* p = postings(term);
        return p ? static_cast<std::uint32_t>(p->size()) : 0u;
    }

    /// Number of indexed documents containing every given term.
    std::uint32_t co_occurrence(std::span<const std::string> terms) const {
        if (terms.empty()) return 0;
        std::vector<const std::vector<Posting>*> lists;
        lists.reserve(terms.size());
        for (const auto& t : terms) {
            auto* p = postings(t);
            if (!p) return 0;
            lists.push_back(p);
        }
        std::sort(lists.begin(), lists.end(),
                  [](auto* a, auto* b) { return a->size() < b->size(); });
        std::uint32_t count = 0;
        for (const Posting& cand : *lists.front()) {
            bool all = true;
            for (std::size_t i = 1; i < lists.size() && all; ++i) {
                const auto& pl = *lists[i];
                auto it = std::lower_bound(pl.begin(), pl.end(), cand.doc,
                                           [](const Posting& p, std::uint32_t d) { return p.doc < d; });
                all = it != pl.end() && it->doc == cand.doc;
            }
            if (all) ++count;
        }
        return count;
    }

  private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::uint32_t> doc_len_;
    std::uint32_t indexed_docs_ = 0;
    std::uint64_t total_terms_ = 0;
    double avg_doc_len_ = 0.0;
};

namespace detail {

inline double bm25_idf(std::uint32_t df, std::uint32_t n_docs) {
    // Floored so that very common terms cannot flip a match into a penalty.
    constexpr double kIdfFloor = 1e-6;
    double idf = std::log((static_cast<double>(n_docs) - df + 0.5) / (df + 0.5));
    return std::max(kIdfFloor, idf);
}

inline double bm25_tf_part(double tf, double dl, double avg_dl, const Bm25Params& p) {
    double k = p.k1 * ((1.0 - p.b) + p.b * (avg_dl > 0.0 ? dl / avg_dl : 0.0));
    return (p.k1 + 1.0) * tf / (k + tf);
}

inline RankedList finalize_ranking(std::unordered_map<std::uint32_t, double>&& acc,
                                   std::size_t cutoff) {
    RankedList out;
    out.reserve(acc.size());
    for (const auto& [doc, score] : acc) out.push_back({doc, score});
    std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    });
    if (out.size() > cutoff) out.resize(cutoff);
    return out;
}

}  // namespace detail

/// Okapi BM25 with the query-frequency (k3) component. Repeated query terms
/// raise qtf; out-of-vocabulary terms contribute nothing.
inline RankedList search(const InvertedIndex& index, const std::vector<std::string>& terms,
                         const Bm25Params& params = {}, std::size_t cutoff = kDefaultCutoff) {
    std::vector<std::pair<std::string, std::uint32_t>> qtf;
    for (const auto& t : terms) {
        auto it = std::find_if(qtf.begin(), qtf.end(),
                               [&](const auto& e) { return e.first == t; });
        if (it == qtf.end())
            qtf.emplace_back(t, 1);
        else
            ++it->second;
    }
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& [term, count] : qtf) {
        auto* plist = index.postings(term);
        if (!plist) continue;
        double idf = detail::bm25_idf(index.df(term), index.doc_count());
        double qpart = (params.k3 + 1.0) * count / (params.k3 + count);
        for (const Posting& p : *plist) {
            acc[p.doc] += idf *
                          detail::bm25_tf_part(p.tf, index.doc_len(p.doc), index.avg_doc_len(),
                                               params) *
                          qpart;
        }
    }
    return detail::finalize_ranking(std::move(acc), cutoff);
}

/// BM25 over a weighted query: the weight multiplies the term's score and
/// stands in for the query frequency in the k3 component. A weight of 1
/// reproduces the unweighted score exactly.
inline RankedList search_weighted(const InvertedIndex& index,
                                  const std::vector<std::pair<std::string, double>>& weighted,
                                  const Bm25Params& params = {},
                                  std::size_t cutoff = kDefaultCutoff) {
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& [term, w] : weighted) {
        if (w <= 0.0) continue;
        auto* plist = index.postings(term);
        if (!plist) continue;
        double idf = detail::bm25_idf(index.df(term), index.doc_count());
        double qpart = (params.k3 + 1.0) * w / (params.k3 + w);
        for (const Posting& p : *plist) {
            acc[p.doc] += w * idf *
                          detail::bm25_tf_part(p.tf, index.doc_len(p.doc), index.avg_doc_len(),
                                               params) *
                          qpart;
        }
    }
    return detail::finalize_ranking(std::move(acc), cutoff);
}

/// AP over a ranking; unretrieved relevant documents contribute zero.
/// An empty relevant set is a skip signal (nullopt), not a zero.
inline std::optional<double> average_precision(const RankedList& ranked,
                                               const std::unordered_set<std::uint32_t>& relevant) {
    if (relevant.empty()) return std::nullopt;
    double hits = 0.0, sum = 0.0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        if (relevant.count(ranked[r].doc)) {
            hits += 1.0;
            sum += hits / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

inline double mean_ap(std::span<const double> aps) { return mean(aps); }

struct TTestResult {
    double t = 0.0;
    double p = 0.5;  // one-tailed, H1: mean(a - b) > 0
};

/// Paired two-sample one-tailed t-test on per-query AP lists. Degenerate
/// zero-variance differences collapse to p = 0 / 0.5 / 1 by the mean's sign.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
    std::size_t n = a.size();
    if (n < 2) throw std::invalid_argument("paired_t_test: need at least 2 pairs");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    double m = mean(d);
    double var = sample_variance(d);
    TTestResult r;
    if (var == 0.0) {
        if (m > 0.0) {
            r.t = std::numeric_limits<double>::infinity();
            r.p = 0.0;
        } else if (m < 0.0) {
            r.t = -std::numeric_limits<double>::infinity();
            r.p = 1.0;
        }
        return r;
    }
    r.t = m / std::sqrt(var / static_cast<double>(n));
    r.p = 1.0 - student_t_cdf(r.t, static_cast<double>(n - 1));
    return r;
}

}  // namespace geostat
