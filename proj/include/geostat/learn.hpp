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
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "geostat/common.hpp"

namespace geostat {

/// One labeled candidate term: flattened features plus provenance.
struct TrainingRow {
    std::vector<double> x;
    int label = 0;  // 1 = good expansion term, 0 = bad
    std::string query_id;
    std::string term;
};

struct TrainingSet {
    std::vector<std::string> feature_names;
    std::vector<TrainingRow> rows;

    std::size_t dim() const { return feature_names.size(); }

    void save_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DataError("cannot write training set: " + path);
        out << "query,term,label";
        for (const auto& n : feature_names) out << ',' << n;
        out << '\n';
        out.precision(17);
        for (const auto& r : rows) {
            out << r.query_id << ',' << r.term << ',' << (r.label ? "good" : "bad");
            for (double v : r.x) out << ',' << v;
            out << '\n';
        }
    }

    static TrainingSet load_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot read training set: " + path);
        TrainingSet set;
        std::string line;
        if (!std::getline(in, line)) throw DataError("empty training set: " + path);
        {
            std::stringstream ss(line);
            std::string cell;
            int col = 0;
            while (std::getline(ss, cell, ',')) {
                if (col++ >= 3) set.feature_names.push_back(cell);
            }
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            TrainingRow r;
            std::string cell;
            std::getline(ss, r.query_id, ',');
            std::getline(ss, r.term, ',');
            std::getline(ss, cell, ',');
            r.label = (cell == "good") ? 1 : 0;
            while (std::getline(ss, cell, ',')) r.x.push_back(std::stod(cell));
            if (r.x.size() != set.dim())
                throw DataError("training row width mismatch in " + path);
            set.rows.push_back(std::move(r));
        }
        return set;
    }
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::uint64_t seed = 0;
    // Gini CART, sqrt(d) features per split, unlimited depth, min leaf 1.
};

namespace detail {

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t vote = 0;  // leaf majority; ties go to the negative class
};

struct Tree {
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> x) const {
        std::int32_t n = 0;
        while (nodes[static_cast<std::size_t>(n)].feature >= 0) {
            const TreeNode& nd = nodes[static_cast<std::size_t>(n)];
            n = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(n)].vote;
    }
};

struct SplitChoice {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

class TreeBuilder {
  public:
    TreeBuilder(const std::vector<const TrainingRow*>& rows, std::size_t dim,
                std::uint64_t seed)
        : rows_(rows), dim_(dim), rng_(make_rng(seed)) {
        mtry_ = static_cast<std::size_t>(std::sqrt(static_cast<double>(dim)));
        if (mtry_ < 1) mtry_ = 1;
        feature_pool_.resize(dim_);
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
    }

    Tree build(std::vector<std::uint32_t> sample) {
        Tree t;
        grow(t, std::move(sample));
        return t;
    }

  private:
    std::int32_t grow(Tree& t, std::vector<std::uint32_t> idx) {
        std::size_t pos = 0, neg = 0;
        for (auto i : idx) (rows_[i]->label ? pos : neg) += 1;
        std::int32_t node_id = static_cast<std::int32_t>(t.nodes.size());
        t.nodes.emplace_back();
        if (pos == 0 || neg == 0) {
            t.nodes[static_cast<std::size_t>(node_id)].vote = pos > neg ? 1 : 0;
            return node_id;
        }
        auto split = best_split(idx, pos, neg);
        if (split.feature < 0) {
            t.nodes[static_cast<std::size_t>(node_id)].vote = pos > neg ? 1 : 0;
            return node_id;
        }
        std::vector<std::uint32_t> left, right;
        for (auto i : idx) {
            (rows_[i]->x[static_cast<std::size_t>(split.feature)] <= split.threshold ? left
                                                                                     : right)
                .push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        t.nodes[static_cast<std::size_t>(node_id)].feature = split.feature;
        t.nodes[static_cast<std::size_t>(node_id)].threshold = split.threshold;
        std::int32_t l = grow(t, std::move(left));
        t.nodes[static_cast<std::size_t>(node_id)].left = l;
        std::int32_t r = grow(t, std::move(right));
        t.nodes[static_cast<std::size_t>(node_id)].right = r;
        return node_id;
    }

    SplitChoice best_split(const std::vector<std::uint32_t>& idx, std::size_t pos,
                           std::size_t neg) {
        // Sample mtry distinct features (partial Fisher-Yates).
        for (std::size_t i = 0; i < mtry_; ++i) {
            std::size_t j = i + uniform_index(rng_, dim_ - i);
            std::swap(feature_pool_[i], feature_pool_[j]);
        }
        const double n = static_cast<double>(idx.size());
        SplitChoice best;
        best.weighted_gini = gini(pos, neg);  // must strictly improve
        std::vector<std::pair<double, int>> vals(idx.size());
        for (std::size_t fi = 0; fi < mtry_; ++fi) {
            std::int32_t f = static_cast<std::int32_t>(feature_pool_[fi]);
            for (std::size_t i = 0; i < idx.size(); ++i) {
                const TrainingRow* r = rows_[idx[i]];
                vals[i] = {r->x[static_cast<std::size_t>(f)], r->label};
            }
            std::sort(vals.begin(), vals.end());
            std::size_t lp = 0, ln = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                (vals[i].second ? lp : ln) += 1;
                if (vals[i].first == vals[i + 1].first) continue;
                std::size_t rl = i + 1, rr = vals.size() - rl;
                double wg = (static_cast<double>(rl) / n) * gini(lp, ln) +
                            (static_cast<double>(rr) / n) * gini(pos - lp, neg - ln);
                if (wg < best.weighted_gini - 1e-15) {
                    best.weighted_gini = wg;
                    best.feature = f;
                    best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        return best;
    }

    static double gini(std::size_t pos, std::size_t neg) {
        double n = static_cast<double>(pos + neg);
        if (n == 0.0) return 0.0;
        double pp = pos / n, pn = neg / n;
        return 1.0 - pp * pp - pn * pn;
    }

    const std::vector<const TrainingRow*>& rows_;
    std::size_t dim_;
    std::size_t mtry_;
    std::mt19937_64 rng_;
    std::vector<std::size_t> feature_pool_;
};

}  // namespace detail

/// Random forest of Gini CART trees on bootstrap samples. Training rows are
/// canonicalized (sorted by features, then label) before bootstrap index
/// derivation, so predictions do not depend on the input row order.
class RandomForest {
  public:
    void train(const TrainingSet& set, const ForestParams& params = {}) {
        if (set.rows.empty()) throw DataError("cannot train a forest on an empty set");
        params_ = params;
        dim_ = set.dim();
        std::vector<const TrainingRow*> rows(set.rows.size());
        for (std::size_t i = 0; i < set.rows.size(); ++i) rows[i] = &set.rows[i];
        std::sort(rows.begin(), rows.end(), [](const TrainingRow* a, const TrainingRow* b) {
            if (a->x != b->x) return a->x < b->x;
            return a->label < b->label;
        });
        trees_.assign(params.n_trees, {});
        const std::size_t n = rows.size();
        parallel_for(params.n_trees, [&](std::size_t t) {
            auto rng = make_rng(derive_seed(params_.seed, t));
            std::vector<std::uint32_t> sample(n);
            for (auto& s : sample) s = static_cast<std::uint32_t>(uniform_index(rng, n));
            std::sort(sample.begin(), sample.end());
            detail::TreeBuilder builder(rows, dim_, derive_seed(params_.seed ^ 0x5eedULL, t));
            trees_[t] = builder.build(std::move(sample));
        });
    }

    /// Fraction of trees voting for the positive (good) class.
    double predict(std::span<const double> x) const {
        if (trees_.empty()) throw DataError("forest is untrained");
        std::size_t votes = 0;
        for (const auto& t : trees_) votes += static_cast<std::size_t>(t.predict(x));
        return static_cast<double>(votes) / static_cast<double>(trees_.size());
    }

    std::size_t tree_count() const { return trees_.size(); }
    std::size_t dim() const { return dim_; }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write model: " + path);
        const char magic[8] = {'G', 'S', 'T', 'F', 'R', 'S', 'T', '1'};
        out.write(magic, 8);
        auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
        auto w64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
        w64(params_.seed);
        w32(static_cast<std::uint32_t>(trees_.size()));
        w32(static_cast<std::uint32_t>(dim_));
        for (const auto& t : trees_) {
            w32(static_cast<std::uint32_t>(t.nodes.size()));
            for (const auto& nd : t.nodes) {
                out.write(reinterpret_cast<const char*>(&nd.feature), 4);
                out.write(reinterpret_cast<const char*>(&nd.threshold), 8);
                out.write(reinterpret_cast<const char*>(&nd.left), 4);
                out.write(reinterpret_cast<const char*>(&nd.right), 4);
                out.write(reinterpret_cast<const char*>(&nd.vote), 1);
            }
        }
    }

    static RandomForest load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot read model: " + path);
        char magic[8];
        in.read(magic, 8);
        if (std::string_view(magic, 8) != "GSTFRST1")
            throw DataError("unrecognized model file: " + path);
        RandomForest f;
        auto r32 = [&] {
            std::uint32_t v = 0;
            in.read(reinterpret_cast<char*>(&v), 4);
            return v;
        };
        std::uint64_t seed = 0;
        in.read(reinterpret_cast<char*>(&seed), 8);
        f.params_.seed = seed;
        std::uint32_t ntrees = r32();
        f.dim_ = r32();
        f.trees_.resize(ntrees);
        for (auto& t : f.trees_) {
            std::uint32_t nn = r32();
            t.nodes.resize(nn);
            for (auto& nd : t.nodes) {
                in.read(reinterpret_cast<char*>(&nd.feature), 4);
                in.read(reinterpret_cast<char*>(&nd.threshold), 8);
                in.read(reinterpret_cast<char*>(&nd.left), 4);
                in.read(reinterpret_cast<char*>(&nd.right), 4);
                in.read(reinterpret_cast<char*>(&nd.vote), 1);
            }
        }
        if (!in) throw DataError("truncated model file: " + path);
        return f;
    }

  private:
    std::vector<detail::Tree> trees_;
    std::size_t dim_ = 0;
    ForestParams params_;
};

enum class CvScheme { kLeaveOneOut, kTenFold };

/// Confusion-matrix metrics in the Table-2 layout: accuracy plus per-class
/// precision and recall ("+" = good, "-" = bad).
struct ValidationMetrics {
    double accuracy = 0.0;
    double precision_pos = 0.0, precision_neg = 0.0;
    double recall_pos = 0.0, recall_neg = 0.0;
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

inline ValidationMetrics cross_validate(const TrainingSet& set, CvScheme scheme,
                                        const ForestParams& params = {}) {
    if (set.rows.size() < 2) throw DataError("cross-validation needs at least 2 rows");
    const std::size_t n = set.rows.size();
    std::size_t folds = scheme == CvScheme::kLeaveOneOut ? n : std::min<std::size_t>(10, n);

    std::vector<std::size_t> fold_of(n);
    {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        auto rng = make_rng(derive_seed(params.seed, 0xf01d5ULL));
        shuffle_indices(order, rng);
        for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % folds;
    }

    std::vector<int> predicted(n, 0);
    std::vector<TrainingSet> fold_sets(folds);
    for (std::size_t f = 0; f < folds; ++f) {
        fold_sets[f].feature_names = set.feature_names;
        for (std::size_t i = 0; i < n; ++i)
            if (fold_of[i] != f) fold_sets[f].rows.push_back(set.rows[i]);
    }
    parallel_for(folds, [&](std::size_t f) {
        RandomForest forest;
        forest.train(fold_sets[f], params);
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] != f) continue;
            predicted[i] = forest.predict(set.rows[i].x) >= 0.5 ? 1 : 0;
        }
    });

    ValidationMetrics m;
    for (std::size_t i = 0; i < n; ++i) {
        int truth = set.rows[i].label, pred = predicted[i];
        if (truth && pred) ++m.tp;
        else if (!truth && !pred) ++m.tn;
        else if (!truth && pred) ++m.fp;
        else ++m.fn;
    }
    auto ratio = [](std::size_t a, std::size_t b) {
        return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
    };
    m.accuracy = ratio(m.tp + m.tn, n);
    m.precision_pos = ratio(m.tp, m.tp + m.fp);
    m.precision_neg = ratio(m.tn, m.tn + m.fn);
    m.recall_pos = ratio(m.tp, m.tp + m.fn);
    m.recall_neg = ratio(m.tn, m.tn + m.fp);
    return m;
}

enum class QualityMeasure { kIG, kGR, kSU };

struct FeatureQuality {
    std::string name;
    double score = 0.0;
    bool defined = true;
};

namespace detail {

inline double entropy_bits(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

/// Equal-frequency discretization into at most `bins` bins.
inline std::vector<std::size_t> discretize(std::span<const double> values, std::size_t bins) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (std::size_t b = 1; b < bins; ++b) {
        std::size_t pos = b * sorted.size() / bins;
        if (pos == 0 || pos >= sorted.size()) continue;
        double e = sorted[pos];
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    std::vector<std::size_t> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
    return out;
}

struct MutualInfo {
    double h_class = 0.0;
    double h_feature = 0.0;
    double ig = 0.0;  // bits
};

inline MutualInfo mutual_info(std::span<const std::size_t> fbin, std::span<const int> label,
                              std::size_t nbins) {
    std::size_t n = fbin.size();
    std::vector<std::size_t> class_counts(2, 0);
    std::vector<std::size_t> feat_counts(nbins, 0);
    std::vector<std::size_t> joint(nbins * 2, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++class_counts[static_cast<std::size_t>(label[i])];
        ++feat_counts[fbin[i]];
        ++joint[fbin[i] * 2 + static_cast<std::size_t>(label[i])];
    }
    MutualInfo mi;
    mi.h_class = entropy_bits(class_counts, n);
    mi.h_feature = entropy_bits(feat_counts, n);
    double h_cond = 0.0;
    for (std::size_t b = 0; b < nbins; ++b) {
        if (feat_counts[b] == 0) continue;
        std::size_t cells[2] = {joint[b * 2], joint[b * 2 + 1]};
        h_cond += (static_cast<double>(feat_counts[b]) / static_cast<double>(n)) *
                  entropy_bits(cells, feat_counts[b]);
    }
    mi.ig = mi.h_class - h_cond;
    return mi;
}

}  // namespace detail

/// Per-feature IG / GR / SU against the class, using 10 equal-frequency
/// bins. SU follows the printed form IG/(H(C)+H(F)) (conventional SU is
/// twice this). Returned in descending score order.
inline std::vector<FeatureQuality> feature_quality(const TrainingSet& set,
                                                   QualityMeasure measure,
                                                   std::size_t bins = 10) {
    std::vector<int> labels(set.rows.size());
    for (std::size_t i = 0; i < set.rows.size(); ++i) labels[i] = set.rows[i].label;
    std::vector<FeatureQuality> out(set.dim());
    std::vector<double> col(set.rows.size());
    for (std::size_t f = 0; f < set.dim(); ++f) {
        for (std::size_t i = 0; i < set.rows.size(); ++i) col[i] = set.rows[i].x[f];
        auto fbin = detail::discretize(col, bins);
        auto mi = detail::mutual_info(fbin, labels, bins);
        FeatureQuality q;
        q.name = set.feature_names[f];
        switch (measure) {
            case QualityMeasure::kIG:
                q.score = mi.ig;
                break;
            case QualityMeasure::kGR:
                if (mi.h_class == 0.0) {
                    q.defined = false;
                    q.score = 0.0;
                } else {
                    q.score = mi.ig / mi.h_class;
                }
                break;
            case QualityMeasure::kSU: {
                double denom = mi.h_class + mi.h_feature;
                q.score = denom == 0.0 ? 0.0 : mi.ig / denom;
                break;
            }
        }
        out[f] = std::move(q);
    }
    std::stable_sort(out.begin(), out.end(), [](const FeatureQuality& a, const FeatureQuality& b) {
        return a.score > b.score;
    });
    return out;
}

}  // namespace geostat
