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

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "geostat/candidate_features.hpp"
#include "geostat/corpus.hpp"
#include "geostat/expansion.hpp"
#include "geostat/learn.hpp"
#include "geostat/retrieval.hpp"
#include "geostat/synth.hpp"

namespace geostat {

/// Full-run settings; `run` subcommand reads these from a flat key=value
/// file, other callers fill them directly.
struct PipelineConfig {
    std::string corpus_path;
    std::string truth_path;
    std::string train_queries_path;
    std::string eval_queries_path;
    std::string out_dir = ".";

    ExpansionConfig expansion;
    std::size_t n_sims = 99;
    std::size_t max_pattern_points = 256;
    std::uint32_t min_tile_pictures = 1000;
    std::uint64_t seed = 1;
    std::int64_t bin_seconds = kWeekSeconds;

    std::size_t train_candidates_per_query = 12;  // ap_diff labeling depth
    std::size_t training_set_target = 1000;       // balanced total size
    std::vector<ExpansionMode> modes = {ExpansionMode::kKl, ExpansionMode::kKlT,
                                        ExpansionMode::kKlSt};

    // Optional parameter sweep: when both lists are non-empty the run also
    // evaluates every (feedback docs x expansion terms) cell and writes a
    // MAP table per mode.
    std::vector<std::size_t> grid_fb_docs;
    std::vector<std::size_t> grid_fb_terms;

    void apply(const std::string& key, const std::string& value);
    static PipelineConfig from_file(const std::string& path);
};

inline void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "corpus") corpus_path = value;
    else if (key == "truth") truth_path = value;
    else if (key == "train_queries") train_queries_path = value;
    else if (key == "eval_queries") eval_queries_path = value;
    else if (key == "out_dir") out_dir = value;
    else if (key == "fb_docs") expansion.fb_docs = std::stoul(value);
    else if (key == "fb_terms") expansion.fb_terms = std::stoul(value);
    else if (key == "alpha") expansion.alpha = std::stod(value);
    else if (key == "beta") expansion.beta = std::stod(value);
    else if (key == "theta") expansion.theta = std::stod(value);
    else if (key == "cutoff") expansion.cutoff = std::stoul(value);
    else if (key == "best_tile_k") expansion.best_tile_k = std::stoul(value);
    else if (key == "n_sims") n_sims = std::stoul(value);
    else if (key == "max_pattern_points") max_pattern_points = std::stoul(value);
    else if (key == "min_tile_pictures") min_tile_pictures = std::stoul(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "bin_seconds") bin_seconds = std::stoll(value);
    else if (key == "train_candidates_per_query") train_candidates_per_query = std::stoul(value);
    else if (key == "training_set_target") training_set_target = std::stoul(value);
    else if (key == "modes") {
        modes.clear();
        std::stringstream ss(value);
        std::string m;
        while (std::getline(ss, m, ',')) {
            auto mode = mode_from_name(m);
            if (!mode) throw DataError("unknown expansion mode: " + m);
            modes.push_back(*mode);
        }
    } else if (key == "grid_fb_docs" || key == "grid_fb_terms") {
        auto& list = key == "grid_fb_docs" ? grid_fb_docs : grid_fb_terms;
        list.clear();
        std::stringstream ss(value);
        std::string v;
        while (std::getline(ss, v, ',')) list.push_back(std::stoul(v));
    } else {
        throw DataError("unknown run config key: " + key);
    }
}

inline PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read run config: " + path);
    PipelineConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            auto last = s.find_last_not_of(" \t\r");
            s.resize(last == std::string::npos ? 0 : last + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.apply(key, value);
    }
    return cfg;
}

/// Loaded inputs plus the derived structures every stage shares.
struct PipelineContext {
    Corpus corpus;
    EventGroundTruth truth;
    std::vector<Query> train_queries;
    std::vector<Query> eval_queries;
    InvertedIndex index;
    TileIndex tiles;

    std::unordered_set<std::uint32_t> relevant_set(const std::string& query_id) const {
        std::unordered_set<std::uint32_t> rel;
        if (const auto* docs = truth.relevant_for(query_id))
            rel.insert(docs->begin(), docs->end());
        return rel;
    }
};

inline PipelineContext load_context(const PipelineConfig& cfg) {
    PipelineContext ctx;
    if (cfg.corpus_path.empty()) throw DataError("run config: missing corpus path (stage ingest)");
    ctx.corpus = parse_corpus(cfg.corpus_path);
    if (!cfg.truth_path.empty()) ctx.truth = parse_ground_truth(cfg.truth_path, ctx.corpus);
    if (!cfg.train_queries_path.empty()) ctx.train_queries = parse_queries(cfg.train_queries_path);
    if (!cfg.eval_queries_path.empty()) ctx.eval_queries = parse_queries(cfg.eval_queries_path);
    ctx.index.build(ctx.corpus);
    ctx.tiles.build(ctx.corpus, cfg.min_tile_pictures);
    return ctx;
}

/// Labeled-candidate harvesting over the training queries: per query the
/// top candidates by KL get AP_diff labels and full feature rows, then the
/// pool is balanced good/bad. Short positive pools shrink the set (with a
/// warning flag) rather than unbalancing it.
struct TrainingAssembly {
    TrainingSet set;  // full (term+temporal+spatial) layout
    std::size_t positives_found = 0;
    std::size_t negatives_found = 0;
    bool balanced_short = false;
};

inline TrainingAssembly assemble_training_set(const PipelineConfig& cfg, PipelineContext& ctx,
                                              SpatialFeatureExtractor& spatial,
                                              TemporalFeatureExtractor& temporal) {
    TrainingAssembly out;
    out.set.feature_names = full_feature_names();

    std::vector<TrainingRow> goods, bads;
    for (const auto& q : ctx.train_queries) {
        auto relevant = ctx.relevant_set(q.id);
        if (relevant.empty()) continue;
        RankedList initial = search(ctx.index, q.terms, cfg.expansion.bm25, cfg.expansion.cutoff);
        if (initial.empty()) continue;
        std::size_t k = std::min<std::size_t>(cfg.expansion.fb_docs, initial.size());
        std::vector<std::uint32_t> feedback;
        for (std::size_t i = 0; i < k; ++i) feedback.push_back(initial[i].doc);
        auto cands = extract_candidates(feedback, q.terms, ctx.corpus);
        if (cands.empty()) continue;

        FeedbackStats fb = FeedbackStats::from_docs(feedback, ctx.corpus);
        std::vector<std::pair<double, std::string>> by_kl;
        for (const auto& e : cands) by_kl.emplace_back(-kl_score(e, fb, ctx.index), e);
        std::sort(by_kl.begin(), by_kl.end());
        if (by_kl.size() > cfg.train_candidates_per_query)
            by_kl.resize(cfg.train_candidates_per_query);

        std::vector<std::uint32_t> ranked_docs(initial.size());
        for (std::size_t i = 0; i < initial.size(); ++i) ranked_docs[i] = initial[i].doc;
        auto best_tile = select_best_tile(q.terms, ranked_docs, ctx.corpus, ctx.tiles,
                                          cfg.expansion.best_tile_k);
        TimeSeries query_ts = temporal.query_series(q.terms);

        std::vector<std::optional<TrainingRow>> rows(by_kl.size());
        parallel_for(by_kl.size(), [&](std::size_t i) {
            const std::string& e = by_kl[i].second;
            auto diff = ap_diff(q.terms, e, ctx.index, relevant, cfg.expansion.bm25,
                                cfg.expansion.cutoff);
            if (!diff) return;
            CandidateFeatures f;
            f.term = term_features(e, q.terms, feedback, ctx.corpus, ctx.index);
            f.temporal = temporal.extract(e, q.terms, query_ts);
            f.spatial = spatial.extract(e, q.terms, best_tile);
            TrainingRow row;
            row.x = flatten_full(f);
            row.label = label_good(*diff, cfg.expansion.theta) ? 1 : 0;
            row.query_id = q.id;
            row.term = e;
            rows[i] = std::move(row);
        });
        for (auto& r : rows) {
            if (!r) continue;
            (r->label ? goods : bads).push_back(std::move(*r));
        }
    }

    out.positives_found = goods.size();
    out.negatives_found = bads.size();
    std::size_t half = cfg.training_set_target / 2;
    std::size_t take = std::min({half, goods.size(), bads.size()});
    out.balanced_short = take < half;

    auto rng = make_rng(derive_seed(cfg.seed, 0xba1a));
    shuffle_indices(goods, rng);
    shuffle_indices(bads, rng);
    for (std::size_t i = 0; i < take; ++i) {
        out.set.rows.push_back(std::move(goods[i]));
        out.set.rows.push_back(std::move(bads[i]));
    }
    return out;
}

/// The term+temporal block is a prefix of the full layout, so the temporal
/// classifier trains on truncated copies of the same rows.
inline TrainingSet truncate_to_term_temporal(const TrainingSet& full) {
    TrainingSet t;
    t.feature_names = term_temporal_feature_names();
    t.rows = full.rows;
    for (auto& r : t.rows) r.x.resize(t.feature_names.size());
    return t;
}

struct ModeEvaluation {
    std::vector<double> ap;  // aligned with evaluated query order
    double map = 0.0;
};

struct PipelineResult {
    std::vector<std::string> eval_query_ids;
    std::map<std::string, ModeEvaluation> by_mode;  // includes "bm25"
    std::map<std::string, TTestResult> tests;       // "a_vs_b" -> result
    TrainingAssembly training;
    std::map<std::string, std::string> artifacts;   // name -> path
};

/// Runs ingest -> index -> tiles -> train -> expand -> evaluate and writes
/// run files, models, reports and a manifest under cfg.out_dir.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    PipelineContext ctx = load_context(cfg);
    if (ctx.truth.events.empty())
        throw DataError("run: ground truth has no events (stage train)");
    if (ctx.eval_queries.empty())
        throw DataError("run: no evaluation queries (stage evaluate)");

    SpatialConfig scfg;
    scfg.n_sims = cfg.n_sims;
    scfg.seed = derive_seed(cfg.seed, 0x5a7a);
    scfg.max_pattern_points = cfg.max_pattern_points;
    SpatialFeatureExtractor spatial(ctx.corpus, ctx.tiles, scfg);
    TemporalFeatureExtractor temporal(ctx.corpus, ctx.index, cfg.bin_seconds);

    PipelineResult res;

    bool needs_learning = false;
    for (auto m : cfg.modes)
        if (m == ExpansionMode::kKlT || m == ExpansionMode::kKlSt) needs_learning = true;

    RandomForest forest_t, forest_st;
    if (needs_learning) {
        if (ctx.train_queries.empty())
            throw DataError("run: learning modes need training queries (stage train)");
        res.training = assemble_training_set(cfg, ctx, spatial, temporal);
        if (res.training.set.rows.empty())
            throw DataError("run: training set came out empty (stage train)");
        std::string ts_path = cfg.out_dir + "/training_set.csv";
        res.training.set.save_csv(ts_path);
        res.artifacts["training_set"] = ts_path;

        ForestParams fp;
        fp.seed = derive_seed(cfg.seed, 0xf07e);
        TrainingSet tset = truncate_to_term_temporal(res.training.set);
        forest_t.train(tset, fp);
        forest_st.train(res.training.set, fp);
        forest_t.save(cfg.out_dir + "/forest_t.bin");
        forest_st.save(cfg.out_dir + "/forest_st.bin");
        res.artifacts["forest_t"] = cfg.out_dir + "/forest_t.bin";
        res.artifacts["forest_st"] = cfg.out_dir + "/forest_st.bin";
    }

    ExpansionServices sv;
    sv.corpus = &ctx.corpus;
    sv.index = &ctx.index;
    sv.tiles = &ctx.tiles;
    sv.temporal = &temporal;
    sv.spatial = &spatial;
    sv.forest_t = needs_learning ? &forest_t : nullptr;
    sv.forest_st = needs_learning ? &forest_st : nullptr;
    ZkycTable zkyc(ctx.corpus);
    for (auto m : cfg.modes)
        if (m == ExpansionMode::kKlZkyc) sv.zkyc = &zkyc;
    QueryExpander expander(sv, cfg.expansion);

    std::map<std::string, std::ofstream> run_files;
    auto open_run = [&](const std::string& name) {
        std::string path = cfg.out_dir + "/run_" + name + ".txt";
        run_files[name].open(path);
        res.artifacts["run_" + name] = path;
    };
    open_run("bm25");
    for (auto m : cfg.modes) open_run(mode_name(m));

    auto emit_run = [&](const std::string& name, const std::string& qid, const RankedList& rl) {
        auto& f = run_files[name];
        f.precision(8);
        for (std::size_t r = 0; r < rl.size(); ++r)
            f << qid << ' ' << ctx.corpus.pictures[rl[r].doc].id << ' ' << (r + 1) << ' '
              << rl[r].score << ' ' << name << '\n';
    };

    for (const auto& q : ctx.eval_queries) {
        auto relevant = ctx.relevant_set(q.id);
        if (relevant.empty()) continue;  // no ground truth: skip signal
        res.eval_query_ids.push_back(q.id);
        PreparedQuery prep = expander.prepare(q);
        auto base_ap = average_precision(prep.initial, relevant);
        res.by_mode["bm25"].ap.push_back(base_ap.value_or(0.0));
        emit_run("bm25", q.id, prep.initial);
        for (auto m : cfg.modes) {
            ExpansionResult er = expander.finalize(q, prep, m);
            auto ap = average_precision(er.final_ranking, relevant);
            res.by_mode[mode_name(m)].ap.push_back(ap.value_or(0.0));
            emit_run(mode_name(m), q.id, er.final_ranking);
        }
    }
    if (res.eval_query_ids.empty())
        throw DataError("run: every evaluation query lacked ground truth (stage evaluate)");

    for (auto& [name, ev] : res.by_mode) ev.map = mean_ap(ev.ap);
    auto add_test = [&](const std::string& a, const std::string& b) {
        if (!res.by_mode.count(a) || !res.by_mode.count(b)) return;
        if (res.by_mode[a].ap.size() < 2) return;
        res.tests[a + "_vs_" + b] = paired_t_test(res.by_mode[a].ap, res.by_mode[b].ap);
    };
    add_test("kl", "bm25");
    add_test("kl_t", "kl");
    add_test("kl_st", "kl");
    add_test("kl_st", "kl_t");
    add_test("kl_zkyc", "kl");

    // Optional (feedback docs x expansion terms) sweep, one MAP row per cell.
    if (!cfg.grid_fb_docs.empty() && !cfg.grid_fb_terms.empty()) {
        std::string path = cfg.out_dir + "/grid_report.csv";
        std::ofstream f(path);
        f << "fb_docs,fb_terms,bm25";
        for (auto m : cfg.modes) f << ',' << mode_name(m);
        f << '\n';
        f.precision(6);
        for (std::size_t k : cfg.grid_fb_docs) {
            ExpansionConfig kcfg = cfg.expansion;
            kcfg.fb_docs = k;
            QueryExpander kx(sv, kcfg);
            std::vector<PreparedQuery> preps;
            std::vector<std::unordered_set<std::uint32_t>> rels;
            std::vector<const Query*> qs;
            std::vector<double> bm25_ap;
            for (const auto& q : ctx.eval_queries) {
                auto relevant = ctx.relevant_set(q.id);
                if (relevant.empty()) continue;
                preps.push_back(kx.prepare(q));
                bm25_ap.push_back(
                    average_precision(preps.back().initial, relevant).value_or(0.0));
                rels.push_back(std::move(relevant));
                qs.push_back(&q);
            }
            for (std::size_t n : cfg.grid_fb_terms) {
                ExpansionConfig ncfg = kcfg;
                ncfg.fb_terms = n;
                QueryExpander nx(sv, ncfg);
                f << k << ',' << n << ',' << mean_ap(bm25_ap);
                for (auto m : cfg.modes) {
                    std::vector<double> aps;
                    for (std::size_t i = 0; i < preps.size(); ++i) {
                        auto er = nx.finalize(*qs[i], preps[i], m);
                        aps.push_back(
                            average_precision(er.final_ranking, rels[i]).value_or(0.0));
                    }
                    f << ',' << mean_ap(aps);
                }
                f << '\n';
            }
        }
        res.artifacts["grid_report"] = path;
    }

    // Per-query AP table.
    {
        std::string path = cfg.out_dir + "/ap_report.csv";
        std::ofstream f(path);
        f << "query";
        for (const auto& [name, _] : res.by_mode) f << ',' << name;
        f << '\n';
        f.precision(8);
        for (std::size_t i = 0; i < res.eval_query_ids.size(); ++i) {
            f << res.eval_query_ids[i];
            for (const auto& [_, ev] : res.by_mode) f << ',' << ev.ap[i];
            f << '\n';
        }
        res.artifacts["ap_report"] = path;
    }

    // Manifest: inputs, parameters and headline numbers.
    {
        nlohmann::json m;
        m["corpus"] = cfg.corpus_path;
        m["corpus_hash"] = ctx.corpus.content_hash;
        m["seed"] = cfg.seed;
        m["params"] = {{"fb_docs", cfg.expansion.fb_docs},
                       {"fb_terms", cfg.expansion.fb_terms},
                       {"alpha", cfg.expansion.alpha},
                       {"beta", cfg.expansion.beta},
                       {"theta", cfg.expansion.theta},
                       {"cutoff", cfg.expansion.cutoff},
                       {"n_sims", cfg.n_sims},
                       {"max_pattern_points", cfg.max_pattern_points},
                       {"min_tile_pictures", cfg.min_tile_pictures},
                       {"bin_seconds", cfg.bin_seconds}};
        m["note"] = "zkyc relatedness approximates unique users by picture counts";
        for (const auto& [name, ev] : res.by_mode) m["map"][name] = ev.map;
        for (const auto& [name, t] : res.tests)
            m["tests"][name] = {{"t", t.t}, {"p", t.p}};
        for (const auto& [name, path] : res.artifacts) m["artifacts"][name] = path;
        if (res.training.set.rows.size() > 0) {
            m["training"] = {{"rows", res.training.set.rows.size()},
                             {"positives_found", res.training.positives_found},
                             {"negatives_found", res.training.negatives_found},
                             {"balanced_short", res.training.balanced_short}};
        }
        std::string path = cfg.out_dir + "/manifest.json";
        std::ofstream f(path);
        f << m.dump(2) << '\n';
        res.artifacts["manifest"] = path;
    }
    return res;
}

}  // namespace geostat
