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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geostat/pipeline.hpp"

namespace fs = std::filesystem;
using namespace geostat;

namespace {

struct CommonPaths {
    std::string corpus;
    std::string truth;
    std::string queries;
};

std::ostream& out_or_file(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw DataError("cannot write output file: " + path);
    return file;
}

void cmd_ingest(const std::string& corpus_path) {
    Corpus c = parse_corpus(corpus_path);
    std::size_t geo = 0, ts = 0;
    for (const auto& p : c.pictures) {
        geo += p.geo.has_value();
        ts += p.ts.has_value();
    }
    std::cout << "pictures " << c.size() << "\nvocabulary " << c.vocabulary_size()
              << "\ngeotagged " << geo << "\ntimestamped " << ts << "\nskipped " << c.skipped
              << "\ncontent_hash " << c.content_hash << "\n";
}

void cmd_index(const std::string& corpus_path) {
    Corpus c = parse_corpus(corpus_path);
    InvertedIndex idx;
    idx.build(c);
    std::cout << "indexed_docs " << idx.doc_count() << "\navg_doc_len " << idx.avg_doc_len()
              << "\ntotal_terms " << idx.total_term_count() << "\n";
}

void cmd_tiles(const std::string& corpus_path, std::uint32_t min_pics, const std::string& out) {
    Corpus c = parse_corpus(corpus_path);
    TileIndex t;
    t.build(c, min_pics);
    std::size_t sig = 0;
    for (const auto& [_, tile] : t.tiles()) sig += tile.significant;
    std::cout << "populated_tiles " << t.populated_tiles() << "\nsignificant_tiles " << sig
              << "\nposting_total " << t.posting_total() << "\ncorpus_hash " << t.corpus_hash()
              << "\n";
    if (!out.empty()) {
        t.save(out);
        std::cout << "sidecar " << out << "\n";
    }
}

void cmd_kfn(const std::string& corpus_path, const std::string& tag, const std::string& tag2,
             const std::string& tile_arg, std::size_t sims, std::uint64_t seed,
             const std::string& out_path) {
    Corpus c = parse_corpus(corpus_path);
    TileIndex tiles;
    tiles.build(c);

    std::int32_t tile_id = 0;
    if (tile_arg == "auto") {
        const auto* plist = tiles.postings(tag);
        if (!plist || plist->empty()) throw DataError("tag has no geotagged occurrences: " + tag);
        std::uint32_t best_tf = 0;
        for (const auto& p : *plist) {
            if (p.tf > best_tf) {
                best_tf = p.tf;
                tile_id = p.tile;
            }
        }
    } else {
        tile_id = static_cast<std::int32_t>(std::stol(tile_arg));
    }

    SpatialConfig scfg;
    scfg.n_sims = sims;
    scfg.seed = seed;
    scfg.max_pattern_points = 0;  // exact patterns for the estimator dump
    SpatialFeatureExtractor ext(c, tiles, scfg);

    std::optional<DProfile> prof;
    if (tag2.empty()) {
        prof = ext.self_profile(tile_id, tag);
    } else {
        TagPointPattern a = ext.pattern_for_tag(tile_id, tag);
        TagPointPattern b = ext.pattern_for_tag(tile_id, tag2);
        prof = profile_cross(a, b, scfg.grid, sims, seed);
    }
    if (!prof) throw DataError("degenerate pattern: too few points in tile " +
                               std::to_string(tile_id));

    std::ofstream file;
    auto& os = out_or_file(file, out_path);
    os << "h,khat,lhat,dhat,var,lo,hi\n";
    os.precision(10);
    for (std::size_t k = 0; k < prof->grid.size(); ++k)
        os << prof->grid.h[k] << ',' << prof->khat[k] << ',' << prof->lhat[k] << ','
           << prof->dhat[k] << ',' << prof->var_d[k] << ',' << prof->env_lo[k] << ','
           << prof->env_hi[k] << '\n';
}

PipelineConfig config_from_flags(const CommonPaths& paths, const ExpansionConfig& exp,
                                 std::size_t sims, std::uint64_t seed, std::uint32_t min_pics) {
    PipelineConfig cfg;
    cfg.corpus_path = paths.corpus;
    cfg.truth_path = paths.truth;
    cfg.train_queries_path = paths.queries;
    cfg.expansion = exp;
    cfg.n_sims = sims;
    cfg.seed = seed;
    cfg.min_tile_pictures = min_pics;
    return cfg;
}

void cmd_features(const CommonPaths& paths, const ExpansionConfig& exp, std::size_t sims,
                  std::uint64_t seed, std::uint32_t min_pics, const std::string& out_path) {
    PipelineConfig cfg = config_from_flags(paths, exp, sims, seed, min_pics);
    PipelineContext ctx = load_context(cfg);
    SpatialConfig scfg;
    scfg.n_sims = cfg.n_sims;
    scfg.seed = derive_seed(cfg.seed, 0x5a7a);
    scfg.max_pattern_points = cfg.max_pattern_points;
    SpatialFeatureExtractor spatial(ctx.corpus, ctx.tiles, scfg);
    TemporalFeatureExtractor temporal(ctx.corpus, ctx.index, cfg.bin_seconds);

    std::ofstream file;
    auto& os = out_or_file(file, out_path);
    os << "query,term";
    for (const auto& n : full_feature_names()) os << ',' << n;
    os << '\n';
    os.precision(10);

    for (const auto& q : ctx.train_queries) {
        RankedList initial = search(ctx.index, q.terms, exp.bm25, exp.cutoff);
        if (initial.empty()) continue;
        std::size_t k = std::min<std::size_t>(exp.fb_docs, initial.size());
        std::vector<std::uint32_t> feedback;
        for (std::size_t i = 0; i < k; ++i) feedback.push_back(initial[i].doc);
        auto cands = extract_candidates(feedback, q.terms, ctx.corpus);
        std::vector<std::uint32_t> ranked(initial.size());
        for (std::size_t i = 0; i < initial.size(); ++i) ranked[i] = initial[i].doc;
        auto best_tile = select_best_tile(q.terms, ranked, ctx.corpus, ctx.tiles, exp.best_tile_k);
        TimeSeries qts = temporal.query_series(q.terms);
        std::vector<std::vector<double>> rows(cands.size());
        parallel_for(cands.size(), [&](std::size_t i) {
            CandidateFeatures f;
            f.term = term_features(cands[i], q.terms, feedback, ctx.corpus, ctx.index);
            f.temporal = temporal.extract(cands[i], q.terms, qts);
            f.spatial = spatial.extract(cands[i], q.terms, best_tile);
            rows[i] = flatten_full(f);
        });
        for (std::size_t i = 0; i < cands.size(); ++i) {
            os << q.id << ',' << cands[i];
            for (double v : rows[i]) os << ',' << v;
            os << '\n';
        }
    }
}

void cmd_train(const CommonPaths& paths, const ExpansionConfig& exp, std::size_t sims,
               std::uint64_t seed, std::uint32_t min_pics, std::size_t cands_per_query,
               std::size_t target, const std::string& out_dir) {
    PipelineConfig cfg = config_from_flags(paths, exp, sims, seed, min_pics);
    cfg.train_candidates_per_query = cands_per_query;
    cfg.training_set_target = target;
    cfg.out_dir = out_dir;
    fs::create_directories(out_dir);
    PipelineContext ctx = load_context(cfg);
    if (ctx.truth.events.empty()) throw DataError("train: ground truth required");
    SpatialConfig scfg;
    scfg.n_sims = cfg.n_sims;
    scfg.seed = derive_seed(cfg.seed, 0x5a7a);
    scfg.max_pattern_points = cfg.max_pattern_points;
    SpatialFeatureExtractor spatial(ctx.corpus, ctx.tiles, scfg);
    TemporalFeatureExtractor temporal(ctx.corpus, ctx.index, cfg.bin_seconds);

    TrainingAssembly ta = assemble_training_set(cfg, ctx, spatial, temporal);
    if (ta.set.rows.empty()) throw DataError("train: no labeled candidates harvested");
    if (ta.balanced_short)
        std::cerr << "warning: balanced size limited to " << ta.set.rows.size()
                  << " rows (positives " << ta.positives_found << ", negatives "
                  << ta.negatives_found << ")\n";
    ta.set.save_csv(out_dir + "/training_set.csv");
    ForestParams fp;
    fp.seed = derive_seed(cfg.seed, 0xf07e);
    RandomForest forest_t, forest_st;
    TrainingSet tset = truncate_to_term_temporal(ta.set);
    forest_t.train(tset, fp);
    forest_st.train(ta.set, fp);
    forest_t.save(out_dir + "/forest_t.bin");
    forest_st.save(out_dir + "/forest_st.bin");
    std::cout << "rows " << ta.set.rows.size() << "\npositives_found " << ta.positives_found
              << "\nnegatives_found " << ta.negatives_found << "\nmodels " << out_dir
              << "/forest_t.bin " << out_dir << "/forest_st.bin\n";
}

void cmd_xval(const std::string& set_path, const std::string& scheme, std::size_t trees,
              std::uint64_t seed, const std::string& out_path) {
    TrainingSet set = TrainingSet::load_csv(set_path);
    ForestParams fp;
    fp.n_trees = trees;
    fp.seed = seed;
    CvScheme s = scheme == "kfold" ? CvScheme::kTenFold : CvScheme::kLeaveOneOut;
    ValidationMetrics m = cross_validate(set, s, fp);
    std::cout << "accuracy " << m.accuracy * 100.0 << "\nprecision+ " << m.precision_pos
              << "\nprecision- " << m.precision_neg << "\nrecall+ " << m.recall_pos
              << "\nrecall- " << m.recall_neg << "\n";
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw DataError("cannot write report: " + out_path);
        f << "scheme,accuracy,precision_pos,precision_neg,recall_pos,recall_neg\n";
        f.precision(6);
        f << scheme << ',' << m.accuracy * 100.0 << ',' << m.precision_pos << ','
          << m.precision_neg << ',' << m.recall_pos << ',' << m.recall_neg << '\n';
    }
}

void cmd_featquality(const std::string& set_path, const std::string& measure,
                     const std::string& out_path) {
    TrainingSet set = TrainingSet::load_csv(set_path);
    QualityMeasure qm = QualityMeasure::kIG;
    if (measure == "gr") qm = QualityMeasure::kGR;
    else if (measure == "su") qm = QualityMeasure::kSU;
    else if (measure != "ig") throw CLI::ValidationError("--measure must be ig, gr or su");
    auto report = feature_quality(set, qm);
    std::ofstream file;
    auto& os = out_or_file(file, out_path);
    os << "feature,score,defined\n";
    os.precision(6);
    for (const auto& q : report) os << q.name << ',' << q.score << ',' << q.defined << '\n';
}

void emit_trec(std::ostream& os, const std::string& qid, const RankedList& rl,
               const Corpus& corpus, const std::string& tag) {
    os.precision(8);
    for (std::size_t r = 0; r < rl.size(); ++r)
        os << qid << ' ' << corpus.pictures[rl[r].doc].id << ' ' << (r + 1) << ' '
           << rl[r].score << ' ' << tag << '\n';
}

void cmd_search(const std::string& corpus_path, const std::string& query_path,
                const std::string& model, std::size_t cutoff, const std::string& out_path) {
    if (model != "bm25") throw CLI::ValidationError("--model supports only bm25");
    Corpus c = parse_corpus(corpus_path);
    InvertedIndex idx;
    idx.build(c);
    auto queries = parse_queries(query_path);
    std::ofstream file;
    auto& os = out_or_file(file, out_path);
    for (const auto& q : queries)
        emit_trec(os, q.id, search(idx, q.terms, Bm25Params{}, cutoff), c, "bm25");
}

void cmd_expand(const std::string& corpus_path, const std::string& query_path,
                const std::string& mode_str, const ExpansionConfig& exp,
                const std::string& model_t, const std::string& model_st, std::size_t sims,
                std::uint64_t seed, std::uint32_t min_pics, const std::string& out_path) {
    auto mode = mode_from_name(mode_str);
    if (!mode) throw CLI::ValidationError("--mode must be kl, kl_t, kl_st or kl_zkyc");
    Corpus c = parse_corpus(corpus_path);
    InvertedIndex idx;
    idx.build(c);
    TileIndex tiles;
    tiles.build(c, min_pics);
    SpatialConfig scfg;
    scfg.n_sims = sims;
    scfg.seed = derive_seed(seed, 0x5a7a);
    SpatialFeatureExtractor spatial(c, tiles, scfg);
    TemporalFeatureExtractor temporal(c, idx);
    ZkycTable zkyc(c);

    RandomForest forest_t, forest_st;
    ExpansionServices sv;
    sv.corpus = &c;
    sv.index = &idx;
    sv.tiles = &tiles;
    sv.temporal = &temporal;
    sv.spatial = &spatial;
    if (*mode == ExpansionMode::kKlT || *mode == ExpansionMode::kKlSt) {
        if (model_t.empty())
            throw CLI::ValidationError("--model-t is required for learning modes");
        forest_t = RandomForest::load(model_t);
        sv.forest_t = &forest_t;
        if (*mode == ExpansionMode::kKlSt) {
            if (model_st.empty())
                throw CLI::ValidationError("--model-st is required for kl_st");
            forest_st = RandomForest::load(model_st);
            sv.forest_st = &forest_st;
        }
    }
    if (*mode == ExpansionMode::kKlZkyc) sv.zkyc = &zkyc;

    QueryExpander expander(sv, exp);
    auto queries = parse_queries(query_path);
    std::ofstream file;
    auto& os = out_or_file(file, out_path);
    for (const auto& q : queries)
        emit_trec(os, q.id, expander.expand(q, *mode).final_ranking, c, mode_str);
}

struct RunFile {
    // qid -> ranked picture ids
    std::map<std::string, std::vector<std::string>> rankings;
};

RunFile parse_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read run file: " + path);
    RunFile rf;
    std::string qid, doc, tag;
    std::size_t rank = 0;
    double score = 0.0;
    while (in >> qid >> doc >> rank >> score >> tag) rf.rankings[qid].push_back(doc);
    return rf;
}

void cmd_evaluate(const std::string& run_path, const std::string& baseline_path,
                  const std::string& corpus_path, const std::string& truth_path,
                  const std::string& out_path) {
    Corpus c = parse_corpus(corpus_path);
    EventGroundTruth gt = parse_ground_truth(truth_path, c);
    RunFile run = parse_run(run_path);

    auto ap_of = [&](const std::vector<std::string>& ranked,
                     const std::string& qid) -> std::optional<double> {
        const auto* rel = gt.relevant_for(qid);
        if (!rel || rel->empty()) return std::nullopt;
        std::unordered_set<std::uint32_t> relset(rel->begin(), rel->end());
        RankedList rl;
        rl.reserve(ranked.size());
        for (const auto& id : ranked) {
            auto idx = c.find(id);
            if (!idx) throw DataError("run references unknown picture id: " + id);
            rl.push_back({*idx, 0.0});
        }
        return average_precision(rl, relset);
    };

    std::ofstream file;
    auto& os = out_or_file(file, out_path);
    os << "query,ap\n";
    os.precision(8);
    std::vector<double> aps;
    std::vector<std::string> qids;
    std::size_t skipped = 0;
    for (const auto& [qid, ranked] : run.rankings) {
        auto ap = ap_of(ranked, qid);
        if (!ap) {
            ++skipped;
            continue;
        }
        os << qid << ',' << *ap << '\n';
        aps.push_back(*ap);
        qids.push_back(qid);
    }
    if (aps.empty()) throw DataError("evaluate: no query had ground truth (all skipped)");
    std::cout << "queries " << aps.size() << "\nskipped " << skipped << "\nmap " << mean_ap(aps)
              << "\n";

    if (!baseline_path.empty()) {
        RunFile base = parse_run(baseline_path);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < qids.size(); ++i) {
            auto it = base.rankings.find(qids[i]);
            if (it == base.rankings.end()) continue;
            auto ap = ap_of(it->second, qids[i]);
            if (!ap) continue;
            a.push_back(aps[i]);
            b.push_back(*ap);
        }
        if (a.size() >= 2) {
            auto t = paired_t_test(a, b);
            std::cout << "baseline_map " << mean_ap(b) << "\nt " << t.t << "\np_one_tailed "
                      << t.p << "\n";
        }
    }
}

void cmd_synth(const std::string& config_path, std::optional<std::uint64_t> seed,
               const std::string& out_dir) {
    SynthConfig cfg = config_path.empty() ? SynthConfig{} : SynthConfig::from_file(config_path);
    if (seed) cfg.seed = *seed;
    fs::create_directories(out_dir);
    SynthOutput out = generate_synth(cfg, out_dir);
    std::cout << "corpus " << out.corpus_path << "\ntruth " << out.truth_path
              << "\ntrain_queries " << out.train_queries_path << "\neval_queries "
              << out.eval_queries_path << "\n";
}

void cmd_run(const std::string& config_path) {
    PipelineConfig cfg = PipelineConfig::from_file(config_path);
    PipelineResult res = run_pipeline(cfg);
    std::cout.precision(6);
    for (const auto& [name, ev] : res.by_mode)
        std::cout << "map " << name << ' ' << ev.map << '\n';
    for (const auto& [name, t] : res.tests)
        std::cout << "test " << name << " t=" << t.t << " p=" << t.p << '\n';
    std::cout << "manifest " << res.artifacts.at("manifest") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geo-temporal tag statistics and expansion-based event retrieval"};
    app.require_subcommand(1);

    std::string corpus, truth, queries, out, out_dir = "artifacts";
    std::string tag, tag2, tile = "auto", model = "bm25", mode = "kl";
    std::string set_path, scheme = "loo", measure = "ig", run_path, baseline, config_path;
    std::string model_t, model_st;
    std::size_t cutoff = kDefaultCutoff, sims = 99, trees = 100;
    std::size_t cands_per_query = 40, target = 1000;
    std::uint64_t seed = 1;
    std::uint32_t min_pics = 1000;
    std::optional<std::uint64_t> synth_seed;
    ExpansionConfig exp;

    auto add_corpus = [&](CLI::App* c) {
        c->add_option("--corpus", corpus, "picture record file (jsonl)")->required();
    };
    auto add_expansion = [&](CLI::App* c) {
        c->add_option("--fbdocs", exp.fb_docs, "feedback documents k");
        c->add_option("--fbterms", exp.fb_terms, "expansion terms n");
        c->add_option("--alpha", exp.alpha, "KL/confidence blend");
        c->add_option("--beta", exp.beta, "Rocchio beta");
        c->add_option("--theta", exp.theta, "good/bad AP_diff threshold");
        c->add_option("--cutoff", exp.cutoff, "ranking cutoff");
    };

    auto* ingest = app.add_subcommand("ingest", "parse and validate a corpus file");
    add_corpus(ingest);

    auto* index = app.add_subcommand("index", "build the tag inverted index");
    add_corpus(index);

    auto* tiles = app.add_subcommand("tiles", "build the world tile index");
    add_corpus(tiles);
    tiles->add_option("--min-tile-pictures", min_pics, "significance threshold");
    tiles->add_option("--out", out, "sidecar file to write");

    auto* kfn = app.add_subcommand("kfn", "dump a K/L/D profile as CSV");
    add_corpus(kfn);
    kfn->add_option("--tag", tag, "tag (self profile)")->required();
    kfn->add_option("--tag2", tag2, "second tag (cross profile)");
    kfn->add_option("--tile", tile, "tile id or 'auto'");
    kfn->add_option("--sims", sims, "null-model simulations");
    kfn->add_option("--seed", seed, "simulation seed");
    kfn->add_option("--out", out, "CSV path (default stdout)");

    auto* features = app.add_subcommand("features", "emit X/Y/Z feature rows per candidate");
    add_corpus(features);
    features->add_option("--query-file", queries, "query jsonl")->required();
    add_expansion(features);
    features->add_option("--sims", sims, "null-model simulations");
    features->add_option("--seed", seed, "seed");
    features->add_option("--min-tile-pictures", min_pics, "tile significance threshold");
    features->add_option("--out", out, "CSV path (default stdout)");

    auto* train = app.add_subcommand("train", "assemble a training set and fit the forests");
    add_corpus(train);
    train->add_option("--truth", truth, "ground truth jsonl")->required();
    train->add_option("--query-file", queries, "training queries jsonl")->required();
    add_expansion(train);
    train->add_option("--sims", sims, "null-model simulations");
    train->add_option("--seed", seed, "seed");
    train->add_option("--min-tile-pictures", min_pics, "tile significance threshold");
    train->add_option("--cands-per-query", cands_per_query, "labeled candidates per query");
    train->add_option("--target", target, "balanced training set size");
    train->add_option("--out-dir", out_dir, "artifact directory");

    auto* xval = app.add_subcommand("xval", "cross-validate a forest on a training set CSV");
    xval->add_option("--training-set", set_path, "CSV from train/features")->required();
    xval->add_option("--scheme", scheme, "loo or kfold");
    xval->add_option("--trees", trees, "forest size");
    xval->add_option("--seed", seed, "forest seed");
    xval->add_option("--out", out, "metrics CSV");

    auto* fq = app.add_subcommand("featquality", "rank features by IG, GR or SU");
    fq->add_option("--training-set", set_path, "CSV from train")->required();
    fq->add_option("--measure", measure, "ig, gr or su");
    fq->add_option("--out", out, "CSV path (default stdout)");

    auto* searchc = app.add_subcommand("search", "BM25 retrieval runs");
    add_corpus(searchc);
    searchc->add_option("--query-file", queries, "query jsonl")->required();
    searchc->add_option("--model", model, "ranking model (bm25)");
    searchc->add_option("--cutoff", cutoff, "ranking cutoff");
    searchc->add_option("--out", out, "run file (default stdout)");

    auto* expand = app.add_subcommand("expand", "query-expansion retrieval runs");
    add_corpus(expand);
    expand->add_option("--query-file", queries, "query jsonl")->required();
    expand->add_option("--mode", mode, "kl, kl_t, kl_st or kl_zkyc");
    add_expansion(expand);
    expand->add_option("--model-t", model_t, "temporal classifier file");
    expand->add_option("--model-st", model_st, "spatio-temporal classifier file");
    expand->add_option("--sims", sims, "null-model simulations");
    expand->add_option("--seed", seed, "seed");
    expand->add_option("--min-tile-pictures", min_pics, "tile significance threshold");
    expand->add_option("--out", out, "run file (default stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "AP/MAP report for a run file");
    evaluate->add_option("--run", run_path, "run file")->required();
    evaluate->add_option("--baseline-run", baseline, "baseline run for the paired t-test");
    add_corpus(evaluate);
    evaluate->add_option("--truth", truth, "ground truth jsonl")->required();
    evaluate->add_option("--out", out, "per-query AP CSV (default stdout)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark corpus");
    synth->add_option("--config", config_path, "flat key=value config");
    synth->add_option("--seed", synth_seed, "override config seed");
    synth->add_option("--out-dir", out_dir, "output directory")->required();

    auto* run = app.add_subcommand("run", "full pipeline from a run config");
    run->add_option("--config", config_path, "flat key=value run config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ingest->parsed()) cmd_ingest(corpus);
        else if (index->parsed()) cmd_index(corpus);
        else if (tiles->parsed()) cmd_tiles(corpus, min_pics, out);
        else if (kfn->parsed()) cmd_kfn(corpus, tag, tag2, tile, sims, seed, out);
        else if (features->parsed())
            cmd_features({corpus, "", queries}, exp, sims, seed, min_pics, out);
        else if (train->parsed())
            cmd_train({corpus, truth, queries}, exp, sims, seed, min_pics, cands_per_query,
                      target, out_dir);
        else if (xval->parsed()) cmd_xval(set_path, scheme, trees, seed, out);
        else if (fq->parsed()) cmd_featquality(set_path, measure, out);
        else if (searchc->parsed()) cmd_search(corpus, queries, model, cutoff, out);
        else if (expand->parsed())
            cmd_expand(corpus, queries, mode, exp, model_t, model_st, sims, seed, min_pics, out);
        else if (evaluate->parsed()) cmd_evaluate(run_path, baseline, corpus, truth, out);
        else if (synth->parsed()) cmd_synth(config_path, synth_seed, out_dir);
        else if (run->parsed()) cmd_run(config_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
