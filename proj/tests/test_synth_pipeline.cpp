#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "geostat/pipeline.hpp"
#include "geostat/synth.hpp"
#include "helpers.hpp"

using namespace geostat;
using testutil::TempDir;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.cities = 4;
    cfg.events = 24;
    cfg.event_pics_min = 40;
    cfg.event_pics_max = 60;
    cfg.background_pics = 1200;
    cfg.noise_vocab = 150;
    cfg.odd_bg_copies = 25;
    cfg.train_queries = 16;
    cfg.eval_queries = 8;
    return cfg;
}

}  // namespace

TEST_CASE("generation is bit-identical for a fixed seed") {
    TempDir d1, d2;
    SynthConfig cfg = small_config();
    auto o1 = generate_synth(cfg, d1.path());
    auto o2 = generate_synth(cfg, d2.path());
    CHECK(slurp(o1.corpus_path) == slurp(o2.corpus_path));
    CHECK(slurp(o1.truth_path) == slurp(o2.truth_path));
    CHECK(slurp(o1.train_queries_path) == slurp(o2.train_queries_path));
    CHECK(slurp(o1.eval_queries_path) == slurp(o2.eval_queries_path));

    TempDir d3;
    cfg.seed = 12;
    auto o3 = generate_synth(cfg, d3.path());
    CHECK(slurp(o1.corpus_path) != slurp(o3.corpus_path));
}

TEST_CASE("generated corpus parses cleanly and matches the ground truth") {
    TempDir dir;
    SynthConfig cfg = small_config();
    auto out = generate_synth(cfg, dir.path());
    Corpus c = parse_corpus(out.corpus_path);
    CHECK(c.skipped == 0);
    CHECK(c.size() >= cfg.events * cfg.event_pics_min);
    EventGroundTruth gt = parse_ground_truth(out.truth_path, c);
    CHECK(gt.events.size() == cfg.events);
    CHECK(gt.total_pictures() <= c.size());
    auto train = parse_queries(out.train_queries_path);
    auto eval = parse_queries(out.eval_queries_path);
    CHECK(train.size() == cfg.train_queries);
    CHECK(eval.size() == cfg.eval_queries);
    // The split protocol: no training query id appears in the eval set.
    for (const auto& tq : train)
        for (const auto& eq : eval) CHECK(tq.id != eq.id);
}

TEST_CASE("event tags attract their good co-tags in nearly every seeded corpus") {
    int attracted = 0;
    const int runs = 20;
    for (int seed = 0; seed < runs; ++seed) {
        TempDir dir;
        SynthConfig cfg;
        cfg.seed = 500 + static_cast<std::uint64_t>(seed);
        cfg.cities = 2;
        cfg.events = 4;
        cfg.event_pics_min = 60;
        cfg.event_pics_max = 80;
        cfg.background_pics = 400;
        cfg.noise_vocab = 60;
        cfg.train_queries = 0;
        cfg.eval_queries = 0;
        auto out = generate_synth(cfg, dir.path());
        Corpus c = parse_corpus(out.corpus_path);
        TileIndex tiles;
        tiles.build(c);
        SpatialConfig scfg;
        scfg.n_sims = 99;
        scfg.seed = 77;
        SpatialFeatureExtractor ext(c, tiles, scfg);
        const auto* plist = tiles.postings("ev0");
        REQUIRE(plist != nullptr);
        REQUIRE(!plist->empty());
        std::int32_t tile = plist->front().tile;
        TagPointPattern a = ext.pattern_for_tag(tile, "ev0");
        TagPointPattern b = ext.pattern_for_tag(tile, "good0x0");
        auto prof = profile_cross(a, b, scfg.grid, scfg.n_sims, 33);
        REQUIRE(prof.has_value());
        attracted += classify_interaction(*prof).overall == Interaction::kAttraction;
    }
    CHECK(attracted >= runs * 9 / 10);
}

TEST_CASE("zero events produce a pure-noise corpus and the pipeline signals it") {
    TempDir dir;
    SynthConfig cfg = small_config();
    cfg.events = 0;
    cfg.train_queries = 0;
    cfg.eval_queries = 0;
    auto out = generate_synth(cfg, dir.path());
    Corpus c = parse_corpus(out.corpus_path);
    CHECK(c.size() == cfg.background_pics);
    EventGroundTruth gt = parse_ground_truth(out.truth_path, c);
    CHECK(gt.events.empty());

    PipelineConfig pcfg;
    pcfg.corpus_path = out.corpus_path;
    pcfg.truth_path = out.truth_path;
    pcfg.eval_queries_path = out.eval_queries_path;
    pcfg.out_dir = dir.path() + "/run";
    CHECK_THROWS_AS(run_pipeline(pcfg), DataError);
}

TEST_CASE("run config files parse") {
    testutil::TempFile f(
        "corpus = /tmp/c.jsonl\n"
        "# a comment\n"
        "fb_docs = 20\n"
        "fb_terms = 15\n"
        "alpha = 0.25\n"
        "modes = kl,kl_st\n",
        ".cfg");
    PipelineConfig cfg = PipelineConfig::from_file(f.path());
    CHECK(cfg.corpus_path == "/tmp/c.jsonl");
    CHECK(cfg.expansion.fb_docs == 20);
    CHECK(cfg.expansion.fb_terms == 15);
    CHECK(cfg.expansion.alpha == 0.25);
    REQUIRE(cfg.modes.size() == 2);
    CHECK(cfg.modes[1] == ExpansionMode::kKlSt);
    testutil::TempFile bad("nonsense = 1\n", ".cfg");
    CHECK_THROWS_AS(PipelineConfig::from_file(bad.path()), DataError);
}

TEST_CASE("synth config files parse and reject unknown keys") {
    testutil::TempFile f("seed = 9\nevents = 5\ncluster_radius_km = 0.5\n", ".cfg");
    SynthConfig cfg = SynthConfig::from_file(f.path());
    CHECK(cfg.seed == 9);
    CHECK(cfg.events == 5);
    CHECK(cfg.cluster_radius_km == 0.5);
    testutil::TempFile bad("wat = 1\n", ".cfg");
    CHECK_THROWS_AS(SynthConfig::from_file(bad.path()), DataError);
}

TEST_CASE("pipeline runs end to end on a small corpus and is reproducible") {
    TempDir data, run1, run2;
    SynthConfig cfg = small_config();
    auto out = generate_synth(cfg, data.path());

    PipelineConfig pcfg;
    pcfg.corpus_path = out.corpus_path;
    pcfg.truth_path = out.truth_path;
    pcfg.train_queries_path = out.train_queries_path;
    pcfg.eval_queries_path = out.eval_queries_path;
    pcfg.expansion.fb_docs = 20;
    pcfg.expansion.fb_terms = 10;
    pcfg.n_sims = 19;
    pcfg.train_candidates_per_query = 12;
    pcfg.training_set_target = 120;
    pcfg.seed = 3;

    pcfg.out_dir = run1.path();
    PipelineResult r1 = run_pipeline(pcfg);
    REQUIRE(r1.by_mode.count("bm25"));
    REQUIRE(r1.by_mode.count("kl"));
    REQUIRE(r1.by_mode.count("kl_st"));
    CHECK(r1.eval_query_ids.size() == cfg.eval_queries);
    for (const auto& [name, ev] : r1.by_mode) {
        CHECK(ev.map >= 0.0);
        CHECK(ev.map <= 1.0);
        CHECK(ev.ap.size() == r1.eval_query_ids.size());
    }
    CHECK(std::ifstream(r1.artifacts.at("manifest")).good());
    CHECK(std::ifstream(r1.artifacts.at("training_set")).good());
    CHECK(std::ifstream(r1.artifacts.at("run_kl_st")).good());

    pcfg.out_dir = run2.path();
    pcfg.grid_fb_docs = {10, 20};
    pcfg.grid_fb_terms = {5, 10};
    PipelineResult r2 = run_pipeline(pcfg);
    for (const auto& [name, ev] : r1.by_mode) {
        REQUIRE(r2.by_mode.count(name));
        CHECK(ev.map == r2.by_mode.at(name).map);
    }
    {
        std::ifstream grid(r2.artifacts.at("grid_report"));
        REQUIRE(grid.good());
        std::string line;
        std::getline(grid, line);
        CHECK(line == "fb_docs,fb_terms,bm25,kl,kl_t,kl_st");
        std::size_t rows = 0;
        while (std::getline(grid, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 4);  // 2 x 2 sweep
    }

    // Run files differ only where term selection differs; the bm25 baseline
    // is byte-identical across runs.
    CHECK(slurp(r1.artifacts.at("run_bm25")) == slurp(r2.artifacts.at("run_bm25")));
    CHECK(slurp(r1.artifacts.at("run_kl_st")) == slurp(r2.artifacts.at("run_kl_st")));
}
