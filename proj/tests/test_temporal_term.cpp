#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "geostat/temporal_term_features.hpp"
#include "helpers.hpp"

using namespace geostat;
using Catch::Matchers::WithinAbs;
using testutil::pic;

namespace {

TimeSeries series_of(std::vector<double> counts) {
    TimeSeries ts;
    ts.counts = std::move(counts);
    ts.empty = ts.counts.empty();
    for (double c : ts.counts)
        if (c != 0.0) ts.empty = false;
    return ts;
}

constexpr std::int64_t kDay = 86400;

}  // namespace

TEST_CASE("time series binning") {
    SECTION("no timestamped matches gives the empty marker") {
        Corpus c = testutil::corpus_of({pic("a", {"x"})});
        auto ts = build_time_series(c, [](const Picture&) { return true; });
        CHECK(ts.empty);
        CHECK(ts.counts.empty());
    }
    SECTION("three pictures in the same week land in one bin") {
        Corpus c = testutil::corpus_of({
            pic("a", {"x"}, std::nullopt, 0),
            pic("b", {"x"}, std::nullopt, 2 * kDay),
            pic("c", {"x"}, std::nullopt, 6 * kDay),
            pic("d", {"y"}, std::nullopt, 20 * kDay),  // fixes the span
        });
        auto ts = build_time_series(c, [](const Picture& p) { return p.has_tag("x"); });
        REQUIRE(ts.counts.size() == 3);
        CHECK(ts.counts[0] == 3.0);
        CHECK(ts.counts[1] == 0.0);
        CHECK(ts.counts[2] == 0.0);
    }
    SECTION("joint predicate counts only pictures tagged with both") {
        Corpus c = testutil::corpus_of({
            pic("a", {"e", "q"}, std::nullopt, 0),
            pic("b", {"e"}, std::nullopt, 0),
            pic("c", {"q"}, std::nullopt, 0),
        });
        auto ts = build_time_series(
            c, [](const Picture& p) { return p.has_tag("e") && p.has_tag("q"); });
        CHECK(ts.total() == 1.0);
    }
}

TEST_CASE("kurtosis worked examples") {
    auto k1 = kurtosis(series_of({0, 0, 10, 0, 0}));
    REQUIRE(k1.has_value());
    CHECK_THAT(*k1, WithinAbs(3.25, 1e-12));

    auto k2 = kurtosis(series_of({0, 1, 0}));
    REQUIRE(k2.has_value());
    CHECK_THAT(*k2, WithinAbs(1.5, 1e-12));

    CHECK_FALSE(kurtosis(series_of({2, 2, 2, 2})).has_value());
}

TEST_CASE("autocorrelation worked examples") {
    auto a1 = autocorrelation(series_of({1, -1, 1, -1}));
    REQUIRE(a1.has_value());
    CHECK_THAT(*a1, WithinAbs(-0.75, 1e-12));

    auto a2 = autocorrelation(series_of({1, 2, 3, 4}));
    REQUIRE(a2.has_value());
    CHECK_THAT(*a2, WithinAbs(0.25, 1e-12));

    CHECK_FALSE(autocorrelation(series_of({3, 3, 3})).has_value());
}

TEST_CASE("kurtosis and autocorrelation invariances") {
    auto rng = make_rng(42);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> base(12);
        for (auto& v : base) v = std::floor(uniform01(rng) * 10.0);
        auto shifted = base;
        for (auto& v : shifted) v += 7.0;
        auto scaled = base;
        for (auto& v : scaled) v *= 3.0;
        auto kb = kurtosis(series_of(base));
        if (!kb) continue;
        CHECK_THAT(*kurtosis(series_of(shifted)), WithinAbs(*kb, 1e-9));
        CHECK_THAT(*kurtosis(series_of(scaled)), WithinAbs(*kb, 1e-9));
        auto ab = autocorrelation(series_of(base));
        REQUIRE(ab.has_value());
        CHECK_THAT(*autocorrelation(series_of(shifted)), WithinAbs(*ab, 1e-9));
    }
}

TEST_CASE("cross correlation") {
    SECTION("identical series correlate perfectly at lag zero") {
        auto a = series_of({0, 1, 4, 1, 0, 2, 3, 1});
        auto r = cross_correlation_max(a, a, 4);
        REQUIRE(r.has_value());
        CHECK_THAT(*r, WithinAbs(1.0, 1e-12));
    }
    SECTION("a shifted impulse aligns within the lag window") {
        std::vector<double> a(20, 0.0), b(20, 0.0);
        a[6] = 1.0;
        b[8] = 1.0;
        auto r = cross_correlation_max(series_of(a), series_of(b), 4);
        REQUIRE(r.has_value());
        CHECK_THAT(*r, WithinAbs(1.0, 1e-12));
        auto tight = cross_correlation_max(series_of(a), series_of(b), 1);
        REQUIRE(tight.has_value());
        CHECK(*tight < 1.0);
    }
    SECTION("independent noise stays small") {
        int small = 0;
        const int runs = 20;
        for (int s = 0; s < runs; ++s) {
            auto rng = make_rng(derive_seed(600, static_cast<std::uint64_t>(s)));
            std::vector<double> a(200), b(200);
            for (auto& v : a) v = std::floor(uniform01(rng) * 8.0);
            for (auto& v : b) v = std::floor(uniform01(rng) * 8.0);
            auto r = cross_correlation_max(series_of(a), series_of(b), 4);
            REQUIRE(r.has_value());
            small += (*r < 0.3);
        }
        CHECK(small >= runs * 9 / 10);
    }
    SECTION("bounded and symmetric") {
        auto rng = make_rng(601);
        for (int iter = 0; iter < 50; ++iter) {
            std::vector<double> a(30), b(30);
            for (auto& v : a) v = std::floor(uniform01(rng) * 5.0);
            for (auto& v : b) v = std::floor(uniform01(rng) * 5.0);
            auto r1 = cross_correlation_max(series_of(a), series_of(b), 4);
            auto r2 = cross_correlation_max(series_of(b), series_of(a), 4);
            if (!r1) continue;
            CHECK(*r1 >= -1.0 - 1e-12);
            CHECK(*r1 <= 1.0 + 1e-12);
            REQUIRE(r2.has_value());
            CHECK_THAT(*r1, WithinAbs(*r2, 1e-12));
        }
    }
    SECTION("degenerate series are undefined") {
        CHECK_FALSE(cross_correlation_max(series_of({1, 1, 1}), series_of({1, 2, 3})).has_value());
    }
}

namespace {

Corpus df_corpus() {
    // 100 pictures; "e" on 10 of them; query terms "q" and "r" arranged for
    // co-occurrence checks.
    std::vector<Picture> pics;
    for (int i = 0; i < 100; ++i) {
        std::vector<std::string> tags = {"filler" + std::to_string(i)};
        if (i < 10) tags.push_back("e");
        if (i < 4) tags.push_back("q");          // C(q, e) = 4
        if (i >= 2 && i < 6) tags.push_back("r");  // C(r, e) = 4, C(q, r, e) = 2
        pics.push_back(pic("p" + std::to_string(i), tags));
    }
    return testutil::corpus_of(std::move(pics));
}

}  // namespace

TEST_CASE("document-frequency features match the log oracle") {
    Corpus c = df_corpus();
    InvertedIndex idx;
    idx.build(c);
    std::vector<std::uint32_t> feedback;
    for (std::uint32_t i = 0; i < 20; ++i) feedback.push_back(i);
    auto f = term_features("e", {"q", "r"}, feedback, c, idx);

    CHECK(f.whole.defined);
    CHECK_THAT(f.whole.df0, WithinAbs(10.0, 1e-15));
    CHECK_THAT(f.whole.df1, WithinAbs(std::log(10.0), 1e-12));
    CHECK_THAT(f.whole.df2, WithinAbs(std::log(11.0), 1e-12));
    CHECK_THAT(f.whole.df3, WithinAbs(std::log(9.0), 1e-12));

    // Feedback scope: first 20 docs hold every "e".
    CHECK_THAT(f.feedback.df0, WithinAbs(10.0, 1e-15));
    CHECK_THAT(f.feedback.df1, WithinAbs(std::log(2.0), 1e-12));

    // Co-occurrence: (C(q,e) + C(r,e)) / n = (4 + 4) / 2 = 4.
    CHECK_THAT(f.whole.cooc_single, WithinAbs(std::log1p(4.0), 1e-12));
    // Pairs: C(q,r,e) / n = 2 / 2 = 1.
    CHECK_THAT(f.whole.cooc_pair, WithinAbs(std::log1p(1.0), 1e-12));
}

TEST_CASE("document-frequency guards") {
    Corpus c = df_corpus();
    InvertedIndex idx;
    idx.build(c);
    std::vector<std::uint32_t> feedback = {50, 51};  // no "e" here

    SECTION("df0 = 0 zeroes the scope and flags it") {
        auto f = term_features("e", {"q"}, feedback, c, idx);
        CHECK_FALSE(f.feedback.defined);
        CHECK(f.feedback.df1 == 0.0);
        CHECK(f.feedback.df3 == 0.0);
    }
    SECTION("df0 = N floors DF3 at log(epsilon)") {
        Corpus tiny = testutil::corpus_of({pic("a", {"e"}), pic("b", {"e"})});
        InvertedIndex ti;
        ti.build(tiny);
        std::vector<std::uint32_t> fb = {0, 1};
        auto f = term_features("e", {"q"}, fb, tiny, ti);
        CHECK_THAT(f.whole.df3, WithinAbs(std::log(1e-9), 1e-9));
    }
    SECTION("no co-occurrence gives log1p(0) = 0") {
        auto f = term_features("filler50", {"q"}, feedback, c, idx);
        CHECK(f.whole.cooc_single == 0.0);
        CHECK(f.whole.cooc_pair == 0.0);
    }
}

TEST_CASE("DF2 exceeds DF1 whenever defined") {
    Corpus c = df_corpus();
    InvertedIndex idx;
    idx.build(c);
    std::vector<std::uint32_t> feedback;
    for (std::uint32_t i = 0; i < 30; ++i) feedback.push_back(i);
    for (const char* term : {"e", "q", "r", "filler7"}) {
        auto f = term_features(term, {"q"}, feedback, c, idx);
        if (f.whole.defined) CHECK(f.whole.df2 > f.whole.df1);
        if (f.feedback.defined) CHECK(f.feedback.df2 > f.feedback.df1);
    }
}

TEST_CASE("temporal extractor wires the five statistics") {
    std::vector<Picture> pics;
    // A burst of "e q" pictures in week 0 plus scattered "e" and background.
    for (int i = 0; i < 6; ++i)
        pics.push_back(pic("b" + std::to_string(i), {"e", "q"}, std::nullopt, i * kDay));
    for (int i = 0; i < 4; ++i)
        pics.push_back(
            pic("s" + std::to_string(i), {"e"}, std::nullopt, (30 + 7 * i) * kDay));
    pics.push_back(pic("z", {"zz"}, std::nullopt, 90 * kDay));
    Corpus c = testutil::corpus_of(std::move(pics));
    InvertedIndex idx;
    idx.build(c);
    TemporalFeatureExtractor ext(c, idx);
    TimeSeries qts = ext.query_series({"q"});
    auto v = ext.extract("e", {"q"}, qts);
    CHECK(v.kurt_e.has_value());
    CHECK(v.kurt_eq.has_value());
    CHECK(v.ac_e.has_value());
    CHECK(v.cc.has_value());
    // e's series is dominated by the burst that q shares, so the correlation
    // is high but below 1 (the scattered "e" pictures dilute it).
    CHECK(*v.cc > 0.8);
    CHECK(*v.cc < 1.0);
}
