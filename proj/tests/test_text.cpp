#include <catch2/catch_amalgamated.hpp>

#include "geostat/common.hpp"
#include "geostat/text.hpp"

using namespace geostat;

TEST_CASE("tokenize splits on whitespace and punctuation, keeps digits") {
    CHECK(tokenize("the Running-dogs") == std::vector<std::string>{"the", "running", "dogs"});
    CHECK(tokenize("London2012") == std::vector<std::string>{"london2012"});
    CHECK(tokenize("  a,b;;c..d  ") == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("!!!").empty());
}

TEST_CASE("porter stemmer matches the published reference pairs") {
    const std::pair<const char*, const char*> pairs[] = {
        {"caresses", "caress"}, {"ponies", "poni"},     {"ties", "ti"},
        {"caress", "caress"},   {"cats", "cat"},        {"feed", "feed"},
        {"agreed", "agre"},     {"plastered", "plaster"}, {"bled", "bled"},
        {"motoring", "motor"},  {"sing", "sing"},       {"conflated", "conflat"},
        {"troubled", "troubl"}, {"sized", "size"},      {"hopping", "hop"},
        {"tanned", "tan"},      {"falling", "fall"},    {"hissing", "hiss"},
        {"fizzed", "fizz"},     {"failing", "fail"},    {"filing", "file"},
        {"happy", "happi"},     {"sky", "sky"},         {"relational", "relat"},
        {"conditional", "condit"}, {"rational", "ration"}, {"valenci", "valenc"},
        {"hesitanci", "hesit"}, {"digitizer", "digit"}, {"conformabli", "conform"},
        {"radicalli", "radic"}, {"differentli", "differ"}, {"vileli", "vile"},
        {"analogousli", "analog"}, {"vietnamization", "vietnam"}, {"predication", "predic"},
        {"operator", "oper"},   {"feudalism", "feudal"}, {"decisiveness", "decis"},
        {"hopefulness", "hope"}, {"callousness", "callous"}, {"formaliti", "formal"},
        {"sensitiviti", "sensit"}, {"sensibiliti", "sensibl"}, {"triplicate", "triplic"},
        {"formative", "form"},  {"formalize", "formal"}, {"electriciti", "electr"},
        {"electrical", "electr"}, {"hopeful", "hope"},  {"goodness", "good"},
        {"revival", "reviv"},   {"allowance", "allow"}, {"inference", "infer"},
        {"airliner", "airlin"}, {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"},
        {"defensible", "defens"}, {"irritant", "irrit"}, {"replacement", "replac"},
        {"adjustment", "adjust"}, {"dependent", "depend"}, {"adoption", "adopt"},
        {"communism", "commun"}, {"activate", "activ"}, {"angulariti", "angular"},
        {"homologous", "homolog"}, {"effective", "effect"}, {"bowdlerize", "bowdler"},
        {"probate", "probat"},  {"rate", "rate"},       {"cease", "ceas"},
        {"controll", "control"}, {"roll", "roll"},
    };
    for (auto [in, want] : pairs) {
        INFO(in);
        CHECK(porter_stem_once(in) == want);
    }
}

TEST_CASE("preprocess examples") {
    CHECK(preprocess("").empty());
    CHECK(preprocess("the Running-dogs") == std::vector<std::string>{"run", "dog"});
    CHECK(preprocess("London2012") == std::vector<std::string>{"london2012"});
}

TEST_CASE("stopwords are removed, including stems that land on stopwords") {
    CHECK(preprocess("the of and").empty());
    CHECK(is_stopword("the"));
    CHECK(is_stopword("zero"));
    CHECK_FALSE(is_stopword("concert"));
    // "wanted" stems to the stopword "want"; the final filter drops it.
    CHECK(preprocess("wanted").empty());
}

namespace {

std::string join(const std::vector<std::string>& toks) {
    std::string s;
    for (const auto& t : toks) {
        if (!s.empty()) s += ' ';
        s += t;
    }
    return s;
}

std::string random_token(std::mt19937_64& rng) {
    static const char* kAlpha = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::size_t len = 1 + uniform_index(rng, 12);
    std::string t;
    for (std::size_t i = 0; i < len; ++i) t += kAlpha[uniform_index(rng, 36)];
    return t;
}

}  // namespace

TEST_CASE("preprocess is idempotent on arbitrary token soup") {
    // English-like suffixes deliberately included to stress the stemmer's
    // fixed-point behavior (single-pass Porter is not idempotent).
    const std::vector<std::string> vocab = {
        "agreed",  "running",   "festivals", "concerts",  "generalization",
        "happily", "skies",     "london2012", "wanted",   "abeed",
        "oscillators", "rationalization", "singing",      "dogs",     "hopping",
    };
    auto rng = make_rng(20260809);
    for (int iter = 0; iter < 500; ++iter) {
        std::string raw;
        std::size_t words = 1 + uniform_index(rng, 4);
        for (std::size_t w = 0; w < words; ++w) {
            if (!raw.empty()) raw += ' ';
            raw += uniform01(rng) < 0.5 ? vocab[uniform_index(rng, vocab.size())]
                                        : random_token(rng);
        }
        auto once = preprocess(raw);
        auto twice = preprocess(join(once));
        INFO(raw);
        CHECK(once == twice);
    }
}

TEST_CASE("porter_stem is a fixed point of porter_stem_once") {
    auto rng = make_rng(7);
    for (int iter = 0; iter < 1000; ++iter) {
        std::string t = random_token(rng);
        std::string s = porter_stem(t);
        CHECK(porter_stem_once(s) == s);
    }
}
