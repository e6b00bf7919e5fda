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

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace geostat {

/// Splits on whitespace/punctuation and lowercases ASCII. Digits are word
/// characters (tags like "sxsw2008" stay whole); bytes >= 0x80 are kept so
/// UTF-8 sequences pass through untouched.
inline std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : raw) {
        bool word = std::isalnum(c) != 0 || c >= 0x80;
        if (word) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

namespace detail {

// The SMART English stopword list.
inline const std::unordered_set<std::string>& smart_stopwords() {
    static const std::unordered_set<std::string> kSet = [] {
        static constexpr const char* kWords[] = {
            "a", "a's", "able", "about", "above", "according", "accordingly", "across",
            "actually", "after", "afterwards", "again", "against", "ain't", "all", "allow",
            "allows", "almost", "alone", "along", "already", "also", "although", "always",
            "am", "among", "amongst", "an", "and", "another", "any", "anybody", "anyhow",
            "anyone", "anything", "anyway", "anyways", "anywhere", "apart", "appear",
            "appreciate", "appropriate", "are", "aren't", "around", "as", "aside", "ask",
            "asking", "associated", "at", "available", "away", "awfully", "b", "be",
            "became", "because", "become", "becomes", "becoming", "been", "before",
            "beforehand", "behind", "being", "believe", "below", "beside", "besides",
            "best", "better", "between", "beyond", "both", "brief", "but", "by", "c",
            "c'mon", "c's", "came", "can", "can't", "cannot", "cant", "cause", "causes",
            "certain", "certainly", "changes", "clearly", "co", "com", "come", "comes",
            "concerning", "consequently", "consider", "considering", "contain",
            "containing", "contains", "corresponding", "could", "couldn't", "course",
            "currently", "d", "definitely", "described", "despite", "did", "didn't",
            "different", "do", "does", "doesn't", "doing", "don't", "done", "down",
            "downwards", "during", "e", "each", "edu", "eg", "eight", "either", "else",
            "elsewhere", "enough", "entirely", "especially", "et", "etc", "even", "ever",
            "every", "everybody", "everyone", "everything", "everywhere", "ex", "exactly",
            "example", "except", "f", "far", "few", "fifth", "first", "five", "followed",
            "following", "follows", "for", "former", "formerly", "forth", "four", "from",
            "further", "furthermore", "g", "get", "gets", "getting", "given", "gives",
            "go", "goes", "going", "gone", "got", "gotten", "greetings", "h", "had",
            "hadn't", "happens", "hardly", "has", "hasn't", "have", "haven't", "having",
            "he", "he's", "hello", "help", "hence", "her", "here", "here's", "hereafter",
            "hereby", "herein", "hereupon", "hers", "herself", "hi", "him", "himself",
            "his", "hither", "hopefully", "how", "howbeit", "however", "i'd", "i'll",
            "i'm", "i've", "ie", "if", "ignored", "immediate", "in", "inasmuch", "inc",
            "indeed", "indicate", "indicated", "indicates", "inner", "insofar", "instead",
            "into", "inward", "is", "isn't", "it", "it'd", "it'll", "it's", "its",
            "itself", "j", "just", "k", "keep", "keeps", "kept", "know", "known", "knows",
            "l", "last", "lately", "later", "latter", "latterly", "least", "less", "lest",
            "let", "let's", "like", "liked", "likely", "little", "look", "looking",
            "looks", "ltd", "m", "mainly", "many", "may", "maybe", "me", "mean",
            "meanwhile", "merely", "might", "more", "moreover", "most", "mostly", "much",
            "must", "my", "myself", "n", "name", "namely", "nd", "near", "nearly",
            "necessary", "need", "needs", "neither", "never", "nevertheless", "new",
            "next", "nine", "no", "nobody", "non", "none", "noone", "nor", "normally",
            "not", "nothing", "novel", "now", "nowhere", "o", "obviously", "of", "off",
            "often", "oh", "ok", "okay", "old", "on", "once", "one", "ones", "only",
            "onto", "or", "other", "others", "otherwise", "ought", "our", "ours",
            "ourselves", "out", "outside", "over", "overall", "own", "p", "particular",
            "particularly", "per", "perhaps", "placed", "please", "plus", "possible",
            "presumably", "probably", "provides", "q", "que", "quite", "qv", "r",
            "rather", "rd", "re", "really", "reasonably", "regarding", "regardless",
            "regards", "relatively", "respectively", "right", "s", "said", "same", "saw",
            "say", "saying", "says", "second", "secondly", "see", "seeing", "seem",
            "seemed", "seeming", "seems", "seen", "self", "selves", "sensible", "sent",
            "serious", "seriously", "seven", "several", "shall", "she", "should",
            "shouldn't", "since", "six", "so", "some", "somebody", "somehow", "someone",
            "something", "sometime", "sometimes", "somewhat", "somewhere", "soon",
            "sorry", "specified", "specify", "specifying", "still", "sub", "such", "sup",
            "sure", "t", "t's", "take", "taken", "tell", "tends", "th", "than", "thank",
            "thanks", "thanx", "that", "that's", "thats", "the", "their", "theirs",
            "them", "themselves", "then", "thence", "there", "there's", "thereafter",
            "thereby", "therefore", "therein", "theres", "thereupon", "these", "they",
            "they'd", "they'll", "they're", "they've", "think", "third", "this",
            "thorough", "thoroughly", "those", "though", "three", "through",
            "throughout", "thru", "thus", "to", "together", "too", "took", "toward",
            "towards", "tried", "tries", "truly", "try", "trying", "twice", "two", "u",
            "un", "under", "unfortunately", "unless", "unlikely", "until", "unto", "up",
            "upon", "us", "use", "used", "useful", "uses", "using", "usually", "uucp",
            "v", "value", "various", "very", "via", "viz", "vs", "w", "want", "wants",
            "was", "wasn't", "way", "we", "we'd", "we'll", "we're", "we've", "welcome",
            "well", "went", "were", "weren't", "what", "what's", "whatever", "when",
            "whence", "whenever", "where", "where's", "whereafter", "whereas", "whereby",
            "wherein", "whereupon", "wherever", "whether", "which", "while", "whither",
            "who", "who's", "whoever", "whole", "whom", "whose", "why", "will",
            "willing", "wish", "with", "within", "without", "won't", "wonder", "would",
            "wouldn't", "x", "y", "yes", "yet", "you", "you'd", "you'll", "you're",
            "you've", "your", "yours", "yourself", "yourselves", "z", "zero",
        };
        std::unordered_set<std::string> s;
        for (const char* w : kWords) s.emplace(w);
        return s;
    }();
    return kSet;
}

// Porter stemmer working state: word buffer plus the offset `j` set by
// suffix matching, as in the reference implementation.
struct PorterState {
    std::string w;
    int j = 0;

    bool cons(int i) const {
        char c = w[static_cast<std::size_t>(i)];
        switch (c) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Measure of w[0..upto]: the m in [C](VC)^m[V].
    int measure(int upto) const {
        int n = 0, i = 0;
        while (true) {
            if (i > upto) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > upto) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > upto) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem(int upto) const {
        for (int i = 0; i <= upto; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(int i) const {
        return i >= 1 && w[static_cast<std::size_t>(i)] == w[static_cast<std::size_t>(i - 1)] && cons(i);
    }

    // cvc at position i with the last consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char c = w[static_cast<std::size_t>(i)];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view suffix) {
        if (w.size() < suffix.size()) return false;
        if (w.compare(w.size() - suffix.size(), suffix.size(), suffix) != 0) return false;
        j = static_cast<int>(w.size() - suffix.size()) - 1;
        return true;
    }

    void set_to(std::string_view repl) {
        w.resize(static_cast<std::size_t>(j + 1));
        w.append(repl);
    }

    void chop() { w.pop_back(); }
    int last() const { return static_cast<int>(w.size()) - 1; }
};

}  // namespace detail

/// One pass of the Porter stemming algorithm (the original published rules).
/// Inputs are expected lowercase; words of length <= 2 are returned as-is.
inline std::string porter_stem_once(std::string word) {
    using detail::PorterState;
    if (word.size() <= 2) return word;
    PorterState s{std::move(word)};

    // Step 1a
    if (s.ends("sses")) {
        s.set_to("ss");
    } else if (s.ends("ies")) {
        s.set_to("i");
    } else if (s.ends("ss")) {
        // keep
    } else if (s.ends("s")) {
        s.set_to("");
    }

    // Step 1b
    if (s.ends("eed")) {
        if (s.measure(s.j) > 0) s.set_to("ee");
    } else {
        bool stripped = false;
        if (s.ends("ed") && s.vowel_in_stem(s.j)) {
            s.set_to("");
            stripped = true;
        } else if (s.ends("ing") && s.vowel_in_stem(s.j)) {
            s.set_to("");
            stripped = true;
        }
        if (stripped) {
            if (s.ends("at")) {
                s.set_to("ate");
            } else if (s.ends("bl")) {
                s.set_to("ble");
            } else if (s.ends("iz")) {
                s.set_to("ize");
            } else if (s.double_cons(s.last())) {
                char c = s.w.back();
                if (c != 'l' && c != 's' && c != 'z') s.chop();
            } else if (s.measure(s.last()) == 1 && s.cvc(s.last())) {
                s.w.push_back('e');
            }
        }
    }

    // Step 1c
    if (s.ends("y") && s.vowel_in_stem(s.j)) s.w.back() = 'i';

    // Step 2 (condition m > 0); longest suffix first within shared endings.
    {
        static constexpr std::pair<std::string_view, std::string_view> kStep2[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        };
        for (const auto& [suf, repl] : kStep2) {
            if (s.ends(suf)) {
                if (s.measure(s.j) > 0) s.set_to(repl);
                break;
            }
        }
    }

    // Step 3 (condition m > 0)
    {
        static constexpr std::pair<std::string_view, std::string_view> kStep3[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        };
        for (const auto& [suf, repl] : kStep3) {
            if (s.ends(suf)) {
                if (s.measure(s.j) > 0) s.set_to(repl);
                break;
            }
        }
    }

    // Step 4 (condition m > 1); "ion" additionally needs a preceding s or t.
    {
        static constexpr std::string_view kStep4[] = {
            "ance", "ence", "ement", "able", "ible", "ment", "ent", "ant", "ion",
            "ism", "ate", "iti", "ous", "ive", "ize", "ou", "al", "er", "ic",
        };
        for (std::string_view suf : kStep4) {
            if (s.ends(suf)) {
                if (suf == "ion" &&
                    !(s.j >= 0 && (s.w[static_cast<std::size_t>(s.j)] == 's' ||
                                   s.w[static_cast<std::size_t>(s.j)] == 't'))) {
                    break;
                }
                if (s.measure(s.j) > 1) s.set_to("");
                break;
            }
        }
    }

    // Step 5a
    if (!s.w.empty() && s.w.back() == 'e') {
        int m = s.measure(s.last() - 1);
        if (m > 1 || (m == 1 && !s.cvc(s.last() - 1))) s.chop();
    }

    // Step 5b
    if (s.double_cons(s.last()) && s.w.back() == 'l' && s.measure(s.last()) > 1) s.chop();

    return std::move(s.w);
}

/// Porter stem iterated to a fixed point, so re-stemming a stem is a no-op.
inline std::string porter_stem(std::string word) {
    for (int iter = 0; iter < 8; ++iter) {
        std::string next = porter_stem_once(word);
        if (next == word) return word;
        word = std::move(next);
    }
    return word;
}

inline bool is_stopword(const std::string& token) {
    return detail::smart_stopwords().count(token) != 0;
}

/// Full tag pipeline: tokenize/lowercase, stopword removal, stemming, and a
/// final stopword pass so no stem can reintroduce a stopword.
inline std::vector<std::string> preprocess(std::string_view raw) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(raw)) {
        if (is_stopword(tok)) continue;
        std::string stem = porter_stem(std::move(tok));
        if (stem.empty() || is_stopword(stem)) continue;
        out.push_back(std::move(stem));
    }
    return out;
}

}  // namespace geostat
