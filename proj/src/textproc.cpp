#include "eduqa/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eduqa {

namespace {

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_alnum_byte(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

char lower_byte(char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return c;
}

}  // namespace

std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        char l = lower_byte(c);
        if (is_alnum_byte(l)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(l);
        } else if (l == '-' || l == '/' || is_space_byte(l)) {
            pending_space = true;
        }
        // remaining punctuation and non-ascii bytes are dropped
    }
    return out;
}

TokenSeq tokenize(std::string_view text) {
    TokenSeq seq;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space_byte(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t start = i;
        while (i < text.size() && !is_space_byte(text[i])) ++i;
        seq.tokens.emplace_back(text.substr(start, i - start));
        seq.offsets.emplace_back(start, i);
    }
    return seq;
}

TokenSeq tokenize_raw(std::string_view text) {
    TokenSeq seq;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_alnum_byte(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t start = i;
        std::string tok;
        while (i < text.size() && is_alnum_byte(text[i])) {
            tok.push_back(lower_byte(text[i]));
            ++i;
        }
        seq.tokens.push_back(std::move(tok));
        seq.offsets.emplace_back(start, i);
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Porter stemmer, classic 1980 rule set. The implementation mirrors the
// original description: b[0..k] is the working word, j marks the stem end
// after a suffix match.
// ---------------------------------------------------------------------------
namespace {

class PorterStemmer {
public:
    std::string run(std::string word) {
        b_ = std::move(word);
        k_ = static_cast<int>(b_.size()) - 1;
        if (k_ <= 1) return b_;  // length 1-2 words pass through
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        b_.resize(static_cast<std::size_t>(k_ + 1));
        return b_;
    }

private:
    std::string b_;
    int k_ = 0;
    int j_ = 0;

    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // measure of b[0..j]: [C](VC)^m[V]
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int j) const {
        if (j < 1) return false;
        if (b_[static_cast<std::size_t>(j)] != b_[static_cast<std::size_t>(j - 1)]) return false;
        return cons(j);
    }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (b_.compare(static_cast<std::size_t>(k_ - len + 1), static_cast<std::size_t>(len),
                       s) != 0)
            return false;
        j_ = k_ - len;
        return true;
    }

    void setto(std::string_view s) {
        b_.resize(static_cast<std::size_t>(j_ + 1));
        b_.append(s);
        k_ = static_cast<int>(b_.size()) - 1;
    }

    void r(std::string_view s) {
        if (m() > 0) setto(s);
    }

    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses")) k_ -= 2;
            else if (ends("ies")) setto("i");
            else if (b_[static_cast<std::size_t>(k_ - 1)] != 's') --k_;
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) setto("ate");
            else if (ends("bl")) setto("ble");
            else if (ends("iz")) setto("ize");
            else if (doublec(k_)) {
                char ch = b_[static_cast<std::size_t>(k_)];
                if (ch != 'l' && ch != 's' && ch != 'z') --k_;
            } else {
                j_ = k_;
                if (m() == 1 && cvc(k_)) setto("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    struct Rule {
        std::string_view suffix;
        std::string_view repl;
    };

    // Longest suffix that matches decides the rule; if its condition fails
    // no other rule in the step applies.
    void apply_rules(const std::vector<Rule>& rules) {
        for (const auto& rule : rules) {
            if (ends(rule.suffix)) {
                r(rule.repl);
                return;
            }
        }
    }

    void step2() {
        static const std::vector<Rule> rules = {
            {"ational", "ate"}, {"ization", "ize"}, {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"biliti", "ble"},  {"tional", "tion"}, {"entli", "ent"},
            {"ousli", "ous"},   {"alism", "al"},    {"aliti", "al"},    {"iviti", "ive"},
            {"ation", "ate"},   {"enci", "ence"},   {"anci", "ance"},   {"izer", "ize"},
            {"abli", "able"},   {"alli", "al"},     {"ator", "ate"},    {"eli", "e"},
        };
        apply_rules(rules);
    }

    void step3() {
        static const std::vector<Rule> rules = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ness", ""},  {"ful", ""},
        };
        apply_rules(rules);
    }

    void step4() {
        static const std::vector<std::string_view> suffixes = {
            "ement", "able", "ible", "ance", "ence", "ment", "ant", "ent", "ion",
            "ism",   "ate",  "iti",  "ous",  "ive",  "ize",  "al",  "er",  "ic",  "ou",
        };
        for (std::string_view s : suffixes) {
            if (!ends(s)) continue;
            if (s == "ion") {
                if (j_ < 0) return;
                char ch = b_[static_cast<std::size_t>(j_)];
                if (ch != 's' && ch != 't') return;
            }
            if (m() > 1) k_ = j_;
            return;
        }
    }

    void step5() {
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[static_cast<std::size_t>(k_)] == 'l' && doublec(k_) && m() > 1) --k_;
    }
};

}  // namespace

std::string stem(std::string_view token) {
    std::string w;
    w.reserve(token.size());
    for (char c : token) {
        char l = lower_byte(c);
        if (l < 'a' || l > 'z') return std::string(token);  // digits etc. pass through
        w.push_back(l);
    }
    if (w.size() <= 2) return w;
    PorterStemmer stemmer;
    return stemmer.run(std::move(w));
}

std::vector<std::string> stem_tokens(std::string_view text) {
    TokenSeq seq = tokenize(normalize(text));
    std::vector<std::string> out;
    out.reserve(seq.tokens.size());
    for (const auto& t : seq.tokens) out.push_back(stem(t));
    return out;
}

// ---------------------------------------------------------------------------
// EmbedModel
// ---------------------------------------------------------------------------
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) {
    // [0, 1) from the top 53 bits
    return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

EmbedModel EmbedModel::random(int dim, std::uint64_t seed, int bucket_bits) {
    if (dim <= 0) throw Error("EmbedModel: dim must be positive");
    EmbedModel m;
    m.dim_ = dim;
    m.seed_ = seed;
    m.bucket_bits_ = bucket_bits;
    return m;
}

Vector EmbedModel::bucket_vector(std::uint64_t bucket) const {
    std::uint64_t state = seed_ ^ (bucket * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL);
    Vector v(static_cast<std::size_t>(dim_));
    double scale = 1.0 / static_cast<double>(dim_);
    for (auto& x : v) x = (2.0 * unit_double(splitmix64(state)) - 1.0) * scale;
    return v;
}

Vector EmbedModel::token_vector(std::string_view token) const {
    Vector acc(static_cast<std::size_t>(dim_), 0.0);
    std::size_t parts = 0;

    auto it = words_.find(std::string(token));
    if (it != words_.end()) {
        for (int i = 0; i < dim_; ++i) acc[static_cast<std::size_t>(i)] += it->second[static_cast<std::size_t>(i)];
        ++parts;
    }

    std::string wrapped;
    wrapped.reserve(token.size() + 2);
    wrapped.push_back('<');
    wrapped.append(token);
    wrapped.push_back('>');
    const std::uint64_t mask = (1ULL << bucket_bits_) - 1;
    for (int n = kMinGram; n <= kMaxGram; ++n) {
        if (wrapped.size() < static_cast<std::size_t>(n)) break;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= wrapped.size(); ++i) {
            std::uint64_t h = fnv1a(std::string_view(wrapped).substr(i, static_cast<std::size_t>(n)));
            Vector g = bucket_vector(h & mask);
            for (int d = 0; d < dim_; ++d) acc[static_cast<std::size_t>(d)] += g[static_cast<std::size_t>(d)];
            ++parts;
        }
    }
    if (parts > 1) {
        double inv = 1.0 / static_cast<double>(parts);
        for (auto& x : acc) x *= inv;
    }
    return acc;
}

Vector EmbedModel::embed(std::string_view text) const {
    TokenSeq seq = tokenize(text);
    Vector acc(static_cast<std::size_t>(dim_), 0.0);
    if (seq.empty()) return acc;
    for (const auto& tok : seq.tokens) {
        Vector tv = token_vector(tok);
        for (int d = 0; d < dim_; ++d) acc[static_cast<std::size_t>(d)] += tv[static_cast<std::size_t>(d)];
    }
    double inv = 1.0 / static_cast<double>(seq.tokens.size());
    for (auto& x : acc) x *= inv;
    return acc;
}

EmbedModel EmbedModel::load_vectors(const std::string& path, std::uint64_t seed,
                                    int bucket_bits) {
    std::ifstream in(path);
    if (!in) throw ValidationError("vector file not found: " + path);
    std::size_t count = 0;
    int dim = 0;
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("vector file empty: " + path);
    {
        std::istringstream hs(header);
        if (!(hs >> count >> dim) || dim <= 0)
            throw ValidationError("vector file bad header (want \"count dim\"): " + path);
    }
    EmbedModel m = EmbedModel::random(dim, seed, bucket_bits);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        Vector v(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d) {
            if (!(ls >> v[static_cast<std::size_t>(d)]))
                throw ValidationError("vector file line " + std::to_string(lineno) +
                                      ": expected " + std::to_string(dim) + " components");
        }
        m.words_[token] = std::move(v);
    }
    if (m.words_.size() != count)
        throw ValidationError("vector file declares " + std::to_string(count) +
                              " vectors, found " + std::to_string(m.words_.size()));
    return m;
}

void EmbedModel::save_vectors(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write vector file: " + path);
    out << words_.size() << ' ' << dim_ << '\n';
    std::vector<std::string> keys;
    keys.reserve(words_.size());
    for (const auto& [k, v] : words_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    char buf[32];
    for (const auto& k : keys) {
        out << k;
        for (double x : words_.at(k)) {
            std::snprintf(buf, sizeof(buf), "%.9g", x);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

}  // namespace eduqa
