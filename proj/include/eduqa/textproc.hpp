#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eduqa/linalg.hpp"

namespace eduqa {

// Token stream with character spans back into the source text.
// Offsets are half-open [start, end) and strictly increasing.
struct TokenSeq {
    std::vector<std::string> tokens;
    std::vector<std::pair<std::size_t, std::size_t>> offsets;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Lowercase, map '-' and '/' to spaces, strip remaining punctuation,
// collapse whitespace. "5-10 gallons" -> "5 10 gallons".
std::string normalize(std::string_view text);

// Whitespace tokenization with offsets into the input.
TokenSeq tokenize(std::string_view text);

// Tokenize raw (un-normalized) text into maximal alphanumeric runs,
// lowercased, offsets into the original string. Used where answer spans
// must map back to source character positions.
TokenSeq tokenize_raw(std::string_view text);

// Porter stemmer (classic 1980 rule set). Words of length <= 2 pass through.
std::string stem(std::string_view token);

// Convenience: normalize, tokenize, stem each token.
std::vector<std::string> stem_tokens(std::string_view text);

// fasttext-style bag-of-subwords text embedding. Word vectors come from an
// explicit table (possibly empty); character n-gram vectors come from a
// hashed bucket table derived deterministically from (seed, bucket), so the
// same (text, seed) always embeds identically, in any process.
class EmbedModel {
public:
    static constexpr int kMinGram = 3;
    static constexpr int kMaxGram = 6;

    // Randomly seeded model: empty word table, procedural n-gram buckets.
    static EmbedModel random(int dim, std::uint64_t seed, int bucket_bits = 21);

    // Plain-text vector file: first line "count dim", then "token v1 .. vdim".
    static EmbedModel load_vectors(const std::string& path, std::uint64_t seed = 0,
                                   int bucket_bits = 21);
    void save_vectors(const std::string& path) const;

    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    const std::unordered_map<std::string, Vector>& words() const { return words_; }

    // Mean over tokens of the per-token vector; zero vector for empty text.
    // Per-token vector = mean of (word vector if in table) and the hashed
    // 3..6-char n-gram vectors of "<token>".
    Vector embed(std::string_view text) const;

    Vector token_vector(std::string_view token) const;

private:
    EmbedModel() = default;

    Vector bucket_vector(std::uint64_t bucket) const;

    int dim_ = 100;
    int bucket_bits_ = 21;
    std::uint64_t seed_ = 0;
    std::unordered_map<std::string, Vector> words_;
};

}  // namespace eduqa
