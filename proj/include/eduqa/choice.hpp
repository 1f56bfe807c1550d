#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eduqa/linalg.hpp"
#include "eduqa/textproc.hpp"

namespace eduqa {

// Closest Language Embedding Model: the choice whose embedding is nearest
// (cosine) to the predicted answer's embedding. Ties -> lowest index.
std::size_t clem_select(const std::string& answer, const std::vector<std::string>& choices,
                        const EmbedModel& model);

// Per-choice features for the shallow multiple-choice classifier:
// [embedding cosine, stem-overlap fraction, length ratio].
Vector nnmc_features(const std::string& answer, const std::string& choice,
                     const EmbedModel& model);

struct NnmcModel {
    Vector weights{0.0, 0.0, 0.0};
    double bias = 0.0;

    double score(const Vector& features) const;
};

struct NnmcExample {
    std::string answer;
    std::vector<std::string> choices;
    std::size_t gold_index = 0;
};

struct NnmcConfig {
    double lr = 0.5;
    int epochs = 200;
    std::uint64_t seed = 7;
};

// Softmax cross-entropy over choices, seeded, deterministic.
NnmcModel train_nnmc(const std::vector<NnmcExample>& examples, const EmbedModel& model,
                     const NnmcConfig& config = {});

std::size_t nnmc_select(const std::string& answer, const std::vector<std::string>& choices,
                        const NnmcModel& nnmc, const EmbedModel& model);

// Word-matching correctness: every stemmed token of normalize(gold) must
// appear in the stem multiset of normalize(pred); duplicates in gold require
// duplicates in pred.
bool is_correct(const std::string& predicted, const std::string& gold);

struct CorrectnessDetail {
    bool correct = false;
    bool degenerate_empty_gold = false;  // vacuous truth
    std::size_t gold_stems = 0;
    std::size_t matched_stems = 0;       // distinct gold stems found in pred

    // incorrect but with partial stem overlap -> discrepancy report row
    bool discrepancy() const { return !correct && matched_stems > 0; }
};

CorrectnessDetail judge_correctness(const std::string& predicted, const std::string& gold);

struct Judgement {
    std::string question_id;
    std::string predicted;
    std::string gold_text;
    std::optional<std::size_t> selected_index;
    std::optional<std::size_t> gold_index;
    bool answered = false;
    bool correct = false;  // answered == false implies correct == false
};

struct MetricsReport {
    double accuracy = 0.0;   // correct / total
    double precision = 0.0;  // correct / answered
    double recall = 0.0;     // correct / total
    double f1_binary = 0.0;  // harmonic(precision, recall)
    double f1_token = 0.0;   // macro-averaged SQuAD-style token overlap F1
    std::size_t total = 0;
    std::size_t answered = 0;
    std::size_t correct = 0;
    bool precision_defined = true;  // false when answered == 0
};

MetricsReport metrics(const std::vector<Judgement>& judgements);

// SQuAD-style token F1 between two texts (normalized token multisets).
double token_f1(const std::string& predicted, const std::string& gold);

}  // namespace eduqa
