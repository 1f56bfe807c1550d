#include "eduqa/choice.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "eduqa/error.hpp"

namespace eduqa {

std::size_t clem_select(const std::string& answer, const std::vector<std::string>& choices,
                        const EmbedModel& model) {
    if (choices.empty()) throw ValidationError("clem_select: empty choice list");
    Vector ans_vec = model.embed(normalize(answer));
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        double sim = cosine(model.embed(normalize(choices[i])), ans_vec);
        if (sim > best_sim) {
            best_sim = sim;
            best = i;
        }
    }
    return best;
}

Vector nnmc_features(const std::string& answer, const std::string& choice,
                     const EmbedModel& model) {
    std::string na = normalize(answer);
    std::string nc = normalize(choice);
    double cos = cosine(model.embed(nc), model.embed(na));

    std::vector<std::string> ans_stems = stem_tokens(answer);
    std::vector<std::string> choice_stems = stem_tokens(choice);
    std::unordered_map<std::string, int> have;
    for (const auto& s : ans_stems) ++have[s];
    std::size_t overlap = 0;
    for (const auto& s : choice_stems) {
        auto it = have.find(s);
        if (it != have.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    double overlap_frac = choice_stems.empty()
                              ? 0.0
                              : static_cast<double>(overlap) / static_cast<double>(choice_stems.size());
    double na_len = static_cast<double>(ans_stems.size());
    double nc_len = static_cast<double>(choice_stems.size());
    double len_ratio = (na_len == 0.0 || nc_len == 0.0)
                           ? 0.0
                           : std::min(na_len, nc_len) / std::max(na_len, nc_len);
    return Vector{cos, overlap_frac, len_ratio};
}

double NnmcModel::score(const Vector& features) const {
    double s = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * features[i];
    return s;
}

NnmcModel train_nnmc(const std::vector<NnmcExample>& examples, const EmbedModel& model,
                     const NnmcConfig& config) {
    if (examples.empty()) throw ValidationError("train_nnmc: empty training set");

    // feature vectors once per (example, choice)
    std::vector<std::vector<Vector>> feats;
    bool separable_signal = false;
    for (const auto& ex : examples) {
        if (ex.choices.size() < 2)
            throw ValidationError("train_nnmc: example with fewer than 2 choices");
        if (ex.gold_index >= ex.choices.size())
            throw ValidationError("train_nnmc: gold index out of range");
        std::vector<Vector> fs;
        for (const auto& c : ex.choices) fs.push_back(nnmc_features(ex.answer, c, model));
        for (std::size_t i = 0; i < fs.size(); ++i)
            if (i != ex.gold_index && fs[i] != fs[ex.gold_index]) separable_signal = true;
        feats.push_back(std::move(fs));
    }
    if (!separable_signal)
        throw ValidationError(
            "train_nnmc: degenerate training set (gold features identical to every "
            "alternative)");

    NnmcModel nnmc;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (auto& w : nnmc.weights) w = dist(rng);
    nnmc.bias = dist(rng);

    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const auto& fs = feats[idx];
            Vector logits(fs.size());
            for (std::size_t i = 0; i < fs.size(); ++i) logits[i] = nnmc.score(fs[i]);
            Vector probs = softmax(logits);
            // d CE / d logit_i = p_i - 1[i == gold]
            Vector gw(nnmc.weights.size(), 0.0);
            double gb = 0.0;
            for (std::size_t i = 0; i < fs.size(); ++i) {
                double coef = probs[i] - (i == examples[idx].gold_index ? 1.0 : 0.0);
                for (std::size_t d = 0; d < gw.size(); ++d) gw[d] += coef * fs[i][d];
                gb += coef;
            }
            for (std::size_t d = 0; d < gw.size(); ++d) nnmc.weights[d] -= config.lr * gw[d];
            nnmc.bias -= config.lr * gb;
        }
    }
    return nnmc;
}

std::size_t nnmc_select(const std::string& answer, const std::vector<std::string>& choices,
                        const NnmcModel& nnmc, const EmbedModel& model) {
    if (choices.empty()) throw ValidationError("nnmc_select: empty choice list");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < choices.size(); ++i) {
        double s = nnmc.score(nnmc_features(answer, choices[i], model));
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return best;
}

CorrectnessDetail judge_correctness(const std::string& predicted, const std::string& gold) {
    CorrectnessDetail d;
    std::vector<std::string> gold_stems = stem_tokens(gold);
    d.gold_stems = gold_stems.size();
    if (gold_stems.empty()) {
        d.correct = true;
        d.degenerate_empty_gold = true;
        return d;
    }
    std::unordered_map<std::string, int> have;
    for (const auto& s : stem_tokens(predicted)) ++have[s];
    std::unordered_map<std::string, int> need;
    for (const auto& s : gold_stems) ++need[s];
    bool all = true;
    for (const auto& [s, n] : need) {
        auto it = have.find(s);
        int got = it == have.end() ? 0 : it->second;
        if (got > 0) ++d.matched_stems;
        if (got < n) all = false;
    }
    d.correct = all;
    return d;
}

bool is_correct(const std::string& predicted, const std::string& gold) {
    return judge_correctness(predicted, gold).correct;
}

double token_f1(const std::string& predicted, const std::string& gold) {
    TokenSeq p = tokenize(normalize(predicted));
    TokenSeq g = tokenize(normalize(gold));
    if (p.empty() || g.empty()) return (p.empty() && g.empty()) ? 1.0 : 0.0;
    std::unordered_map<std::string, int> counts;
    for (const auto& t : g.tokens) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : p.tokens) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    double prec = static_cast<double>(overlap) / static_cast<double>(p.size());
    double rec = static_cast<double>(overlap) / static_cast<double>(g.size());
    return 2.0 * prec * rec / (prec + rec);
}

MetricsReport metrics(const std::vector<Judgement>& judgements) {
    if (judgements.empty()) throw ValidationError("metrics: empty judgement set");
    MetricsReport r;
    r.total = judgements.size();
    double f1_sum = 0.0;
    for (const auto& j : judgements) {
        if (j.answered) ++r.answered;
        if (j.correct) ++r.correct;
        f1_sum += token_f1(j.predicted, j.gold_text);
    }
    r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
    r.recall = r.accuracy;
    if (r.answered == 0) {
        r.precision = 0.0;
        r.precision_defined = false;
    } else {
        r.precision = static_cast<double>(r.correct) / static_cast<double>(r.answered);
    }
    r.f1_binary = (r.precision + r.recall) > 0.0
                      ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                      : 0.0;
    r.f1_token = f1_sum / static_cast<double>(r.total);
    return r;
}

}  // namespace eduqa
