#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "eduqa/corpus.hpp"
#include "eduqa/linalg.hpp"
#include "eduqa/textproc.hpp"

namespace eduqa {

enum class Measure { transcript, caption, joint };

std::string to_string(Measure m);
Measure measure_from_string(const std::string& s);

// The text a measure selects from a video.
std::string measure_text(const VideoDoc& video, Measure m);

struct Posting {
    std::uint32_t doc = 0;  // row in doc_ids
    std::uint32_t tf = 0;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

class InvertedIndex {
public:
    Measure field() const { return field_; }
    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_len() const { return avg_doc_len_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::int64_t doc_length(std::size_t row) const { return doc_lengths_[row]; }
    std::optional<std::size_t> row_of(const std::string& doc_id) const;
    const std::vector<Posting>* postings(const std::string& term) const;
    std::size_t term_count() const { return postings_.size(); }

    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

    friend InvertedIndex build_inverted_index(const VideoCorpus&, Measure);

private:
    Measure field_ = Measure::transcript;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::int64_t> doc_lengths_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::size_t> id_to_row_;
    double avg_doc_len_ = 0.0;
};

// Index over normalized + tokenized field text of every video.
InvertedIndex build_inverted_index(const VideoCorpus& corpus, Measure field);

// IDF(t) = ln(1 + (N - df + 0.5)/(df + 0.5))
double bm25_idf(std::size_t n_docs, std::size_t df);

// Okapi BM25 of the query against one document.
double bm25_score(const TokenSeq& query, const std::string& doc_id,
                  const InvertedIndex& index, const Bm25Params& params = {});

struct ScoredDoc {
    std::string video_id;
    double score = 0.0;
};

// Top-k over all docs; descending score, ties by ascending video_id.
std::vector<ScoredDoc> retrieve_topk(const std::string& topic_text,
                                     const InvertedIndex& index, std::size_t k,
                                     const Bm25Params& params = {});

// ---------------------------------------------------------------------------
// Dense retrieval
// ---------------------------------------------------------------------------

// Frozen subword embedding followed by a trainable linear projection, or an
// adapter over precomputed vectors. Topic and video encoders never share a
// projection.
class Encoder {
public:
    enum class Kind { subword_projection, external };

    static Encoder subword(const EmbedModel* base, std::size_t out_dim, std::uint64_t seed);
    static Encoder external(std::unordered_map<std::string, Vector> vectors);

    Kind kind() const { return kind_; }
    std::size_t out_dim() const;
    const Matrix& projection() const { return projection_; }
    Matrix& projection() { return projection_; }
    const EmbedModel* base() const { return base_; }

    // subword_projection: projection * base->embed(normalize(text)).
    // external: exact-key lookup (throws if the key is unknown).
    Vector encode(const std::string& text) const;

private:
    Kind kind_ = Kind::subword_projection;
    Matrix projection_;
    const EmbedModel* base_ = nullptr;
    std::unordered_map<std::string, Vector> external_;
};

Vector encode_topic(const std::string& topic_text, const Encoder& enc);
Vector encode_transcript(const std::string& transcript, const Encoder& enc);
// Captions are concatenated in frame order into one text, then encoded.
Vector encode_captions(const std::vector<std::string>& captions, const Encoder& enc);

// sim_t / sim_f are plain dot products; sim_v = sim_t + sim_f, which equals
// the dot of [topic;topic] with [transcript;caption] encodings.
double similarity(const Vector& topic_vec, const VideoDoc& video, const Encoder& video_enc,
                  Measure measure);

class DenseIndex {
public:
    DenseIndex() = default;
    DenseIndex(Measure measure, std::size_t dim) : measure_(measure), dim_(dim) {}

    Measure measure() const { return measure_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const float* row(std::size_t i) const { return rows_.data() + i * dim_; }

    void add(const std::string& video_id, const Vector& v);

    // Binary format: magic "EDQI", version, measure, N_docs, dim, f32 LE
    // rows, then length-prefixed id strings.
    void save(const std::string& path) const;
    static DenseIndex load(const std::string& path);

private:
    Measure measure_ = Measure::transcript;
    std::size_t dim_ = 0;
    std::vector<float> rows_;
    std::vector<std::string> ids_;
};

// Encodes every video under the measure. For joint, rows are
// [transcript encoding ; caption encoding] (2d) and queries are duplicated.
DenseIndex build_dense_index(const VideoCorpus& corpus, const Encoder& video_enc,
                             Measure measure);

// Query vector for a measure: the topic encoding, duplicated for joint.
Vector dense_query(const std::string& topic_text, const Encoder& topic_enc, Measure measure);

std::vector<ScoredDoc> retrieve_topk(const Vector& query, const DenseIndex& index,
                                     std::size_t k);

// ---------------------------------------------------------------------------
// Pseudo-label mining + contrastive training
// ---------------------------------------------------------------------------

struct TrainingInstance {
    std::string question_id;
    std::string query_text;
    std::string gold_answer;
    std::vector<std::string> positives;  // video ids
    std::vector<std::string> negatives;  // disjoint from positives
};

struct MiningQuestion {
    std::string question_id;
    std::string query_text;
    std::string gold_answer;
};

// Reads the top_m BM25 videos per question; a video is a positive when the
// supplied reader's answer is judged correct against the gold text, a
// negative when the document field lacks at least one gold stem. Questions
// with no positive are dropped.
using ReadFn = std::function<std::string(const std::string& context, const std::string& question)>;
using JudgeFn = std::function<bool(const std::string& predicted, const std::string& gold)>;

std::vector<TrainingInstance> mine_pseudo_labels(const std::vector<MiningQuestion>& questions,
                                                 const VideoCorpus& corpus,
                                                 const InvertedIndex& index,
                                                 const ReadFn& read, const JudgeFn& judge,
                                                 std::size_t top_m = 20);

// Instance with base embeddings resolved; measure decides the video text.
struct PreparedInstance {
    Vector query;                 // base embedding of the query text
    std::vector<Vector> positives;
    std::vector<Vector> negatives;
};

PreparedInstance prepare_instance(const TrainingInstance& inst, const VideoCorpus& corpus,
                                  Measure measure, const EmbedModel& base);

struct ContrastiveGrad {
    double loss = 0.0;
    Matrix d_topic;  // gradient w.r.t. the topic projection
    Matrix d_video;  // gradient w.r.t. the video projection
};

// L = -sum_k log( e^{s+_k} / (e^{s+_k} + sum_j e^{s-_j}) ) over the m
// positives, with analytic gradients for both projections.
ContrastiveGrad contrastive_loss(const std::vector<PreparedInstance>& batch,
                                 const Encoder& topic_enc, const Encoder& video_enc);

struct TrainConfig {
    double lr = 0.05;
    double weight_decay = 0.0;
    int epochs = 20;
    std::size_t batch = 8;
    std::size_t accum_steps = 8;  // gradient accumulation
    std::uint64_t seed = 1;
    std::size_t dense_dim = 64;
};

struct TrainReport {
    std::vector<double> epoch_loss;
    bool diverged = false;
};

struct TrainedRetriever {
    Encoder topic;
    Encoder video;
    TrainReport report;
};

// SGD with decoupled weight decay and batch-level gradient accumulation.
// Deterministic given config.seed. Throws ValidationError on an empty
// instance set; divergence (NaN loss) is reported, not thrown.
TrainedRetriever train_retriever(const std::vector<TrainingInstance>& instances,
                                 const VideoCorpus& corpus, Measure measure,
                                 const EmbedModel& base, const TrainConfig& config);

// Encoder projection file: same header style as DenseIndex with a section
// table ("topic", "video") of f32 matrices.
void save_encoders(const Encoder& topic, const Encoder& video, const std::string& path);
// Rebinds the projections onto `base`.
std::pair<Encoder, Encoder> load_encoders(const std::string& path, const EmbedModel* base);

}  // namespace eduqa
