#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eduqa/linalg.hpp"
#include "eduqa/textproc.hpp"

namespace eduqa {

// ---------------------------------------------------------------------------
// Attention kernels
// ---------------------------------------------------------------------------

// softmax(Q K^T / sqrt(d_k)) V, softmax row-wise.
Matrix attention_full(const Matrix& q, const Matrix& k, const Matrix& v);

// Sliding-window attention with designated global tokens. Non-global token i
// attends to positions within +-w/2 plus all global positions, scored with
// the sliding projections; global tokens attend everywhere with the global
// projections. `score_evals`, when given, counts score evaluations (the
// linear-cost witness).
Matrix attention_sliding(const Matrix& qs, const Matrix& ks, const Matrix& vs, int w,
                         const std::vector<bool>& global_mask, const Matrix& qg,
                         const Matrix& kg, const Matrix& vg,
                         std::size_t* score_evals = nullptr);

struct SpanHeads {
    Vector w_start;  // length h
    Vector w_end;    // length h
};

// start_logits = P w_start, end_logits = P w_end.
std::pair<Vector, Vector> span_logits(const Matrix& p, const SpanHeads& heads);

struct SpanChoice {
    std::size_t start = 0;
    std::size_t end = 0;
    double score = 0.0;
};

// argmax over pairs (s,e), s <= e < s + max_span_len, both inside
// [ctx_begin, ctx_end), of start_logits[s] + end_logits[e].
// Ties: smallest s, then smallest e.
SpanChoice decode_span(const Vector& start_logits, const Vector& end_logits,
                       std::size_t max_span_len, std::size_t ctx_begin, std::size_t ctx_end);

// ---------------------------------------------------------------------------
// Reader backends
// ---------------------------------------------------------------------------

struct Answer {
    std::string text;
    std::size_t start = 0;       // token index into the context token stream
    std::size_t end = 0;         // inclusive
    std::size_t char_begin = 0;  // character span into the context
    std::size_t char_end = 0;
    double score = -std::numeric_limits<double>::infinity();
    bool abstained = true;
};

struct ReaderInput {
    std::string context;
    std::string question;
    std::size_t max_tokens = 4096;  // question + separator + context budget
    int window = 64;                // sliding attention window (attn backend)
};

inline constexpr std::size_t kMaxSpanLen = 30;
inline constexpr std::size_t kChunkStride = 128;

class ReaderBackend {
public:
    virtual ~ReaderBackend() = default;
    // chunk_tokens are raw tokens of chunk_text with offsets into chunk_text.
    virtual Answer read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                              const std::string& question) = 0;
};

// Sentence with the best stemmed-token overlap against the question, then the
// shortest span covering the sentence's highest-IDF non-question tokens.
// Abstains (empty answer, score -inf) when no sentence shares a stem.
class LexicalReader : public ReaderBackend {
public:
    Answer read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                      const std::string& question) override;
};

// Numerically exact sliding/global attention stack with seeded weights and a
// weight-file loader; not a trained model.
struct AttnParams {
    std::size_t hidden = 64;
    std::size_t layers = 2;
    std::uint64_t seed = 0;

    struct Layer {
        Matrix wqs, wks, wvs;  // sliding projections, h x h
        Matrix wqg, wkg, wvg;  // global projections, h x h
        Matrix wo;             // output dense, h x h
    };
    std::vector<Layer> layer;
    SpanHeads heads;

    static AttnParams seeded(std::size_t hidden, std::size_t layers, std::uint64_t seed);
    // Weight file: header + section table + f32 matrices (magic "EDQW").
    void save(const std::string& path) const;
    static AttnParams load(const std::string& path);
};

class AttnReader : public ReaderBackend {
public:
    AttnReader(AttnParams params, int window) : params_(std::move(params)), window_(window) {}
    Answer read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                      const std::string& question) override;

private:
    AttnParams params_;
    int window_;
};

// Chunks contexts longer than the token budget (stride kChunkStride) and
// returns the best-scoring chunk answer, token indices mapped back to the
// full context.
Answer read(const ReaderInput& input, ReaderBackend& backend);

// ---------------------------------------------------------------------------
// External reader adapter (line protocol over a child process)
// ---------------------------------------------------------------------------

struct ExternalRequest {
    std::int64_t id = 0;
    std::string context;
    std::string question;
};

struct ExternalResponse {
    std::int64_t id = 0;
    std::string answer;
    std::int64_t start = 0;
    std::int64_t end = 0;
    double score = 0.0;
};

// Speaks JSONL over the child's stdin/stdout: one request object per line,
// one response per request, matched by id (any arrival order). Writes are
// serialized; share across threads only via that lock.
class ExternalReader {
public:
    explicit ExternalReader(std::vector<std::string> argv, int timeout_ms = 10000);
    ~ExternalReader();
    ExternalReader(const ExternalReader&) = delete;
    ExternalReader& operator=(const ExternalReader&) = delete;

    std::vector<ExternalResponse> ask(const std::vector<ExternalRequest>& requests);

private:
    std::mutex mutex_;
    int to_child_ = -1;
    int from_child_ = -1;
    long pid_ = -1;
    int timeout_ms_;
    std::string buffer_;
};

class ExternalBackend : public ReaderBackend {
public:
    explicit ExternalBackend(ExternalReader& child) : child_(child) {}
    Answer read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                      const std::string& question) override;

private:
    ExternalReader& child_;
    std::int64_t next_id_ = 1;
};

}  // namespace eduqa
