#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eduqa/choice.hpp"
#include "eduqa/corpus.hpp"
#include "eduqa/reader.hpp"
#include "eduqa/retrieval.hpp"

namespace eduqa {

enum class Retriever {
    bm25_transcript,
    bm25_caption,
    dense_transcript,
    dense_caption,
    dense_multimodal,
};

enum class Selector { clem, nnmc };
enum class ReaderKind { lexical, attn, external };

std::string to_string(Retriever r);
std::string to_string(Selector s);
std::string to_string(ReaderKind r);
Retriever retriever_from_string(const std::string& s);
Selector selector_from_string(const std::string& s);
ReaderKind reader_kind_from_string(const std::string& s);

// The measure a retriever ranks by.
Measure retriever_measure(Retriever r);
bool retriever_is_dense(Retriever r);

struct PipelineConfig {
    Retriever retriever = Retriever::dense_multimodal;
    std::size_t k = 3;
    ReaderKind reader = ReaderKind::lexical;
    Measure context_measure = Measure::joint;
    Selector selector = Selector::clem;
    std::uint64_t seed = 1;
    std::size_t max_tokens = 4096;
    int window = 64;
};

// Prebuilt artifacts a pipeline run draws from. Only the pieces the chosen
// retriever/selector need have to be present.
struct PipelineEnv {
    const VideoCorpus* corpus = nullptr;
    const EmbedModel* embed = nullptr;
    const InvertedIndex* bm25_transcript = nullptr;
    const InvertedIndex* bm25_caption = nullptr;
    const DenseIndex* dense_transcript = nullptr;
    const DenseIndex* dense_caption = nullptr;
    const DenseIndex* dense_joint = nullptr;
    const Encoder* topic_encoder = nullptr;
    ReaderBackend* reader = nullptr;
    const NnmcModel* nnmc = nullptr;
};

// One (question, retrieved video) outcome.
struct QuestionDetail {
    std::string topic_id;
    std::string question_id;
    std::string video_id;
    std::string channel_id;
    std::size_t rank = 0;  // retrieval rank, 0-based
    std::string predicted;
    std::optional<std::size_t> selected_index;
    std::size_t gold_index = 0;
    bool answered = false;
    bool correct = false;
};

struct TopicResult {
    std::vector<Judgement> judgements;        // one per question, any-of-k
    std::vector<QuestionDetail> details;      // one per (question, video)
    std::map<std::string, int> video_scores;  // video -> correct count delta
};

// Retrieves top-k videos for the topic context, reads every question against
// each video's context measure, selects a choice, and judges it. A question
// is correct when any of the k videos yields a correct judgement; every such
// video's score increments.
TopicResult answer_topic(const TqaTopic& topic,
                         const std::vector<const TqaQuestion*>& questions,
                         const PipelineConfig& config, const PipelineEnv& env);

struct TqaRunResult {
    std::vector<Judgement> judgements;
    std::vector<QuestionDetail> details;
    std::map<std::string, int> video_scores;  // the {video: score} map
};

// Topics processed in document order; with threads > 1 the per-topic work is
// parallel and results are merged back in topic order.
TqaRunResult run_tqa(const TqaCorpus& tqa, const PipelineConfig& config,
                     const PipelineEnv& env, int threads = 1);

inline constexpr const char* kBaselineText = "Colorless green ideas sleep furiously";

// Every question answered against the fixed random-text context.
struct BaselineResult {
    std::vector<Judgement> judgements;
    MetricsReport report;
};
BaselineResult run_baseline(const TqaCorpus& tqa, const PipelineConfig& config,
                            const PipelineEnv& env);

// One row per config: baseline plus the six (measure, k) cells.
struct GridRow {
    PipelineConfig config;
    double baseline_pct = 0.0;
    // Transcript k=1, Transcript k=3, Caption k=1, Caption k=3,
    // Transcript+Caption k=1, Transcript+Caption k=3
    std::array<double, 6> cells{};
};

std::vector<GridRow> accuracy_grid(const std::vector<PipelineConfig>& configs,
                                   const TqaCorpus& tqa, const PipelineEnv& env,
                                   int threads = 1);

struct ChannelReport {
    std::string channel_id;
    std::string name;
    std::size_t n_videos = 0;
    std::size_t questions_answered = 0;  // distinct question ids correct via the channel
    double eq = 0.0;                     // questions_answered / n_videos * 100
    std::int64_t views = 0;
};

// Per channel, distinct questions correct via any of the channel's videos;
// sorted by EQ descending, then channel id. Channels with zero videos are
// excluded with a warning.
std::vector<ChannelReport> channel_eq(const std::vector<QuestionDetail>& details,
                                      const VideoCorpus& corpus,
                                      std::vector<std::string>* warnings = nullptr);

struct TopicCoverage {
    std::string topic_id;
    std::string title;
    std::size_t questions_total = 0;
    std::size_t questions_correct = 0;
    double coverage = 0.0;  // fraction over all loaded questions of the topic
};

std::vector<TopicCoverage> topic_coverage(const std::vector<QuestionDetail>& details,
                                          const TqaCorpus& tqa);

// ---------------------------------------------------------------------------
// Report emission (CSV always; SVG on request)
// ---------------------------------------------------------------------------

void write_channel_csv(const std::vector<ChannelReport>& reports, const std::string& path);
std::vector<ChannelReport> read_channel_csv(const std::string& path);
void write_coverage_csv(const std::vector<TopicCoverage>& coverage, const std::string& path);
void write_judgements_csv(const std::vector<Judgement>& judgements, const std::string& path);
void write_details_csv(const std::vector<QuestionDetail>& details, const std::string& path);
std::vector<QuestionDetail> read_details_csv(const std::string& path);
void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path);

// Bar chart of EQ per channel (one bar per channel, EQ order).
void write_channel_bar_svg(const std::vector<ChannelReport>& reports, const std::string& path);
// Scatter of EQ against views, one mark per channel, radius proportional to
// views.
void write_channel_scatter_svg(const std::vector<ChannelReport>& reports,
                               const std::string& path);

}  // namespace eduqa
