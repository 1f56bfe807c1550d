#include "eduqa/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace eduqa {

std::string to_string(Retriever r) {
    switch (r) {
        case Retriever::bm25_transcript: return "bm25-transcript";
        case Retriever::bm25_caption: return "bm25-caption";
        case Retriever::dense_transcript: return "dense-transcript";
        case Retriever::dense_caption: return "dense-caption";
        default: return "dense-multimodal";
    }
}

Retriever retriever_from_string(const std::string& s) {
    if (s == "bm25-transcript") return Retriever::bm25_transcript;
    if (s == "bm25-caption") return Retriever::bm25_caption;
    if (s == "dense-transcript") return Retriever::dense_transcript;
    if (s == "dense-caption") return Retriever::dense_caption;
    if (s == "dense-multimodal") return Retriever::dense_multimodal;
    throw ValidationError("unknown retriever \"" + s + "\"");
}

std::string to_string(Selector s) { return s == Selector::clem ? "clem" : "nnmc"; }

Selector selector_from_string(const std::string& s) {
    if (s == "clem") return Selector::clem;
    if (s == "nnmc") return Selector::nnmc;
    throw ValidationError("selector must be clem|nnmc, got \"" + s + "\"");
}

std::string to_string(ReaderKind r) {
    switch (r) {
        case ReaderKind::lexical: return "lexical";
        case ReaderKind::attn: return "attn";
        default: return "external";
    }
}

ReaderKind reader_kind_from_string(const std::string& s) {
    if (s == "lexical") return ReaderKind::lexical;
    if (s == "attn") return ReaderKind::attn;
    if (s == "external") return ReaderKind::external;
    throw ValidationError("reader must be lexical|attn|external, got \"" + s + "\"");
}

Measure retriever_measure(Retriever r) {
    switch (r) {
        case Retriever::bm25_transcript:
        case Retriever::dense_transcript: return Measure::transcript;
        case Retriever::bm25_caption:
        case Retriever::dense_caption: return Measure::caption;
        default: return Measure::joint;
    }
}

bool retriever_is_dense(Retriever r) {
    return r == Retriever::dense_transcript || r == Retriever::dense_caption ||
           r == Retriever::dense_multimodal;
}

namespace {

std::vector<ScoredDoc> retrieve_for_config(const std::string& topic_text,
                                           const PipelineConfig& config,
                                           const PipelineEnv& env) {
    switch (config.retriever) {
        case Retriever::bm25_transcript:
            if (!env.bm25_transcript)
                throw ValidationError("missing index: bm25 transcript");
            return retrieve_topk(topic_text, *env.bm25_transcript, config.k);
        case Retriever::bm25_caption:
            if (!env.bm25_caption) throw ValidationError("missing index: bm25 caption");
            return retrieve_topk(topic_text, *env.bm25_caption, config.k);
        case Retriever::dense_transcript:
            if (!env.dense_transcript || !env.topic_encoder)
                throw ValidationError("missing index: dense transcript");
            return retrieve_topk(dense_query(topic_text, *env.topic_encoder, Measure::transcript),
                                 *env.dense_transcript, config.k);
        case Retriever::dense_caption:
            if (!env.dense_caption || !env.topic_encoder)
                throw ValidationError("missing index: dense caption");
            return retrieve_topk(dense_query(topic_text, *env.topic_encoder, Measure::caption),
                                 *env.dense_caption, config.k);
        default:
            if (!env.dense_joint || !env.topic_encoder)
                throw ValidationError("missing index: dense joint");
            return retrieve_topk(dense_query(topic_text, *env.topic_encoder, Measure::joint),
                                 *env.dense_joint, config.k);
    }
}

std::size_t select_choice(const std::string& answer, const std::vector<std::string>& choices,
                          const PipelineConfig& config, const PipelineEnv& env) {
    if (config.selector == Selector::clem) {
        if (!env.embed) throw ValidationError("CLEM selector needs an embedding model");
        return clem_select(answer, choices, *env.embed);
    }
    if (!env.nnmc || !env.embed)
        throw ValidationError("NNMC selector needs a trained model");
    return nnmc_select(answer, choices, *env.nnmc, *env.embed);
}

Answer read_or_abstain(const std::string& context, const std::string& question,
                       const PipelineConfig& config, const PipelineEnv& env) {
    if (tokenize_raw(context).empty()) return Answer{};  // e.g. captionless video
    ReaderInput input;
    input.context = context;
    input.question = question;
    input.max_tokens = config.max_tokens;
    input.window = config.window;
    return read(input, *env.reader);
}

}  // namespace

TopicResult answer_topic(const TqaTopic& topic,
                         const std::vector<const TqaQuestion*>& questions,
                         const PipelineConfig& config, const PipelineEnv& env) {
    if (!env.corpus) throw ValidationError("answer_topic: no corpus");
    if (!env.reader) throw ValidationError("answer_topic: no reader backend");

    TopicResult result;
    std::vector<ScoredDoc> top = retrieve_for_config(topic.context, config, env);

    struct VideoRead {
        const VideoDoc* video = nullptr;
        std::string context;
    };
    std::vector<VideoRead> reads;
    for (const auto& hit : top) {
        const VideoDoc* video = env.corpus->find(hit.video_id);
        if (!video) throw ValidationError("retrieved unknown video \"" + hit.video_id + "\"");
        reads.push_back(VideoRead{video, measure_text(*video, config.context_measure)});
    }

    for (const TqaQuestion* q : questions) {
        Judgement judgement;
        judgement.question_id = q->question_id;
        judgement.gold_text = q->gold_text();
        judgement.gold_index = static_cast<std::size_t>(q->correct_index);

        double best_score = -std::numeric_limits<double>::infinity();
        bool found_correct = false;

        for (std::size_t rank = 0; rank < reads.size(); ++rank) {
            const VideoRead& vr = reads[rank];
            Answer ans = read_or_abstain(vr.context, q->text, config, env);

            QuestionDetail detail;
            detail.topic_id = topic.topic_id;
            detail.question_id = q->question_id;
            detail.video_id = vr.video->video_id;
            detail.channel_id = vr.video->channel_id;
            detail.rank = rank;
            detail.gold_index = static_cast<std::size_t>(q->correct_index);
            detail.answered = !ans.abstained;
            if (!ans.abstained) {
                detail.predicted = ans.text;
                std::size_t sel = select_choice(ans.text, q->choices, config, env);
                detail.selected_index = sel;
                detail.correct = sel == static_cast<std::size_t>(q->correct_index);
            }
            if (detail.correct) {
                ++result.video_scores[vr.video->video_id];
                // the first (best-ranked) correct video decides the
                // question-level prediction
                if (!found_correct) {
                    judgement.predicted = detail.predicted;
                    judgement.selected_index = detail.selected_index;
                    found_correct = true;
                }
            }
            if (!found_correct && detail.answered && ans.score > best_score) {
                best_score = ans.score;
                judgement.predicted = detail.predicted;
                judgement.selected_index = detail.selected_index;
            }
            if (detail.answered) judgement.answered = true;
            result.details.push_back(std::move(detail));
        }
        judgement.correct = found_correct;
        result.judgements.push_back(std::move(judgement));
    }
    return result;
}

TqaRunResult run_tqa(const TqaCorpus& tqa, const PipelineConfig& config,
                     const PipelineEnv& env, int threads) {
    // topics in document order
    std::vector<const TqaTopic*> topics;
    for (const auto& lesson : tqa.lessons)
        for (const auto& tid : lesson.topic_ids) topics.push_back(&tqa.topics.at(tid));

    std::vector<TopicResult> per_topic(topics.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::vector<const TqaQuestion*> questions;
            for (const auto& qid : topics[i]->question_ids)
                questions.push_back(tqa.find_question(qid));
            per_topic[i] = answer_topic(*topics[i], questions, config, env);
        }
    };

    int n_threads = std::max(1, threads);
    if (n_threads <= 1 || topics.size() <= 1) {
        work(0, topics.size());
    } else {
        std::size_t n = topics.size();
        std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
        std::vector<std::thread> pool;
        std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = w * chunk;
            std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    // merge in topic order for byte-identical outputs
    TqaRunResult result;
    for (auto& tr : per_topic) {
        for (auto& j : tr.judgements) result.judgements.push_back(std::move(j));
        for (auto& d : tr.details) result.details.push_back(std::move(d));
        for (const auto& [video, score] : tr.video_scores)
            result.video_scores[video] += score;
    }
    return result;
}

BaselineResult run_baseline(const TqaCorpus& tqa, const PipelineConfig& config,
                            const PipelineEnv& env) {
    if (!env.reader) throw ValidationError("run_baseline: no reader backend");
    BaselineResult result;
    for (const auto& q : tqa.questions) {
        Judgement judgement;
        judgement.question_id = q.question_id;
        judgement.gold_text = q.gold_text();
        judgement.gold_index = static_cast<std::size_t>(q.correct_index);
        Answer ans = read_or_abstain(kBaselineText, q.text, config, env);
        if (!ans.abstained) {
            judgement.answered = true;
            judgement.predicted = ans.text;
            std::size_t sel = select_choice(ans.text, q.choices, config, env);
            judgement.selected_index = sel;
            judgement.correct = sel == static_cast<std::size_t>(q.correct_index);
        }
        result.judgements.push_back(std::move(judgement));
    }
    result.report = metrics(result.judgements);
    return result;
}

namespace {

double accuracy_pct(const std::vector<Judgement>& judgements) {
    if (judgements.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& j : judgements)
        if (j.correct) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(judgements.size());
}

}  // namespace

std::vector<GridRow> accuracy_grid(const std::vector<PipelineConfig>& configs,
                                   const TqaCorpus& tqa, const PipelineEnv& env,
                                   int threads) {
    const std::array<std::pair<Measure, std::size_t>, 6> cells = {{
        {Measure::transcript, 1},
        {Measure::transcript, 3},
        {Measure::caption, 1},
        {Measure::caption, 3},
        {Measure::joint, 1},
        {Measure::joint, 3},
    }};
    std::vector<GridRow> rows;
    for (const auto& base : configs) {
        GridRow row;
        row.config = base;
        row.baseline_pct = 100.0 * run_baseline(tqa, base, env).report.accuracy;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            PipelineConfig cfg = base;
            cfg.context_measure = cells[c].first;
            cfg.k = cells[c].second;
            row.cells[c] = accuracy_pct(run_tqa(tqa, cfg, env, threads).judgements);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<ChannelReport> channel_eq(const std::vector<QuestionDetail>& details,
                                      const VideoCorpus& corpus,
                                      std::vector<std::string>* warnings) {
    // distinct (channel, question) pairs judged correct
    std::map<std::string, std::set<std::string>> correct_questions;
    for (const auto& d : details)
        if (d.correct) correct_questions[d.channel_id].insert(d.question_id);

    std::vector<ChannelReport> reports;
    for (const auto& [channel_id, channel] : corpus.channels) {
        if (channel.video_count() == 0) {
            if (warnings)
                warnings->push_back("channel " + channel_id + " has no videos, excluded");
            continue;
        }
        ChannelReport r;
        r.channel_id = channel_id;
        r.name = channel.name;
        r.n_videos = channel.video_count();
        auto it = correct_questions.find(channel_id);
        r.questions_answered = it == correct_questions.end() ? 0 : it->second.size();
        r.eq = 100.0 * static_cast<double>(r.questions_answered) /
               static_cast<double>(r.n_videos);
        r.views = channel.total_views;
        reports.push_back(std::move(r));
    }
    std::sort(reports.begin(), reports.end(), [](const ChannelReport& a, const ChannelReport& b) {
        if (a.eq != b.eq) return a.eq > b.eq;
        return a.channel_id < b.channel_id;
    });
    return reports;
}

std::vector<TopicCoverage> topic_coverage(const std::vector<QuestionDetail>& details,
                                          const TqaCorpus& tqa) {
    std::map<std::string, std::set<std::string>> correct_by_topic;
    for (const auto& d : details)
        if (d.correct) correct_by_topic[d.topic_id].insert(d.question_id);

    std::vector<TopicCoverage> out;
    for (const auto& [topic_id, topic] : tqa.topics) {
        TopicCoverage c;
        c.topic_id = topic_id;
        c.title = topic.title;
        c.questions_total = topic.question_ids.size();
        auto it = correct_by_topic.find(topic_id);
        c.questions_correct = it == correct_by_topic.end() ? 0 : it->second.size();
        c.coverage = c.questions_total == 0
                         ? 0.0
                         : static_cast<double>(c.questions_correct) /
                               static_cast<double>(c.questions_total);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const TopicCoverage& a, const TopicCoverage& b) {
        if (a.coverage != b.coverage) return a.coverage > b.coverage;
        return a.topic_id < b.topic_id;
    });
    return out;
}

// ---------------------------------------------------------------------------
// CSV / SVG emission
// ---------------------------------------------------------------------------

namespace {

std::string csv_escape(const std::string& s) {
    bool needs = s.find_first_of(",\"\n") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string pct2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
}

}  // namespace

void write_channel_csv(const std::vector<ChannelReport>& reports, const std::string& path) {
    auto out = open_out(path);
    out << "channel_id,name,n_videos,questions_answered,eq,views\n";
    for (const auto& r : reports) {
        out << csv_escape(r.channel_id) << ',' << csv_escape(r.name) << ',' << r.n_videos
            << ',' << r.questions_answered << ',' << pct2(r.eq) << ',' << r.views << '\n';
    }
}

std::vector<ChannelReport> read_channel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("channel report not found: " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<ChannelReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 6)
            throw ValidationError(path + ": bad channel row \"" + line + "\"");
        ChannelReport r;
        r.channel_id = f[0];
        r.name = f[1];
        r.n_videos = std::stoul(f[2]);
        r.questions_answered = std::stoul(f[3]);
        r.eq = std::stod(f[4]);
        r.views = std::stoll(f[5]);
        out.push_back(std::move(r));
    }
    return out;
}

void write_coverage_csv(const std::vector<TopicCoverage>& coverage, const std::string& path) {
    auto out = open_out(path);
    // fractions are over all loaded TQA questions of each topic
    out << "topic_id,title,questions_total,questions_correct,coverage\n";
    for (const auto& c : coverage) {
        out << csv_escape(c.topic_id) << ',' << csv_escape(c.title) << ','
            << c.questions_total << ',' << c.questions_correct << ','
            << pct2(100.0 * c.coverage) << '\n';
    }
}

void write_judgements_csv(const std::vector<Judgement>& judgements, const std::string& path) {
    auto out = open_out(path);
    out << "question_id,predicted,selected_index,gold_index,answered,correct\n";
    for (const auto& j : judgements) {
        out << csv_escape(j.question_id) << ',' << csv_escape(j.predicted) << ',';
        if (j.selected_index) out << *j.selected_index;
        out << ',';
        if (j.gold_index) out << *j.gold_index;
        out << ',' << (j.answered ? 1 : 0) << ',' << (j.correct ? 1 : 0) << '\n';
    }
}

void write_details_csv(const std::vector<QuestionDetail>& details, const std::string& path) {
    auto out = open_out(path);
    out << "topic_id,question_id,video_id,channel_id,rank,predicted,selected_index,"
           "gold_index,answered,correct\n";
    for (const auto& d : details) {
        out << csv_escape(d.topic_id) << ',' << csv_escape(d.question_id) << ','
            << csv_escape(d.video_id) << ',' << csv_escape(d.channel_id) << ',' << d.rank
            << ',' << csv_escape(d.predicted) << ',';
        if (d.selected_index) out << *d.selected_index;
        out << ',' << d.gold_index << ',' << (d.answered ? 1 : 0) << ','
            << (d.correct ? 1 : 0) << '\n';
    }
}

std::vector<QuestionDetail> read_details_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("details file not found: " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<QuestionDetail> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 10)
            throw ValidationError(path + ": bad detail row \"" + line + "\"");
        QuestionDetail d;
        d.topic_id = f[0];
        d.question_id = f[1];
        d.video_id = f[2];
        d.channel_id = f[3];
        d.rank = std::stoul(f[4]);
        d.predicted = f[5];
        if (!f[6].empty()) d.selected_index = std::stoul(f[6]);
        d.gold_index = std::stoul(f[7]);
        d.answered = f[8] == "1";
        d.correct = f[9] == "1";
        out.push_back(std::move(d));
    }
    return out;
}

void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "Retriever + RC + Answer Extraction Models,Retrieval Measure,Reader,"
           "Baseline with Random Text,Transcript (K=1),Transcript (K=3),Caption (K=1),"
           "Caption (K=3),Transcript + Caption (K=1),Transcript + Caption (K=3)\n";
    for (const auto& row : rows) {
        std::string label = to_string(row.config.retriever) + " + " +
                            to_string(row.config.reader) + " + " +
                            to_string(row.config.selector);
        out << csv_escape(label) << ',' << to_string(retriever_measure(row.config.retriever))
            << ',' << to_string(row.config.reader) << ',' << pct2(row.baseline_pct);
        for (double cell : row.cells) out << ',' << pct2(cell);
        out << '\n';
    }
}

void write_channel_bar_svg(const std::vector<ChannelReport>& reports, const std::string& path) {
    auto out = open_out(path);
    const double bar_w = 24.0, gap = 8.0, height = 240.0, margin = 40.0;
    double width = margin * 2 + reports.size() * (bar_w + gap);
    double max_eq = 1e-9;
    for (const auto& r : reports) max_eq = std::max(max_eq, r.eq);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height + 2 * margin << "\">\n";
    out << "<!-- percentage of TQA questions (all loaded questions) answered correctly "
           "per channel -->\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        double h = height * reports[i].eq / max_eq;
        double x = margin + i * (bar_w + gap);
        double y = margin + (height - h);
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w
            << "\" height=\"" << h << "\" fill=\"#4477aa\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << margin + height + 14
            << "\" font-size=\"9\">" << reports[i].channel_id << "</text>\n";
    }
    out << "</svg>\n";
}

void write_channel_scatter_svg(const std::vector<ChannelReport>& reports,
                               const std::string& path) {
    auto out = open_out(path);
    const double width = 480.0, height = 320.0, margin = 48.0, max_radius = 20.0;
    double max_eq = 1e-9, max_log_views = 1e-9;
    std::int64_t max_views = 1;
    for (const auto& r : reports) {
        max_eq = std::max(max_eq, r.eq);
        max_views = std::max(max_views, r.views);
        max_log_views = std::max(max_log_views, std::log10(1.0 + static_cast<double>(r.views)));
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<!-- academic quality (EQ) against channel views; mark radius proportional "
           "to views -->\n";
    for (const auto& r : reports) {
        double lx = std::log10(1.0 + static_cast<double>(r.views)) / max_log_views;
        double cx = margin + lx * (width - 2 * margin);
        double cy = height - margin - (r.eq / max_eq) * (height - 2 * margin);
        double radius = max_radius * static_cast<double>(r.views) /
                        static_cast<double>(max_views);
        out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << radius
            << "\" fill=\"#cc6677\" fill-opacity=\"0.6\"><title>" << csv_escape(r.name)
            << "</title></circle>\n";
    }
    out << "</svg>\n";
}

}  // namespace eduqa
