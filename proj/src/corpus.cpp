#include "eduqa/corpus.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace eduqa {

using json = nlohmann::ordered_json;

std::string VideoDoc::caption_text() const {
    std::string out;
    for (const auto& c : captions) {
        if (c.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += c;
    }
    return out;
}

std::string VideoDoc::joint_text() const {
    std::string caps = caption_text();
    if (caps.empty()) return transcript;
    if (transcript.empty()) return caps;
    return transcript + " " + caps;
}

std::string to_string(QuestionType t) {
    return t == QuestionType::simple ? "simple" : "complex";
}

std::string to_string(Modality m) {
    switch (m) {
        case Modality::visual: return "visual";
        case Modality::language: return "language";
        default: return "both";
    }
}

QuestionType question_type_from_string(const std::string& s) {
    if (s == "simple") return QuestionType::simple;
    if (s == "complex") return QuestionType::complex_;
    throw ValidationError("qtype must be simple|complex, got \"" + s + "\"");
}

Modality modality_from_string(const std::string& s) {
    if (s == "visual") return Modality::visual;
    if (s == "language") return Modality::language;
    if (s == "both") return Modality::both;
    throw ValidationError("modality must be visual|language|both, got \"" + s + "\"");
}

const VideoDoc* VideoCorpus::find(const std::string& video_id) const {
    auto it = index.find(video_id);
    return it == index.end() ? nullptr : &videos[it->second];
}

const TqaQuestion* TqaCorpus::find_question(const std::string& question_id) const {
    auto it = question_index.find(question_id);
    return it == question_index.end() ? nullptr : &questions[it->second];
}

std::vector<const TqaQuestion*> TqaCorpus::questions_of_topic(const std::string& topic_id) const {
    std::vector<const TqaQuestion*> out;
    for (const auto& q : questions)
        if (q.topic_id == topic_id) out.push_back(&q);
    return out;
}

std::map<std::string, std::size_t> TqaCorpus::questions_per_lesson() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& lesson : lessons) {
        std::size_t n = 0;
        for (const auto& tid : lesson.topic_ids) {
            auto it = topics.find(tid);
            if (it != topics.end()) n += it->second.question_ids.size();
        }
        counts[lesson.lesson_id] = n;
    }
    return counts;
}

namespace {

json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": malformed record: " + e.what());
    }
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(where + ": missing field \"" + std::string(key) + "\"");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require_key(obj, key, where);
    if (!v.is_string())
        throw ValidationError(where + ": field \"" + std::string(key) + "\" must be a string");
    return v.get<std::string>();
}

std::int64_t require_nonneg_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require_key(obj, key, where);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ValidationError(where + ": field \"" + std::string(key) +
                              "\" must be a non-negative integer");
    return v.get<std::int64_t>();
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    std::vector<std::int64_t> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            if (cur.empty()) throw ValidationError("bad timestamp \"" + text + "\"");
            parts.push_back(std::stoll(cur));
            cur.clear();
        } else if (c >= '0' && c <= '9') {
            cur.push_back(c);
        } else {
            throw ValidationError("bad timestamp \"" + text + "\"");
        }
    }
    if (cur.empty()) throw ValidationError("bad timestamp \"" + text + "\"");
    parts.push_back(std::stoll(cur));
    if (parts.size() < 2 || parts.size() > 3)
        throw ValidationError("timestamp must be MM:SS or H:MM:SS, got \"" + text + "\"");
    for (std::size_t i = 1; i < parts.size(); ++i)
        if (parts[i] >= 60)
            throw ValidationError("timestamp component out of range in \"" + text + "\"");
    std::int64_t s = 0;
    for (std::int64_t p : parts) s = s * 60 + p;
    return s;
}

std::string format_timestamp(std::int64_t seconds) {
    std::int64_t m = seconds / 60;
    std::int64_t s = seconds % 60;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%02lld:%02lld", static_cast<long long>(m),
                  static_cast<long long>(s));
    return buf;
}

VideoCorpus load_videos(const std::string& path, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw ValidationError("videos file not found: " + path);
    VideoCorpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        json rec = parse_line(line, path, lineno);

        VideoDoc doc;
        doc.video_id = require_string(rec, "video_id", where);
        doc.channel_id = require_string(rec, "channel_id", where);
        std::string channel_name = require_string(rec, "channel_name", where);
        doc.transcript = require_string(rec, "transcript", where);
        if (doc.transcript.empty())
            throw ValidationError(where + ": video " + doc.video_id +
                                  " has an empty transcript");
        const json& caps = require_key(rec, "captions", where);
        if (!caps.is_array())
            throw ValidationError(where + ": field \"captions\" must be an array of strings");
        for (const auto& c : caps) {
            if (!c.is_string())
                throw ValidationError(where + ": captions entries must be strings");
            doc.captions.push_back(c.get<std::string>());
        }
        doc.duration_min = require_nonneg_int(rec, "duration_min", where);
        doc.views = require_nonneg_int(rec, "views", where);

        if (corpus.index.count(doc.video_id))
            throw ValidationError(where + ": duplicate video_id \"" + doc.video_id + "\"");
        if (report && doc.duration_min > 0 &&
            doc.captions.size() != static_cast<std::size_t>(doc.duration_min)) {
            report->warnings.push_back(
                "video " + doc.video_id + ": " + std::to_string(doc.captions.size()) +
                " captions but duration_min=" + std::to_string(doc.duration_min));
        }

        Channel& ch = corpus.channels[doc.channel_id];
        ch.channel_id = doc.channel_id;
        if (ch.name.empty()) ch.name = channel_name;
        ch.total_views += doc.views;
        ch.video_ids.insert(doc.video_id);

        corpus.index[doc.video_id] = corpus.videos.size();
        corpus.videos.push_back(std::move(doc));
    }
    return corpus;
}

void save_videos(const VideoCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write videos file: " + path);
    // Canonical form: ids ascending, fixed key order.
    std::vector<const VideoDoc*> order;
    order.reserve(corpus.videos.size());
    for (const auto& v : corpus.videos) order.push_back(&v);
    std::sort(order.begin(), order.end(),
              [](const VideoDoc* a, const VideoDoc* b) { return a->video_id < b->video_id; });
    for (const VideoDoc* v : order) {
        json rec;
        rec["video_id"] = v->video_id;
        rec["channel_id"] = v->channel_id;
        rec["channel_name"] = corpus.channels.at(v->channel_id).name;
        rec["transcript"] = v->transcript;
        rec["captions"] = v->captions;
        rec["duration_min"] = v->duration_min;
        rec["views"] = v->views;
        out << rec.dump() << '\n';
    }
}

TqaCorpus load_tqa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("tqa file not found: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError(path + ": malformed document: " + std::string(e.what()));
    }
    TqaCorpus corpus;
    const json& lessons = require_key(doc, "lessons", path);
    if (!lessons.is_array()) throw ValidationError(path + ": \"lessons\" must be an array");
    for (const auto& lj : lessons) {
        TqaLesson lesson;
        lesson.lesson_id = require_string(lj, "lesson_id", path);
        lesson.title = require_string(lj, "title", path);
        const json& topics = require_key(lj, "topics", path);
        if (!topics.is_array())
            throw ValidationError(path + ": lesson " + lesson.lesson_id +
                                  ": \"topics\" must be an array");
        for (const auto& tj : topics) {
            TqaTopic topic;
            topic.topic_id = require_string(tj, "topic_id", path);
            topic.lesson_id = lesson.lesson_id;
            topic.title = require_string(tj, "title", path);
            topic.context = require_string(tj, "context", path);
            if (corpus.topics.count(topic.topic_id))
                throw ValidationError(path + ": duplicate topic_id \"" + topic.topic_id + "\"");
            const json& questions = require_key(tj, "questions", path);
            if (!questions.is_array())
                throw ValidationError(path + ": topic " + topic.topic_id +
                                      ": \"questions\" must be an array");
            for (const auto& qj : questions) {
                TqaQuestion q;
                q.question_id = require_string(qj, "question_id", path);
                q.topic_id = topic.topic_id;
                q.text = require_string(qj, "text", path);
                const json& choices = require_key(qj, "choices", path);
                if (!choices.is_array())
                    throw ValidationError(path + ": question " + q.question_id +
                                          ": \"choices\" must be an array");
                for (const auto& c : choices) q.choices.push_back(c.get<std::string>());
                if (q.choices.size() < 2 || q.choices.size() > 4)
                    throw ValidationError(path + ": question " + q.question_id + " has " +
                                          std::to_string(q.choices.size()) +
                                          " choices, want 2..4");
                const json& ci = require_key(qj, "correct_index", path);
                if (!ci.is_number_integer())
                    throw ValidationError(path + ": question " + q.question_id +
                                          ": \"correct_index\" must be an integer");
                q.correct_index = ci.get<int>();
                if (q.correct_index < 0 ||
                    q.correct_index >= static_cast<int>(q.choices.size()))
                    throw ValidationError(path + ": question " + q.question_id +
                                          ": correct_index " +
                                          std::to_string(q.correct_index) +
                                          " out of range for " +
                                          std::to_string(q.choices.size()) + " choices");
                if (corpus.question_index.count(q.question_id))
                    throw ValidationError(path + ": duplicate question_id \"" +
                                          q.question_id + "\"");
                topic.question_ids.push_back(q.question_id);
                corpus.question_index[q.question_id] = corpus.questions.size();
                corpus.questions.push_back(std::move(q));
            }
            lesson.topic_ids.push_back(topic.topic_id);
            corpus.topics[topic.topic_id] = std::move(topic);
        }
        corpus.lessons.push_back(std::move(lesson));
    }
    // every question's topic resolves (guaranteed by construction above, but
    // kept as a defensive check against future loaders)
    for (const auto& q : corpus.questions)
        if (!corpus.topics.count(q.topic_id))
            throw ValidationError(path + ": question " + q.question_id +
                                  " references unknown topic \"" + q.topic_id + "\"");
    return corpus;
}

void save_tqa(const TqaCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write tqa file: " + path);
    json doc;
    doc["lessons"] = json::array();
    for (const auto& lesson : corpus.lessons) {
        json lj;
        lj["lesson_id"] = lesson.lesson_id;
        lj["title"] = lesson.title;
        lj["topics"] = json::array();
        for (const auto& tid : lesson.topic_ids) {
            const TqaTopic& topic = corpus.topics.at(tid);
            json tj;
            tj["topic_id"] = topic.topic_id;
            tj["title"] = topic.title;
            tj["context"] = topic.context;
            tj["questions"] = json::array();
            for (const auto& qid : topic.question_ids) {
                const TqaQuestion& q = *corpus.find_question(qid);
                json qj;
                qj["question_id"] = q.question_id;
                qj["text"] = q.text;
                qj["choices"] = q.choices;
                qj["correct_index"] = q.correct_index;
                tj["questions"].push_back(std::move(qj));
            }
            lj["topics"].push_back(std::move(tj));
        }
        doc["lessons"].push_back(std::move(lj));
    }
    out << doc.dump(2) << '\n';
}

std::vector<CvqaRecord> load_cvqa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cvqa file not found: " + path);
    std::vector<CvqaRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        json rec = parse_line(line, path, lineno);
        CvqaRecord r;
        r.video_id = require_string(rec, "video_id", where);
        r.time_s = parse_timestamp(require_string(rec, "time", where));
        r.question = require_string(rec, "question", where);
        r.answer = require_string(rec, "answer", where);
        try {
            r.qtype = question_type_from_string(require_string(rec, "qtype", where));
            r.modality = modality_from_string(require_string(rec, "modality", where));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        const json& qr = require_key(rec, "quality_rating", where);
        if (!qr.is_number_integer() || qr.get<int>() < 1 || qr.get<int>() > 5)
            throw ValidationError(where + ": quality_rating must be an integer in [1,5]");
        r.quality_rating = qr.get<int>();
        records.push_back(std::move(r));
    }
    return records;
}

void save_cvqa(const std::vector<CvqaRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write cvqa file: " + path);
    for (const auto& r : records) {
        json rec;
        rec["video_id"] = r.video_id;
        rec["time"] = format_timestamp(r.time_s);
        rec["question"] = r.question;
        rec["answer"] = r.answer;
        rec["qtype"] = to_string(r.qtype);
        rec["modality"] = to_string(r.modality);
        rec["quality_rating"] = r.quality_rating;
        out << rec.dump() << '\n';
    }
}

}  // namespace eduqa
