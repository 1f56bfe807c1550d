#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "eduqa/error.hpp"

namespace eduqa {

// One video: transcript text plus per-minute frame captions.
struct VideoDoc {
    std::string video_id;
    std::string channel_id;
    std::string transcript;               // non-empty after validation
    std::vector<std::string> captions;    // frame order; may be empty
    std::int64_t duration_min = 0;
    std::int64_t views = 0;

    // All captions joined with single spaces, frame order.
    std::string caption_text() const;
    // transcript + " " + caption_text (either part may be absent).
    std::string joint_text() const;
};

struct Channel {
    std::string channel_id;
    std::string name;
    std::int64_t total_views = 0;
    std::int64_t subscriber_count = 0;
    std::set<std::string> video_ids;

    std::size_t video_count() const { return video_ids.size(); }
};

struct TqaQuestion {
    std::string question_id;
    std::string topic_id;
    std::string text;
    std::vector<std::string> choices;  // 2..4 options
    int correct_index = 0;

    const std::string& gold_text() const { return choices[static_cast<std::size_t>(correct_index)]; }
};

struct TqaTopic {
    std::string topic_id;
    std::string lesson_id;
    std::string title;
    std::string context;
    std::vector<std::string> question_ids;
};

struct TqaLesson {
    std::string lesson_id;
    std::string title;
    std::vector<std::string> topic_ids;
};

enum class QuestionType { simple, complex_ };
enum class Modality { visual, language, both };

struct CvqaRecord {
    std::string video_id;
    std::int64_t time_s = 0;
    std::string question;
    std::string answer;
    QuestionType qtype = QuestionType::simple;
    Modality modality = Modality::language;
    int quality_rating = 3;  // 1..5
};

std::string to_string(QuestionType t);
std::string to_string(Modality m);
QuestionType question_type_from_string(const std::string& s);
Modality modality_from_string(const std::string& s);

// Non-fatal findings collected during ingestion.
struct LoadReport {
    std::vector<std::string> warnings;
};

// Immutable after load; safe for concurrent readers.
struct VideoCorpus {
    std::vector<VideoDoc> videos;                       // ingestion order
    std::map<std::string, Channel> channels;            // keyed by channel_id
    std::unordered_map<std::string, std::size_t> index; // video_id -> position

    const VideoDoc* find(const std::string& video_id) const;
    std::size_t size() const { return videos.size(); }
};

struct TqaCorpus {
    std::vector<TqaLesson> lessons;
    std::map<std::string, TqaTopic> topics;
    std::vector<TqaQuestion> questions;                 // document order
    std::unordered_map<std::string, std::size_t> question_index;

    const TqaQuestion* find_question(const std::string& question_id) const;
    std::vector<const TqaQuestion*> questions_of_topic(const std::string& topic_id) const;
    std::map<std::string, std::size_t> questions_per_lesson() const;
};

// videos.jsonl: one object per line with keys video_id, channel_id,
// channel_name, transcript, captions, duration_min, views.
VideoCorpus load_videos(const std::string& path, LoadReport* report = nullptr);
void save_videos(const VideoCorpus& corpus, const std::string& path);

// tqa.json: {lessons:[{lesson_id,title,topics:[{topic_id,title,context,
// questions:[{question_id,text,choices,correct_index}]}]}]}
TqaCorpus load_tqa(const std::string& path);
void save_tqa(const TqaCorpus& corpus, const std::string& path);

// cvqa.jsonl: keys video_id, time ("MM:SS"), question, answer, qtype,
// modality, quality_rating.
std::vector<CvqaRecord> load_cvqa(const std::string& path);
void save_cvqa(const std::vector<CvqaRecord>& records, const std::string& path);

// "MM:SS" (or "H:MM:SS") -> seconds.
std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t seconds);

}  // namespace eduqa
