#include "support/golden.hpp"

#include <filesystem>
#include <fstream>

namespace eduqa::golden {

namespace {

struct Fact {
    const char* subject;
    const char* answer;
};

struct TopicSpec {
    const char* topic_word;
    Fact facts[4];
};

// Invented domain nouns keep the planted tokens unique across the corpus.
const TopicSpec kTopics[10] = {
    {"floria", {{"capital", "zunbur"}, {"river", "melkar"}, {"flower", "ostrin"}, {"bird", "kriva"}}},
    {"gravix", {{"unit", "pondel"}, {"inventor", "harvok"}, {"symbol", "gemma"}, {"opposite", "liftan"}}},
    {"thalor", {{"ocean", "virdan"}, {"island", "quorra"}, {"port", "selvin"}, {"current", "ymir"}}},
    {"quarzen", {{"color", "bryln"}, {"hardness", "septim"}, {"source", "caldor"}, {"use", "polvax"}}},
    {"membrix", {{"layer", "tessin"}, {"channel", "porvak"}, {"fuel", "glucor"}, {"shape", "ovalim"}}},
    {"sonette", {{"pitch", "altvar"}, {"speed", "mardel"}, {"medium", "aquilo"}, {"echo", "revnor"}}},
    {"lumivar", {{"spectrum", "iridan"}, {"prism", "veklor"}, {"shadow", "umbrel"}, {"lens", "fornix"}}},
    {"terramod", {{"core", "ferrum"}, {"crust", "basalor"}, {"quake", "tremvin"}, {"vent", "fumarol"}}},
    {"botanica", {{"root", "fibrox"}, {"leaf", "chloran"}, {"seed", "germex"}, {"stem", "xylith"}}},
    {"astrel", {{"planet", "cygnar"}, {"comet", "haldis"}, {"orbit", "kepral"}, {"moon", "selune"}}},
};

const char* kDistractorLines[10] = {
    "today we open a giant box of surprise toys and sing along",
    "the puppy and the kitten play hide and seek in the garden",
    "let us build a tall tower with colorful blocks and balloons",
    "we visit the funfair and ride the carousel with ice cream",
    "drawing a rainbow with crayons is fun for the whole family",
    "the pirate ship sails to the candy cove to find chocolate",
    "we race tiny cars down the ramp and cheer for the winner",
    "the teddy bear has a birthday party with cake and bubbles",
    "splashing in puddles after the rain makes everyone giggle",
    "we learn a silly dance with hats and shakers and drums",
};

std::string question_id(std::size_t topic, std::size_t fact) {
    return "q" + std::to_string(topic) + std::to_string(fact);
}

}  // namespace

std::string planted_video_id(std::size_t topic_index) {
    return "vid_planted_" + std::to_string(topic_index);
}

Fixture build(bool split_modality) {
    Fixture fx;

    // --- videos ---
    for (std::size_t t = 0; t < 10; ++t) {
        const TopicSpec& spec = kTopics[t];
        VideoDoc doc;
        doc.video_id = planted_video_id(t);
        doc.channel_id = t < 5 ? "ch_edu_a" : "ch_edu_b";
        doc.views = 1000 * (t + 1);

        std::string intro = "This video explains " + std::string(spec.topic_word) +
                            " for curious students.";
        std::vector<std::string> fact_sentences;
        for (const Fact& f : spec.facts)
            fact_sentences.push_back("The " + std::string(f.subject) + " of " +
                                     spec.topic_word + " is " + f.answer + ".");

        doc.transcript = intro;
        if (split_modality) {
            // facts 0-1 spoken, facts 2-3 only visible in frames
            doc.transcript += " " + fact_sentences[0] + " " + fact_sentences[1];
            doc.captions = {"a chart about " + std::string(spec.topic_word) + ".",
                            fact_sentences[2], fact_sentences[3]};
        } else {
            for (const auto& s : fact_sentences) doc.transcript += " " + s;
            doc.captions = {"a teacher points at a chart about " +
                            std::string(spec.topic_word) + "."};
        }
        doc.duration_min = static_cast<std::int64_t>(doc.captions.size());

        Channel& ch = fx.videos.channels[doc.channel_id];
        ch.channel_id = doc.channel_id;
        ch.name = doc.channel_id == "ch_edu_a" ? "Edu Lab A" : "Edu Lab B";
        ch.total_views += doc.views;
        ch.video_ids.insert(doc.video_id);
        fx.videos.index[doc.video_id] = fx.videos.videos.size();
        fx.videos.videos.push_back(std::move(doc));
    }
    for (std::size_t d = 0; d < 10; ++d) {
        VideoDoc doc;
        doc.video_id = "vid_toy_" + std::to_string(d);
        doc.channel_id = d < 5 ? "ch_toys_a" : "ch_toys_b";
        doc.views = 50000 * (d + 1);
        doc.transcript = std::string(kDistractorLines[d]) + ". " +
                         kDistractorLines[(d + 3) % 10] + ".";
        doc.captions = {"children playing with toys."};
        doc.duration_min = 1;
        Channel& ch = fx.videos.channels[doc.channel_id];
        ch.channel_id = doc.channel_id;
        ch.name = doc.channel_id == "ch_toys_a" ? "Toy World A" : "Toy World B";
        ch.total_views += doc.views;
        ch.video_ids.insert(doc.video_id);
        fx.videos.index[doc.video_id] = fx.videos.videos.size();
        fx.videos.videos.push_back(std::move(doc));
    }

    // --- tqa tree: 2 lessons x 5 topics x 4 questions ---
    for (std::size_t l = 0; l < 2; ++l) {
        TqaLesson lesson;
        lesson.lesson_id = "lesson" + std::to_string(l);
        lesson.title = "Lesson " + std::to_string(l);
        for (std::size_t ti = 0; ti < 5; ++ti) {
            std::size_t t = l * 5 + ti;
            const TopicSpec& spec = kTopics[t];
            TqaTopic topic;
            topic.topic_id = "topic" + std::to_string(t);
            topic.lesson_id = lesson.lesson_id;
            topic.title = spec.topic_word;
            topic.context = "About " + std::string(spec.topic_word) +
                            ". This lesson covers the " + spec.facts[0].subject + ", the " +
                            spec.facts[1].subject + ", the " + spec.facts[2].subject +
                            " and the " + spec.facts[3].subject + " of " + spec.topic_word +
                            ".";
            for (std::size_t f = 0; f < 4; ++f) {
                TqaQuestion q;
                q.question_id = question_id(t, f);
                q.topic_id = topic.topic_id;
                q.text = "What is the " + std::string(spec.facts[f].subject) + " of " +
                         spec.topic_word + "?";
                q.correct_index = static_cast<int>((t + f) % 4);
                for (std::size_t c = 0; c < 4; ++c) {
                    if (c == static_cast<std::size_t>(q.correct_index)) {
                        q.choices.push_back(spec.facts[f].answer);
                    } else {
                        // wrong options come from other topics' answer words
                        std::size_t ot = (t + 1 + c) % 10;
                        std::size_t of = (f + 1 + c) % 4;
                        q.choices.push_back(kTopics[ot].facts[of].answer);
                    }
                }
                topic.question_ids.push_back(q.question_id);
                fx.tqa.question_index[q.question_id] = fx.tqa.questions.size();
                fx.tqa.questions.push_back(std::move(q));
            }
            lesson.topic_ids.push_back(topic.topic_id);
            fx.tqa.topics[topic.topic_id] = std::move(topic);
        }
        fx.tqa.lessons.push_back(std::move(lesson));
    }
    return fx;
}

FilePaths write_files(const std::string& dir, bool split_modality) {
    std::filesystem::create_directories(dir);
    Fixture fx = build(split_modality);
    FilePaths paths;
    paths.videos = dir + "/videos.jsonl";
    paths.tqa = dir + "/tqa.json";
    paths.cvqa = dir + "/cvqa.jsonl";
    save_videos(fx.videos, paths.videos);
    save_tqa(fx.tqa, paths.tqa);

    std::vector<CvqaRecord> cvqa;
    for (std::size_t t = 0; t < 10; ++t) {
        const TopicSpec& spec = kTopics[t];
        CvqaRecord r;
        r.video_id = planted_video_id(t);
        r.time_s = static_cast<std::int64_t>(30 + t);
        r.question = "What is the " + std::string(spec.facts[0].subject) + " of " +
                     spec.topic_word + "?";
        r.answer = spec.facts[0].answer;
        r.qtype = t % 3 == 0 ? QuestionType::complex_ : QuestionType::simple;
        r.modality = Modality::language;
        r.quality_rating = static_cast<int>(t % 5) + 1;
        cvqa.push_back(std::move(r));
    }
    save_cvqa(cvqa, paths.cvqa);
    return paths;
}

}  // namespace eduqa::golden
