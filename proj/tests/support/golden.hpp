#pragma once

// Handcrafted mini-corpus with facts planted verbatim, so end-to-end
// correctness is decidable by construction: 20 videos (10 planted + 10
// distractors) over 4 channels, 2 lessons x 5 topics x 4 questions = 40
// four-choice questions. Every planted sentence "The <subject> of <topic>
// is <answer>." pairs with the question "What is the <subject> of <topic>?".

#include <string>
#include <vector>

#include "eduqa/corpus.hpp"

namespace eduqa::golden {

struct Fixture {
    VideoCorpus videos;
    TqaCorpus tqa;
};

// split_modality: facts 0-1 of each topic stay in the transcript, facts 2-3
// move to the captions (both carry the topic terms so retrieval still finds
// the planted video under any measure).
Fixture build(bool split_modality = false);

// The planted video id for a topic index (0..9).
std::string planted_video_id(std::size_t topic_index);

// Writes videos.jsonl / tqa.json (and a small cvqa.jsonl over the planted
// facts) into dir; returns the three paths.
struct FilePaths {
    std::string videos;
    std::string tqa;
    std::string cvqa;
};
FilePaths write_files(const std::string& dir, bool split_modality = false);

}  // namespace eduqa::golden
