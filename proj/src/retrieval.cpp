#include "eduqa/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "eduqa/binio.hpp"

namespace eduqa {

std::string to_string(Measure m) {
    switch (m) {
        case Measure::transcript: return "transcript";
        case Measure::caption: return "caption";
        default: return "joint";
    }
}

Measure measure_from_string(const std::string& s) {
    if (s == "transcript") return Measure::transcript;
    if (s == "caption") return Measure::caption;
    if (s == "joint") return Measure::joint;
    throw ValidationError("measure must be transcript|caption|joint, got \"" + s + "\"");
}

std::string measure_text(const VideoDoc& video, Measure m) {
    switch (m) {
        case Measure::transcript: return video.transcript;
        case Measure::caption: return video.caption_text();
        default: return video.joint_text();
    }
}

// ---------------------------------------------------------------------------
// BM25
// ---------------------------------------------------------------------------

std::optional<std::size_t> InvertedIndex::row_of(const std::string& doc_id) const {
    auto it = id_to_row_.find(doc_id);
    if (it == id_to_row_.end()) return std::nullopt;
    return it->second;
}

const std::vector<Posting>* InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

InvertedIndex build_inverted_index(const VideoCorpus& corpus, Measure field) {
    if (corpus.videos.empty()) throw ValidationError("cannot index an empty corpus");
    InvertedIndex idx;
    idx.field_ = field;
    idx.doc_ids_.reserve(corpus.videos.size());
    idx.doc_lengths_.reserve(corpus.videos.size());
    std::int64_t total_len = 0;
    for (const auto& video : corpus.videos) {
        std::uint32_t row = static_cast<std::uint32_t>(idx.doc_ids_.size());
        TokenSeq toks = tokenize(normalize(measure_text(video, field)));
        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& t : toks.tokens) ++tf[t];
        for (const auto& [term, count] : tf)
            idx.postings_[term].push_back(Posting{row, count});
        idx.doc_lengths_.push_back(static_cast<std::int64_t>(toks.size()));
        total_len += static_cast<std::int64_t>(toks.size());
        idx.id_to_row_[video.video_id] = row;
        idx.doc_ids_.push_back(video.video_id);
    }
    for (auto& [term, list] : idx.postings_)
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
    idx.avg_doc_len_ =
        idx.doc_ids_.empty() ? 0.0 : static_cast<double>(total_len) / idx.doc_ids_.size();
    return idx;
}

double bm25_idf(std::size_t n_docs, std::size_t df) {
    return std::log(1.0 + (static_cast<double>(n_docs) - static_cast<double>(df) + 0.5) /
                              (static_cast<double>(df) + 0.5));
}

namespace {

double bm25_term_weight(std::uint32_t tf, std::int64_t doc_len, double avg_len,
                        const Bm25Params& p) {
    double len_norm = avg_len > 0.0 ? static_cast<double>(doc_len) / avg_len : 0.0;
    double denom = tf + p.k1 * (1.0 - p.b + p.b * len_norm);
    return static_cast<double>(tf) * (p.k1 + 1.0) / denom;
}

}  // namespace

double bm25_score(const TokenSeq& query, const std::string& doc_id, const InvertedIndex& index,
                  const Bm25Params& params) {
    auto row = index.row_of(doc_id);
    if (!row) throw ValidationError("unknown doc id \"" + doc_id + "\"");
    double score = 0.0;
    for (const auto& term : query.tokens) {
        const auto* list = index.postings(term);
        if (!list) continue;
        auto it = std::lower_bound(list->begin(), list->end(), *row,
                                   [](const Posting& p, std::size_t r) { return p.doc < r; });
        if (it == list->end() || it->doc != *row) continue;
        score += bm25_idf(index.doc_count(), list->size()) *
                 bm25_term_weight(it->tf, index.doc_length(*row), index.avg_doc_len(), params);
    }
    return score;
}

namespace {

std::vector<ScoredDoc> rank_all(std::vector<ScoredDoc> scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.video_id < b.video_id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace

std::vector<ScoredDoc> retrieve_topk(const std::string& topic_text, const InvertedIndex& index,
                                     std::size_t k, const Bm25Params& params) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (index.doc_count() == 0) throw ValidationError("empty index");
    TokenSeq query = tokenize(normalize(topic_text));
    std::vector<double> acc(index.doc_count(), 0.0);
    for (const auto& term : query.tokens) {
        const auto* list = index.postings(term);
        if (!list) continue;
        double idf = bm25_idf(index.doc_count(), list->size());
        for (const Posting& p : *list)
            acc[p.doc] += idf * bm25_term_weight(p.tf, index.doc_length(p.doc),
                                                 index.avg_doc_len(), params);
    }
    std::vector<ScoredDoc> scored;
    scored.reserve(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i)
        scored.push_back(ScoredDoc{index.doc_ids()[i], acc[i]});
    return rank_all(std::move(scored), k);
}

void InvertedIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write index file: " + path);
    out.write("EDQB", 4);
    binio::write_u32(out, 1);
    binio::write_u32(out, static_cast<std::uint32_t>(field_));
    binio::write_u64(out, doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        binio::write_string(out, doc_ids_[i]);
        binio::write_u64(out, static_cast<std::uint64_t>(doc_lengths_[i]));
    }
    // terms sorted for a canonical byte stream
    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, list] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    binio::write_u64(out, terms.size());
    for (const std::string* term : terms) {
        binio::write_string(out, *term);
        const auto& list = postings_.at(*term);
        binio::write_u64(out, list.size());
        for (const Posting& p : list) {
            binio::write_u32(out, p.doc);
            binio::write_u32(out, p.tf);
        }
    }
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("index file not found: " + path);
    binio::expect_magic(in, "EDQB", path);
    std::uint32_t version = binio::read_u32(in, path);
    if (version != 1) throw ValidationError(path + ": unsupported version");
    InvertedIndex idx;
    idx.field_ = static_cast<Measure>(binio::read_u32(in, path));
    std::uint64_t n_docs = binio::read_u64(in, path);
    std::int64_t total_len = 0;
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        std::string id = binio::read_string(in, path);
        std::int64_t len = static_cast<std::int64_t>(binio::read_u64(in, path));
        idx.id_to_row_[id] = idx.doc_ids_.size();
        idx.doc_ids_.push_back(std::move(id));
        idx.doc_lengths_.push_back(len);
        total_len += len;
    }
    std::uint64_t n_terms = binio::read_u64(in, path);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        std::string term = binio::read_string(in, path);
        std::uint64_t n_postings = binio::read_u64(in, path);
        std::vector<Posting> list(n_postings);
        for (auto& p : list) {
            p.doc = binio::read_u32(in, path);
            p.tf = binio::read_u32(in, path);
        }
        idx.postings_[std::move(term)] = std::move(list);
    }
    idx.avg_doc_len_ = n_docs > 0 ? static_cast<double>(total_len) / n_docs : 0.0;
    return idx;
}

// ---------------------------------------------------------------------------
// Dense encoders + index
// ---------------------------------------------------------------------------

Encoder Encoder::subword(const EmbedModel* base, std::size_t out_dim, std::uint64_t seed) {
    if (!base) throw Error("Encoder: null base embedder");
    Encoder e;
    e.kind_ = Kind::subword_projection;
    e.base_ = base;
    e.projection_ = Matrix(out_dim, static_cast<std::size_t>(base->dim()));
    std::mt19937_64 rng(seed);
    double scale = 1.0 / std::sqrt(static_cast<double>(base->dim()));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (auto& x : e.projection_.data) x = dist(rng);
    return e;
}

Encoder Encoder::external(std::unordered_map<std::string, Vector> vectors) {
    Encoder e;
    e.kind_ = Kind::external;
    e.external_ = std::move(vectors);
    return e;
}

std::size_t Encoder::out_dim() const {
    if (kind_ == Kind::subword_projection) return projection_.rows;
    if (external_.empty()) return 0;
    return external_.begin()->second.size();
}

Vector Encoder::encode(const std::string& text) const {
    if (kind_ == Kind::subword_projection)
        return matvec(projection_, base_->embed(normalize(text)));
    auto it = external_.find(text);
    if (it == external_.end())
        throw ValidationError("external encoder has no vector for key \"" + text + "\"");
    return it->second;
}

Vector encode_topic(const std::string& topic_text, const Encoder& enc) {
    return enc.encode(topic_text);
}

Vector encode_transcript(const std::string& transcript, const Encoder& enc) {
    return enc.encode(transcript);
}

Vector encode_captions(const std::vector<std::string>& captions, const Encoder& enc) {
    std::string joined;
    for (const auto& c : captions) {
        if (c.empty()) continue;
        if (!joined.empty()) joined.push_back(' ');
        joined += c;
    }
    return enc.encode(joined);
}

double similarity(const Vector& topic_vec, const VideoDoc& video, const Encoder& video_enc,
                  Measure measure) {
    switch (measure) {
        case Measure::transcript:
            return dot(topic_vec, encode_transcript(video.transcript, video_enc));
        case Measure::caption:
            return dot(topic_vec, encode_captions(video.captions, video_enc));
        default:
            return dot(topic_vec, encode_transcript(video.transcript, video_enc)) +
                   dot(topic_vec, encode_captions(video.captions, video_enc));
    }
}

void DenseIndex::add(const std::string& video_id, const Vector& v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_)
        throw Error("DenseIndex: row dim " + std::to_string(v.size()) + " != " +
                    std::to_string(dim_));
    for (double x : v) rows_.push_back(static_cast<float>(x));
    ids_.push_back(video_id);
}

void DenseIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write dense index: " + path);
    out.write("EDQI", 4);
    binio::write_u32(out, 1);
    binio::write_u32(out, static_cast<std::uint32_t>(measure_));
    binio::write_u64(out, ids_.size());
    binio::write_u64(out, dim_);
    out.write(reinterpret_cast<const char*>(rows_.data()),
              static_cast<std::streamsize>(rows_.size() * sizeof(float)));
    for (const auto& id : ids_) binio::write_string(out, id);
}

DenseIndex DenseIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("dense index not found: " + path);
    binio::expect_magic(in, "EDQI", path);
    std::uint32_t version = binio::read_u32(in, path);
    if (version != 1) throw ValidationError(path + ": unsupported version");
    Measure measure = static_cast<Measure>(binio::read_u32(in, path));
    std::uint64_t n = binio::read_u64(in, path);
    std::uint64_t dim = binio::read_u64(in, path);
    DenseIndex idx(measure, dim);
    idx.rows_.resize(n * dim);
    if (n * dim > 0 &&
        !in.read(reinterpret_cast<char*>(idx.rows_.data()),
                 static_cast<std::streamsize>(n * dim * sizeof(float))))
        throw ValidationError("truncated dense index: " + path);
    for (std::uint64_t i = 0; i < n; ++i) idx.ids_.push_back(binio::read_string(in, path));
    return idx;
}

DenseIndex build_dense_index(const VideoCorpus& corpus, const Encoder& video_enc,
                             Measure measure) {
    std::size_t d = video_enc.out_dim();
    DenseIndex idx(measure, measure == Measure::joint ? 2 * d : d);
    for (const auto& video : corpus.videos) {
        if (measure == Measure::transcript) {
            idx.add(video.video_id, encode_transcript(video.transcript, video_enc));
        } else if (measure == Measure::caption) {
            idx.add(video.video_id, encode_captions(video.captions, video_enc));
        } else {
            Vector t = encode_transcript(video.transcript, video_enc);
            Vector f = encode_captions(video.captions, video_enc);
            t.insert(t.end(), f.begin(), f.end());
            idx.add(video.video_id, t);
        }
    }
    return idx;
}

Vector dense_query(const std::string& topic_text, const Encoder& topic_enc, Measure measure) {
    Vector q = encode_topic(topic_text, topic_enc);
    if (measure == Measure::joint) {
        Vector dup = q;
        q.insert(q.end(), dup.begin(), dup.end());
    }
    return q;
}

std::vector<ScoredDoc> retrieve_topk(const Vector& query, const DenseIndex& index,
                                     std::size_t k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (index.size() == 0) throw ValidationError("empty index");
    if (query.size() != index.dim())
        throw Error("query dim " + std::to_string(query.size()) + " != index dim " +
                    std::to_string(index.dim()));
    std::vector<ScoredDoc> scored;
    scored.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        const float* row = index.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < index.dim(); ++j) s += query[j] * row[j];
        scored.push_back(ScoredDoc{index.ids()[i], s});
    }
    return rank_all(std::move(scored), k);
}

// ---------------------------------------------------------------------------
// Pseudo-label mining
// ---------------------------------------------------------------------------

namespace {

// True when every stemmed gold token appears in the document stem multiset
// (duplicates in gold require duplicates in the document).
bool contains_all_gold_stems(const std::string& doc_text, const std::string& gold) {
    std::vector<std::string> gold_stems = stem_tokens(gold);
    if (gold_stems.empty()) return true;
    std::unordered_map<std::string, int> have;
    for (const auto& s : stem_tokens(doc_text)) ++have[s];
    std::unordered_map<std::string, int> need;
    for (const auto& s : gold_stems) ++need[s];
    for (const auto& [s, n] : need) {
        auto it = have.find(s);
        if (it == have.end() || it->second < n) return false;
    }
    return true;
}

}  // namespace

std::vector<TrainingInstance> mine_pseudo_labels(const std::vector<MiningQuestion>& questions,
                                                 const VideoCorpus& corpus,
                                                 const InvertedIndex& index, const ReadFn& read,
                                                 const JudgeFn& judge, std::size_t top_m) {
    std::vector<TrainingInstance> out;
    for (const auto& q : questions) {
        auto top = retrieve_topk(q.query_text, index, top_m);
        TrainingInstance inst;
        inst.question_id = q.question_id;
        inst.query_text = q.query_text;
        inst.gold_answer = q.gold_answer;
        std::unordered_set<std::string> pos_set;
        for (const auto& hit : top) {
            const VideoDoc* video = corpus.find(hit.video_id);
            if (!video) continue;
            std::string context = measure_text(*video, index.field());
            std::string predicted = read(context, q.query_text);
            if (judge(predicted, q.gold_answer)) {
                inst.positives.push_back(hit.video_id);
                pos_set.insert(hit.video_id);
            }
        }
        for (const auto& hit : top) {
            if (pos_set.count(hit.video_id)) continue;
            const VideoDoc* video = corpus.find(hit.video_id);
            if (!video) continue;
            if (!contains_all_gold_stems(measure_text(*video, index.field()), q.gold_answer))
                inst.negatives.push_back(hit.video_id);
        }
        if (!inst.positives.empty()) out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Contrastive loss + training
// ---------------------------------------------------------------------------

PreparedInstance prepare_instance(const TrainingInstance& inst, const VideoCorpus& corpus,
                                  Measure measure, const EmbedModel& base) {
    PreparedInstance p;
    p.query = base.embed(normalize(inst.query_text));
    auto video_base = [&](const std::string& id) -> Vector {
        const VideoDoc* video = corpus.find(id);
        if (!video) throw ValidationError("training instance references unknown video \"" + id + "\"");
        if (measure == Measure::joint) {
            // sim_v is additive over measures and the projection is linear,
            // so the joint base embedding is the sum of the two parts.
            Vector t = base.embed(normalize(video->transcript));
            Vector f = base.embed(normalize(video->caption_text()));
            for (std::size_t i = 0; i < t.size(); ++i) t[i] += f[i];
            return t;
        }
        return base.embed(normalize(measure_text(*video, measure)));
    };
    for (const auto& id : inst.positives) p.positives.push_back(video_base(id));
    for (const auto& id : inst.negatives) p.negatives.push_back(video_base(id));
    return p;
}

ContrastiveGrad contrastive_loss(const std::vector<PreparedInstance>& batch,
                                 const Encoder& topic_enc, const Encoder& video_enc) {
    const Matrix& pt = topic_enc.projection();
    const Matrix& pv = video_enc.projection();
    ContrastiveGrad g;
    g.d_topic = Matrix(pt.rows, pt.cols);
    g.d_video = Matrix(pv.rows, pv.cols);

    auto add_outer = [](Matrix& m, double coef, const Vector& left, const Vector& right) {
        for (std::size_t i = 0; i < m.rows; ++i) {
            double li = coef * left[i];
            if (li == 0.0) continue;
            double* row = m.row(i);
            for (std::size_t j = 0; j < m.cols; ++j) row[j] += li * right[j];
        }
    };

    for (const auto& inst : batch) {
        if (inst.positives.empty())
            throw ValidationError("contrastive_loss: instance with zero positives");
        Vector q = matvec(pt, inst.query);
        std::vector<Vector> pos, neg;
        std::vector<double> s_pos, s_neg;
        for (const auto& b : inst.positives) {
            pos.push_back(matvec(pv, b));
            s_pos.push_back(dot(q, pos.back()));
        }
        for (const auto& b : inst.negatives) {
            neg.push_back(matvec(pv, b));
            s_neg.push_back(dot(q, neg.back()));
        }

        std::vector<double> coef_neg(neg.size(), 0.0);
        // dL/dq accumulates over all pairs so the topic gradient is one outer
        // product per instance.
        Vector dq(q.size(), 0.0);
        for (std::size_t k = 0; k < pos.size(); ++k) {
            double mx = s_pos[k];
            for (double s : s_neg) mx = std::max(mx, s);
            double z = std::exp(s_pos[k] - mx);
            double zsum = z;
            for (double s : s_neg) zsum += std::exp(s - mx);
            double p = z / zsum;
            g.loss += -(std::log(p));
            double cp = p - 1.0;  // dL/ds+_k
            for (std::size_t i = 0; i < dq.size(); ++i) dq[i] += cp * pos[k][i];
            add_outer(g.d_video, cp, q, inst.positives[k]);
            for (std::size_t j = 0; j < neg.size(); ++j) {
                double w = std::exp(s_neg[j] - mx) / zsum;  // dL/ds-_j for this positive
                coef_neg[j] += w;
                for (std::size_t i = 0; i < dq.size(); ++i) dq[i] += w * neg[j][i];
            }
        }
        for (std::size_t j = 0; j < neg.size(); ++j)
            add_outer(g.d_video, coef_neg[j], q, inst.negatives[j]);
        add_outer(g.d_topic, 1.0, dq, inst.query);
    }
    return g;
}

TrainedRetriever train_retriever(const std::vector<TrainingInstance>& instances,
                                 const VideoCorpus& corpus, Measure measure,
                                 const EmbedModel& base, const TrainConfig& config) {
    if (instances.empty()) throw ValidationError("train_retriever: empty instance set");

    std::vector<PreparedInstance> prepared;
    prepared.reserve(instances.size());
    for (const auto& inst : instances)
        prepared.push_back(prepare_instance(inst, corpus, measure, base));

    TrainedRetriever result{
        Encoder::subword(&base, config.dense_dim, config.seed * 2 + 1),
        Encoder::subword(&base, config.dense_dim, config.seed * 2 + 2),
        {}};

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(prepared.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Matrix acc_topic(result.topic.projection().rows, result.topic.projection().cols);
    Matrix acc_video(result.video.projection().rows, result.video.projection().cols);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t pending = 0;      // instances in the current accumulation group
        std::size_t batches_in_group = 0;

        std::fill(acc_topic.data.begin(), acc_topic.data.end(), 0.0);
        std::fill(acc_video.data.begin(), acc_video.data.end(), 0.0);

        auto apply_step = [&]() {
            if (pending == 0) return;
            double inv = 1.0 / static_cast<double>(pending);
            auto& pt = result.topic.projection();
            auto& pv = result.video.projection();
            for (std::size_t i = 0; i < pt.data.size(); ++i)
                pt.data[i] -= config.lr * (acc_topic.data[i] * inv + config.weight_decay * pt.data[i]);
            for (std::size_t i = 0; i < pv.data.size(); ++i)
                pv.data[i] -= config.lr * (acc_video.data[i] * inv + config.weight_decay * pv.data[i]);
            std::fill(acc_topic.data.begin(), acc_topic.data.end(), 0.0);
            std::fill(acc_video.data.begin(), acc_video.data.end(), 0.0);
            pending = 0;
            batches_in_group = 0;
        };

        for (std::size_t start = 0; start < order.size(); start += config.batch) {
            std::vector<PreparedInstance> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch); ++i)
                batch.push_back(prepared[order[i]]);
            ContrastiveGrad g = contrastive_loss(batch, result.topic, result.video);
            if (std::isnan(g.loss) || std::isinf(g.loss)) {
                result.report.diverged = true;
                result.report.epoch_loss.push_back(g.loss);
                return result;
            }
            epoch_loss += g.loss;
            for (std::size_t i = 0; i < acc_topic.data.size(); ++i)
                acc_topic.data[i] += g.d_topic.data[i];
            for (std::size_t i = 0; i < acc_video.data.size(); ++i)
                acc_video.data[i] += g.d_video.data[i];
            pending += batch.size();
            if (++batches_in_group >= config.accum_steps) apply_step();
        }
        apply_step();
        result.report.epoch_loss.push_back(epoch_loss / static_cast<double>(prepared.size()));
    }
    return result;
}

void save_encoders(const Encoder& topic, const Encoder& video, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write encoder file: " + path);
    out.write("EDQE", 4);
    binio::write_u32(out, 1);
    struct Section {
        const char* name;
        const Matrix* m;
    };
    const Section sections[] = {{"topic", &topic.projection()}, {"video", &video.projection()}};
    binio::write_u32(out, 2);
    for (const auto& s : sections) {
        binio::write_string(out, s.name);
        binio::write_u64(out, s.m->rows);
        binio::write_u64(out, s.m->cols);
    }
    for (const auto& s : sections) binio::write_matrix_f32(out, *s.m);
}

std::pair<Encoder, Encoder> load_encoders(const std::string& path, const EmbedModel* base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("encoder file not found: " + path);
    binio::expect_magic(in, "EDQE", path);
    std::uint32_t version = binio::read_u32(in, path);
    if (version != 1) throw ValidationError(path + ": unsupported version");
    std::uint32_t n = binio::read_u32(in, path);
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::uint32_t i = 0; i < n; ++i) {
        names.push_back(binio::read_string(in, path));
        std::size_t rows = binio::read_u64(in, path);
        std::size_t cols = binio::read_u64(in, path);
        shapes.emplace_back(rows, cols);
    }
    Matrix topic_m, video_m;
    for (std::uint32_t i = 0; i < n; ++i) {
        Matrix m = binio::read_matrix_f32(in, shapes[i].first, shapes[i].second, path);
        if (names[i] == "topic") topic_m = std::move(m);
        else if (names[i] == "video") video_m = std::move(m);
    }
    if (topic_m.rows == 0 || video_m.rows == 0)
        throw ValidationError(path + ": missing topic/video sections");
    Encoder topic = Encoder::subword(base, topic_m.rows, 0);
    Encoder video = Encoder::subword(base, video_m.rows, 0);
    topic.projection() = std::move(topic_m);
    video.projection() = std::move(video_m);
    return {std::move(topic), std::move(video)};
}

}  // namespace eduqa
