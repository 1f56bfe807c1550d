#include "eduqa/reader.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "eduqa/binio.hpp"
#include "eduqa/retrieval.hpp"  // bm25_idf

namespace eduqa {

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

Matrix attention_full(const Matrix& q, const Matrix& k, const Matrix& v) {
    if (q.cols != k.cols || q.rows != k.rows || k.rows != v.rows)
        throw Error("attention_full: shape mismatch");
    const std::size_t n = q.rows;
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols));
    Matrix out(n, v.cols);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < q.cols; ++d) s += q(i, d) * k(j, d);
            scores[j] = s * scale;
        }
        softmax_inplace(scores.data(), n);
        for (std::size_t j = 0; j < n; ++j) {
            double w = scores[j];
            if (w == 0.0) continue;
            const double* vr = v.row(j);
            double* orow = out.row(i);
            for (std::size_t d = 0; d < v.cols; ++d) orow[d] += w * vr[d];
        }
    }
    return out;
}

Matrix attention_sliding(const Matrix& qs, const Matrix& ks, const Matrix& vs, int w,
                         const std::vector<bool>& global_mask, const Matrix& qg,
                         const Matrix& kg, const Matrix& vg, std::size_t* score_evals) {
    if (w < 1) throw Error("attention_sliding: window must be >= 1");
    const std::size_t n = qs.rows;
    if (ks.rows != n || vs.rows != n || qg.rows != n || kg.rows != n || vg.rows != n ||
        qs.cols != ks.cols || qg.cols != kg.cols || vs.cols != vg.cols ||
        global_mask.size() != n)
        throw Error("attention_sliding: shape mismatch");

    std::vector<std::size_t> globals;
    for (std::size_t j = 0; j < n; ++j)
        if (global_mask[j]) globals.push_back(j);

    const int half = w / 2;
    Matrix out(n, vs.cols);
    std::vector<std::size_t> allowed;
    std::vector<double> scores;

    for (std::size_t i = 0; i < n; ++i) {
        const bool is_global = global_mask[i];
        allowed.clear();
        if (is_global) {
            for (std::size_t j = 0; j < n; ++j) allowed.push_back(j);
        } else {
            std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
            std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(half));
            std::size_t g = 0;
            // merge global positions below the window, the window, then above
            while (g < globals.size() && globals[g] < lo) allowed.push_back(globals[g++]);
            for (std::size_t j = lo; j <= hi; ++j) allowed.push_back(j);
            while (g < globals.size() && globals[g] <= hi) ++g;
            while (g < globals.size()) allowed.push_back(globals[g++]);
        }

        const Matrix& qm = is_global ? qg : qs;
        const Matrix& km = is_global ? kg : ks;
        const Matrix& vm = is_global ? vg : vs;
        const double scale = 1.0 / std::sqrt(static_cast<double>(qm.cols));

        scores.resize(allowed.size());
        for (std::size_t a = 0; a < allowed.size(); ++a) {
            std::size_t j = allowed[a];
            double s = 0.0;
            for (std::size_t d = 0; d < qm.cols; ++d) s += qm(i, d) * km(j, d);
            scores[a] = s * scale;
            if (score_evals) ++*score_evals;
        }
        softmax_inplace(scores.data(), scores.size());
        double* orow = out.row(i);
        for (std::size_t a = 0; a < allowed.size(); ++a) {
            double weight = scores[a];
            if (weight == 0.0) continue;
            const double* vr = vm.row(allowed[a]);
            for (std::size_t d = 0; d < vm.cols; ++d) orow[d] += weight * vr[d];
        }
    }
    return out;
}

std::pair<Vector, Vector> span_logits(const Matrix& p, const SpanHeads& heads) {
    if (p.cols != heads.w_start.size() || p.cols != heads.w_end.size())
        throw Error("span_logits: shape mismatch");
    Vector start(p.rows), end(p.rows);
    for (std::size_t i = 0; i < p.rows; ++i) {
        const double* r = p.row(i);
        double s = 0.0, e = 0.0;
        for (std::size_t d = 0; d < p.cols; ++d) {
            s += r[d] * heads.w_start[d];
            e += r[d] * heads.w_end[d];
        }
        start[i] = s;
        end[i] = e;
    }
    return {std::move(start), std::move(end)};
}

SpanChoice decode_span(const Vector& start_logits, const Vector& end_logits,
                       std::size_t max_span_len, std::size_t ctx_begin, std::size_t ctx_end) {
    if (ctx_begin >= ctx_end || ctx_end > start_logits.size())
        throw Error("decode_span: empty context range");
    if (start_logits.size() != end_logits.size())
        throw Error("decode_span: logit length mismatch");
    if (max_span_len < 1) throw Error("decode_span: max_span_len must be >= 1");
    SpanChoice best;
    best.score = -std::numeric_limits<double>::infinity();
    for (std::size_t s = ctx_begin; s < ctx_end; ++s) {
        std::size_t e_hi = std::min(ctx_end, s + max_span_len);
        for (std::size_t e = s; e < e_hi; ++e) {
            double score = start_logits[s] + end_logits[e];
            if (score > best.score) best = SpanChoice{s, e, score};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Lexical reader
// ---------------------------------------------------------------------------

namespace {

bool is_sentence_break(char c) {
    return c == '.' || c == '!' || c == '?' || c == ';' || c == '\n';
}

struct Sentence {
    std::size_t first_tok = 0;
    std::size_t last_tok = 0;  // inclusive
};

std::vector<Sentence> split_sentences(std::string_view text, const TokenSeq& tokens) {
    std::vector<Sentence> out;
    if (tokens.empty()) return out;
    std::size_t first = 0;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        std::size_t gap_begin = tokens.offsets[i].second;
        std::size_t gap_end = tokens.offsets[i + 1].first;
        bool brk = false;
        for (std::size_t c = gap_begin; c < gap_end; ++c)
            if (is_sentence_break(text[c])) brk = true;
        if (brk) {
            out.push_back(Sentence{first, i});
            first = i + 1;
        }
    }
    out.push_back(Sentence{first, tokens.size() - 1});
    return out;
}

}  // namespace

Answer LexicalReader::read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                                 const std::string& question) {
    Answer abstain;
    if (chunk_tokens.empty()) return abstain;

    std::vector<std::string> stems;
    stems.reserve(chunk_tokens.size());
    for (const auto& t : chunk_tokens.tokens) stems.push_back(stem(t));

    std::unordered_set<std::string> question_stems;
    for (const auto& s : stem_tokens(question)) question_stems.insert(s);

    std::vector<Sentence> sentences = split_sentences(chunk_text, chunk_tokens);

    // document frequency of stems over sentences, for the IDF ranking
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& sent : sentences) {
        std::unordered_set<std::string> seen;
        for (std::size_t i = sent.first_tok; i <= sent.last_tok; ++i) seen.insert(stems[i]);
        for (const auto& s : seen) ++df[s];
    }
    auto idf = [&](const std::string& s) { return bm25_idf(sentences.size(), df.at(s)); };

    std::size_t best_sentence = 0;
    std::size_t best_overlap = 0;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        std::unordered_set<std::string> seen;
        std::size_t overlap = 0;
        for (std::size_t i = sentences[si].first_tok; i <= sentences[si].last_tok; ++i) {
            if (question_stems.count(stems[i]) && seen.insert(stems[i]).second) ++overlap;
        }
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best_sentence = si;
        }
    }
    if (best_overlap < 1) return abstain;  // below the overlap threshold

    const Sentence& sent = sentences[best_sentence];

    // highest-IDF non-question stems of the winning sentence
    double max_idf = -1.0;
    for (std::size_t i = sent.first_tok; i <= sent.last_tok; ++i) {
        if (question_stems.count(stems[i])) continue;
        max_idf = std::max(max_idf, idf(stems[i]));
    }

    std::size_t span_first = sent.first_tok;
    std::size_t span_last = sent.last_tok;
    double target_idf_sum = 0.0;
    if (max_idf >= 0.0) {
        std::unordered_set<std::string> targets;
        for (std::size_t i = sent.first_tok; i <= sent.last_tok; ++i) {
            if (question_stems.count(stems[i])) continue;
            if (idf(stems[i]) >= max_idf - 1e-12) targets.insert(stems[i]);
        }
        for (const auto& t : targets) target_idf_sum += idf(t);

        // shortest window over the sentence covering every target stem
        std::unordered_map<std::string, std::size_t> counts;
        std::size_t covered = 0;
        std::size_t lo = sent.first_tok;
        std::size_t best_len = std::numeric_limits<std::size_t>::max();
        for (std::size_t hi = sent.first_tok; hi <= sent.last_tok; ++hi) {
            if (targets.count(stems[hi]) && ++counts[stems[hi]] == 1) ++covered;
            while (covered == targets.size()) {
                if (hi - lo + 1 < best_len) {
                    best_len = hi - lo + 1;
                    span_first = lo;
                    span_last = hi;
                }
                if (targets.count(stems[lo]) && --counts[stems[lo]] == 0) --covered;
                ++lo;
            }
        }
    }

    Answer ans;
    ans.abstained = false;
    ans.start = span_first;
    ans.end = span_last;
    ans.char_begin = chunk_tokens.offsets[span_first].first;
    ans.char_end = chunk_tokens.offsets[span_last].second;
    ans.text = std::string(chunk_text.substr(ans.char_begin, ans.char_end - ans.char_begin));
    ans.score = static_cast<double>(best_overlap) + target_idf_sum;
    return ans;
}

// ---------------------------------------------------------------------------
// Attention reader
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = kFnvOffset;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);
}

Matrix seeded_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    std::uint64_t state = seed;
    double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    for (auto& x : m.data) x = (2.0 * unit_double(splitmix64(state)) - 1.0) * scale;
    return m;
}

// Deterministic token embedding: hashed word vector plus sinusoidal position.
void embed_sequence(const std::vector<std::string>& tokens, std::size_t hidden,
                    std::uint64_t seed, Matrix& x) {
    x = Matrix(tokens.size(), hidden);
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::uint64_t state = seed ^ fnv1a(tokens[i]);
        double* row = x.row(i);
        for (std::size_t d = 0; d < hidden; ++d)
            row[d] = (2.0 * unit_double(splitmix64(state)) - 1.0) * scale;
        for (std::size_t d = 0; d < hidden; d += 2) {
            double angle = static_cast<double>(i) /
                           std::pow(10000.0, static_cast<double>(d) / static_cast<double>(hidden));
            row[d] += 0.1 * std::sin(angle);
            if (d + 1 < hidden) row[d + 1] += 0.1 * std::cos(angle);
        }
    }
}

}  // namespace

AttnParams AttnParams::seeded(std::size_t hidden, std::size_t layers, std::uint64_t seed) {
    AttnParams p;
    p.hidden = hidden;
    p.layers = layers;
    p.seed = seed;
    std::uint64_t s = seed;
    auto next = [&s]() { return splitmix64(s); };
    for (std::size_t l = 0; l < layers; ++l) {
        Layer layer;
        layer.wqs = seeded_matrix(hidden, hidden, next());
        layer.wks = seeded_matrix(hidden, hidden, next());
        layer.wvs = seeded_matrix(hidden, hidden, next());
        layer.wqg = seeded_matrix(hidden, hidden, next());
        layer.wkg = seeded_matrix(hidden, hidden, next());
        layer.wvg = seeded_matrix(hidden, hidden, next());
        layer.wo = seeded_matrix(hidden, hidden, next());
        p.layer.push_back(std::move(layer));
    }
    Matrix ws = seeded_matrix(1, hidden, next());
    Matrix we = seeded_matrix(1, hidden, next());
    p.heads.w_start.assign(ws.data.begin(), ws.data.end());
    p.heads.w_end.assign(we.data.begin(), we.data.end());
    return p;
}

void AttnParams::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write weight file: " + path);
    out.write("EDQW", 4);
    binio::write_u32(out, 1);
    binio::write_u64(out, hidden);
    binio::write_u64(out, layers);
    binio::write_u64(out, seed);

    std::vector<std::pair<std::string, const Matrix*>> sections;
    std::vector<Matrix> head_mats;  // heads as 1 x h sections
    head_mats.emplace_back(1, hidden);
    head_mats.emplace_back(1, hidden);
    std::copy(heads.w_start.begin(), heads.w_start.end(), head_mats[0].data.begin());
    std::copy(heads.w_end.begin(), heads.w_end.end(), head_mats[1].data.begin());
    for (std::size_t l = 0; l < layer.size(); ++l) {
        std::string prefix = "layer" + std::to_string(l) + ".";
        sections.emplace_back(prefix + "wqs", &layer[l].wqs);
        sections.emplace_back(prefix + "wks", &layer[l].wks);
        sections.emplace_back(prefix + "wvs", &layer[l].wvs);
        sections.emplace_back(prefix + "wqg", &layer[l].wqg);
        sections.emplace_back(prefix + "wkg", &layer[l].wkg);
        sections.emplace_back(prefix + "wvg", &layer[l].wvg);
        sections.emplace_back(prefix + "wo", &layer[l].wo);
    }
    sections.emplace_back("w_start", &head_mats[0]);
    sections.emplace_back("w_end", &head_mats[1]);

    binio::write_u32(out, static_cast<std::uint32_t>(sections.size()));
    for (const auto& [name, m] : sections) {
        binio::write_string(out, name);
        binio::write_u64(out, m->rows);
        binio::write_u64(out, m->cols);
    }
    for (const auto& [name, m] : sections) binio::write_matrix_f32(out, *m);
}

AttnParams AttnParams::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("weight file not found: " + path);
    binio::expect_magic(in, "EDQW", path);
    std::uint32_t version = binio::read_u32(in, path);
    if (version != 1) throw ValidationError(path + ": unsupported version");
    AttnParams p;
    p.hidden = binio::read_u64(in, path);
    p.layers = binio::read_u64(in, path);
    p.seed = binio::read_u64(in, path);
    p.layer.resize(p.layers);

    std::uint32_t n = binio::read_u32(in, path);
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::uint32_t i = 0; i < n; ++i) {
        names.push_back(binio::read_string(in, path));
        std::size_t rows = binio::read_u64(in, path);
        std::size_t cols = binio::read_u64(in, path);
        shapes.emplace_back(rows, cols);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        Matrix m = binio::read_matrix_f32(in, shapes[i].first, shapes[i].second, path);
        const std::string& name = names[i];
        if (name == "w_start") {
            p.heads.w_start.assign(m.data.begin(), m.data.end());
        } else if (name == "w_end") {
            p.heads.w_end.assign(m.data.begin(), m.data.end());
        } else if (name.rfind("layer", 0) == 0) {
            auto dotpos = name.find('.');
            std::size_t idx = std::stoul(name.substr(5, dotpos - 5));
            if (idx >= p.layer.size()) throw ValidationError(path + ": bad section " + name);
            std::string field = name.substr(dotpos + 1);
            Layer& l = p.layer[idx];
            if (field == "wqs") l.wqs = std::move(m);
            else if (field == "wks") l.wks = std::move(m);
            else if (field == "wvs") l.wvs = std::move(m);
            else if (field == "wqg") l.wqg = std::move(m);
            else if (field == "wkg") l.wkg = std::move(m);
            else if (field == "wvg") l.wvg = std::move(m);
            else if (field == "wo") l.wo = std::move(m);
            else throw ValidationError(path + ": bad section " + name);
        } else {
            throw ValidationError(path + ": bad section " + name);
        }
    }
    return p;
}

Answer AttnReader::read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                              const std::string& question) {
    Answer abstain;
    if (chunk_tokens.empty()) return abstain;

    TokenSeq qtoks = tokenize_raw(question);
    std::vector<std::string> seq = qtoks.tokens;
    seq.push_back("[sep]");
    const std::size_t ctx_begin = seq.size();
    for (const auto& t : chunk_tokens.tokens) seq.push_back(t);

    std::vector<bool> global_mask(seq.size(), false);
    global_mask[0] = true;  // leading token
    for (std::size_t i = 0; i < qtoks.size(); ++i) global_mask[i] = true;

    Matrix x;
    embed_sequence(seq, params_.hidden, params_.seed, x);
    for (const auto& l : params_.layer) {
        Matrix qs = matmul(x, l.wqs), ks = matmul(x, l.wks), vs = matmul(x, l.wvs);
        Matrix qg = matmul(x, l.wqg), kg = matmul(x, l.wkg), vg = matmul(x, l.wvg);
        Matrix attn = attention_sliding(qs, ks, vs, window_, global_mask, qg, kg, vg);
        Matrix o = matmul(attn, l.wo);
        for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += o.data[i];
    }
    auto [start_logits, end_logits] = span_logits(x, params_.heads);
    SpanChoice span = decode_span(start_logits, end_logits, kMaxSpanLen, ctx_begin, seq.size());

    Answer ans;
    ans.abstained = false;
    ans.start = span.start - ctx_begin;
    ans.end = span.end - ctx_begin;
    ans.char_begin = chunk_tokens.offsets[ans.start].first;
    ans.char_end = chunk_tokens.offsets[ans.end].second;
    ans.text = std::string(chunk_text.substr(ans.char_begin, ans.char_end - ans.char_begin));
    ans.score = span.score;
    return ans;
}

// ---------------------------------------------------------------------------
// Chunked read
// ---------------------------------------------------------------------------

Answer read(const ReaderInput& input, ReaderBackend& backend) {
    if (input.context.empty()) throw ValidationError("read: empty context");
    TokenSeq ctx_tokens = tokenize_raw(input.context);
    if (ctx_tokens.empty()) throw ValidationError("read: context has no tokens");

    std::size_t question_tokens = tokenize_raw(input.question).size();
    std::size_t budget = input.max_tokens > question_tokens + 1
                             ? input.max_tokens - question_tokens - 1
                             : 16;

    Answer best;
    std::size_t start = 0;
    while (start < ctx_tokens.size()) {
        std::size_t stop = std::min(ctx_tokens.size(), start + budget);
        std::size_t char_begin = ctx_tokens.offsets[start].first;
        std::size_t char_end = ctx_tokens.offsets[stop - 1].second;
        std::string_view chunk_text =
            std::string_view(input.context).substr(char_begin, char_end - char_begin);
        TokenSeq chunk_tokens = tokenize_raw(chunk_text);

        Answer a = backend.read_chunk(chunk_text, chunk_tokens, input.question);
        if (!a.abstained) {
            a.start += start;
            a.end += start;
            a.char_begin += char_begin;
            a.char_end += char_begin;
            if (best.abstained || a.score > best.score) best = a;
        }
        if (stop == ctx_tokens.size()) break;
        start += std::min(kChunkStride, budget);  // never skip tokens on tiny budgets
    }
    return best;
}

}  // namespace eduqa
