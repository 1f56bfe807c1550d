#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "eduqa/reader.hpp"

namespace eduqa {

using json = nlohmann::json;

ExternalReader::ExternalReader(std::vector<std::string> argv, int timeout_ms)
    : timeout_ms_(timeout_ms) {
    if (argv.empty()) throw ValidationError("external reader: empty command");
    int to_child[2];    // parent writes -> child stdin
    int from_child[2];  // child stdout -> parent reads
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw Error("external reader: pipe failed: " + std::string(std::strerror(errno)));

    pid_t pid = fork();
    if (pid < 0) throw Error("external reader: fork failed");
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> args;
        for (auto& a : argv) args.push_back(a.data());
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    pid_ = pid;
}

ExternalReader::~ExternalReader() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
        kill(static_cast<pid_t>(pid_), SIGTERM);
        int status = 0;
        waitpid(static_cast<pid_t>(pid_), &status, 0);
    }
}

std::vector<ExternalResponse> ExternalReader::ask(const std::vector<ExternalRequest>& requests) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (requests.empty()) return {};

    std::unordered_set<std::int64_t> pending;
    for (const auto& r : requests) {
        json obj;
        obj["id"] = r.id;
        obj["context"] = r.context;
        obj["question"] = r.question;
        std::string line = obj.dump();
        line.push_back('\n');
        const char* data = line.data();
        std::size_t left = line.size();
        while (left > 0) {
            ssize_t n = write(to_child_, data, left);
            if (n < 0) throw Error("external reader: write failed: " +
                                   std::string(std::strerror(errno)));
            data += n;
            left -= static_cast<std::size_t>(n);
        }
        if (!pending.insert(r.id).second)
            throw ValidationError("external reader: duplicate request id " +
                                  std::to_string(r.id));
    }

    std::unordered_map<std::int64_t, ExternalResponse> got;
    std::size_t lines_seen = 0;
    while (!pending.empty()) {
        // drain complete lines already buffered
        std::size_t nl;
        while (!pending.empty() && (nl = buffer_.find('\n')) != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            ++lines_seen;
            if (line.empty()) continue;
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::exception& e) {
                throw ValidationError("external reader: malformed response line " +
                                      std::to_string(lines_seen) + ": " + e.what());
            }
            if (!obj.contains("id") || !obj["id"].is_number_integer())
                throw ValidationError("external reader: response line " +
                                      std::to_string(lines_seen) + " lacks an integer id");
            ExternalResponse resp;
            resp.id = obj["id"].get<std::int64_t>();
            if (!pending.count(resp.id))
                throw ValidationError("external reader: response id " +
                                      std::to_string(resp.id) + " matches no request");
            resp.answer = obj.value("answer", std::string());
            resp.start = obj.value("start", static_cast<std::int64_t>(0));
            resp.end = obj.value("end", static_cast<std::int64_t>(0));
            resp.score = obj.value("score", 0.0);
            pending.erase(resp.id);
            got[resp.id] = std::move(resp);
        }
        if (pending.empty()) break;

        struct pollfd pfd {};
        pfd.fd = from_child_;
        pfd.events = POLLIN;
        int rc = poll(&pfd, 1, timeout_ms_);
        if (rc == 0)
            throw Error("external reader: timeout after " + std::to_string(timeout_ms_) +
                        " ms waiting for " + std::to_string(pending.size()) + " response(s)");
        if (rc < 0) throw Error("external reader: poll failed");
        char chunk[4096];
        ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n <= 0)
            throw Error("external reader: child closed the stream with " +
                        std::to_string(pending.size()) + " response(s) outstanding");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }

    std::vector<ExternalResponse> out;
    out.reserve(requests.size());
    for (const auto& r : requests) out.push_back(got.at(r.id));
    return out;
}

Answer ExternalBackend::read_chunk(std::string_view chunk_text, const TokenSeq& chunk_tokens,
                                   const std::string& question) {
    ExternalRequest req;
    req.id = next_id_++;
    req.context = std::string(chunk_text);
    req.question = question;
    auto responses = child_.ask({req});
    const ExternalResponse& resp = responses.front();

    Answer ans;
    ans.text = resp.answer;
    ans.score = resp.score;
    ans.abstained = resp.answer.empty();
    if (resp.start >= 0 && resp.end >= resp.start &&
        static_cast<std::size_t>(resp.end) < chunk_tokens.size()) {
        ans.start = static_cast<std::size_t>(resp.start);
        ans.end = static_cast<std::size_t>(resp.end);
        ans.char_begin = chunk_tokens.offsets[ans.start].first;
        ans.char_end = chunk_tokens.offsets[ans.end].second;
    }
    return ans;
}

}  // namespace eduqa
