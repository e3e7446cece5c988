#include "hetqa/reader_bridge.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <future>
#include <unordered_map>
#include <unordered_set>

#include "hetqa/error.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/text.hpp"
#include "http_client.hpp"

namespace hetqa {

void ReaderRequest::validate() const {
    if (contexts.size() > context_limit) {
        throw ValidationError("reader request has " + std::to_string(contexts.size()) +
                              " contexts, limit is " + std::to_string(context_limit));
    }
}

ReaderRequest make_reader_request(const Question& q, std::span<const ScoredDoc> docs,
                                  const PassageLookup& passages, std::size_t context_limit) {
    ReaderRequest r;
    r.question = q.text;
    r.context_limit = context_limit;
    const std::size_t n = std::min(context_limit, docs.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Passage* p = passages(docs[i].doc_id);
        if (!p) throw ValidationError("retrieved doc id \"" + docs[i].doc_id + "\" is not in the corpus");
        r.contexts.push_back({p->title, p->text});
    }
    return r;
}

nlohmann::json to_json(const ReaderRequest& r) {
    nlohmann::json ctx = nlohmann::json::array();
    for (const auto& c : r.contexts) ctx.push_back({{"title", c.title}, {"text", c.text}});
    return {{"question", r.question}, {"contexts", std::move(ctx)}};
}

RemoteReader::RemoteReader(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

ReaderAnswer RemoteReader::read(const ReaderRequest& request) const {
    request.validate();
    const auto response = detail::post_json(endpoint_, "/read", to_json(request),
                                            {options_.max_attempts, options_.backoff, options_.timeout});
    auto it = response.find("answer");
    if (it == response.end() || !it->is_string()) {
        throw ValidationError("reader response lacks a string \"answer\"");
    }
    ReaderAnswer a;
    a.answer = it->get<std::string>();
    a.empty = text::is_blank(a.answer);
    return a;
}

std::vector<ReaderAnswer> RemoteReader::read_all(std::span<const ReaderRequest> requests) const {
    for (const auto& r : requests) r.validate();
    std::vector<ReaderAnswer> out;
    out.reserve(requests.size());
    for (std::size_t w = 0; w < requests.size(); w += options_.max_in_flight) {
        const std::size_t end = std::min(requests.size(), w + options_.max_in_flight);
        std::vector<std::future<ReaderAnswer>> wave;
        for (std::size_t i = w; i < end; ++i) {
            wave.push_back(std::async(std::launch::async, [this, &req = requests[i]] { return read(req); }));
        }
        for (auto& f : wave) out.push_back(f.get());
    }
    return out;
}

ReaderAnswer read_remote(const std::string& endpoint, const ReaderRequest& request,
                         RemoteOptions options) {
    return RemoteReader(endpoint, options).read(request);
}

bool is_stop_word(std::string_view w) {
    static const std::unordered_set<std::string_view> words{
        "a",     "an",    "the",  "is",    "are",   "was",   "were",  "be",    "been",  "being",
        "of",    "in",    "on",   "at",    "to",    "for",   "by",    "with",  "from",  "and",
        "or",    "but",   "as",   "it",    "its",   "this",  "that",  "these", "those", "he",
        "she",   "they",  "his",  "her",   "their", "them",  "what",  "which", "who",   "whom",
        "whose", "when",  "where", "why",  "how",   "not",   "no",    "has",   "have",  "had",
        "do",    "does",  "did",  "s",     "into",  "than",  "then",  "there", "also",  "after",
        "before", "about", "over", "under", "i",    "you",   "we",    "our",   "your",  "so",
        "if",    "can",   "will", "would", "may",   "one",   "up",    "out",   "all",   "such"};
    return words.contains(w);
}

namespace {

struct Candidate {
    std::size_t contexts = 0;
    double rr_sum = 0.0;
    std::size_t last_rank = 0;
    std::size_t first_rank = 0;
    std::size_t first_pos = 0;
    std::size_t length = 0;
    std::string surface;
};

constexpr std::size_t kMaxSpan = 5;

}  // namespace

std::string read_baseline(const ReaderRequest& request) {
    std::unordered_set<std::string> question_words;
    for (auto& w : normalized_tokens(request.question)) question_words.insert(std::move(w));

    std::unordered_map<std::string, Candidate> cands;
    for (std::size_t rank = 0; rank < request.contexts.size(); ++rank) {
        const auto toks = text::split_ws(request.contexts[rank].text);
        std::vector<std::string> norm(toks.size());
        std::vector<bool> boundary(toks.size());
        for (std::size_t i = 0; i < toks.size(); ++i) {
            norm[i] = normalize_answer(toks[i]);
            boundary[i] = !norm[i].empty() && !is_stop_word(norm[i]) && !question_words.contains(norm[i]);
        }
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (!boundary[i]) continue;
            std::string key;
            for (std::size_t len = 1; len <= kMaxSpan && i + len <= toks.size(); ++len) {
                const std::size_t j = i + len - 1;
                if (!norm[j].empty()) {
                    if (!key.empty()) key += ' ';
                    key += norm[j];
                }
                if (!boundary[j]) continue;
                auto [it, fresh] = cands.try_emplace(key);
                Candidate& c = it->second;
                if (fresh) {
                    c.first_rank = rank;
                    c.first_pos = i;
                    c.length = len;
                    std::string surface(toks[i]);
                    for (std::size_t t = i + 1; t <= j; ++t) {
                        surface += ' ';
                        surface.append(toks[t]);
                    }
                    c.surface = std::string(text::trim_punct(surface));
                } else if (c.last_rank == rank && c.contexts > 0) {
                    continue;
                }
                ++c.contexts;
                c.rr_sum += 1.0 / static_cast<double>(rank + 1);
                c.last_rank = rank;
            }
        }
    }

    const Candidate* best = nullptr;
    double best_score = 0.0;
    for (const auto& [key, c] : cands) {
        const double score = static_cast<double>(c.contexts) * c.rr_sum;
        const bool better =
            !best || score > best_score ||
            (score == best_score &&
             std::tie(c.first_rank, c.first_pos, c.length) <
                 std::tie(best->first_rank, best->first_pos, best->length));
        if (better) {
            best = &c;
            best_score = score;
        }
    }
    return best ? best->surface : std::string();
}

}  // namespace hetqa
