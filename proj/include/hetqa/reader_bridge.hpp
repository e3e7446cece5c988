#pragma once

// Hands retrieved contexts to an answer producer: an HTTP client for an
// external generative reader and a deterministic extractive baseline.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetqa/corpus.hpp"
#include "hetqa/index.hpp"

namespace hetqa {

struct ReaderContext {
    std::string title;
    std::string text;
    bool operator==(const ReaderContext&) const = default;
};

struct ReaderRequest {
    std::string question;
    std::vector<ReaderContext> contexts;  // retrieval order
    std::size_t context_limit = 100;

    /// Throws ValidationError when contexts exceed context_limit.
    void validate() const;
};

/// The first context_limit retrieved docs as contexts. Unknown doc ids throw
/// ValidationError.
ReaderRequest make_reader_request(const Question& q, std::span<const ScoredDoc> docs,
                                  const PassageLookup& passages, std::size_t context_limit = 100);

nlohmann::json to_json(const ReaderRequest& r);

struct ReaderAnswer {
    std::string answer;
    bool empty = false;  // the reader produced nothing
};

/// Client for POST {endpoint}/read with {"question", "contexts": [{"title",
/// "text"}]} -> {"answer"}. Retry and timeout as for remote embedding.
class RemoteReader {
public:
    explicit RemoteReader(std::string endpoint, RemoteOptions options = {});
    /// Validates before sending. Throws RemoteError once retries are exhausted.
    ReaderAnswer read(const ReaderRequest& request) const;
    /// Bounded concurrency (options.max_in_flight); answers in request order.
    std::vector<ReaderAnswer> read_all(std::span<const ReaderRequest> requests) const;

private:
    std::string endpoint_;
    RemoteOptions options_;
};

ReaderAnswer read_remote(const std::string& endpoint, const ReaderRequest& request,
                         RemoteOptions options = {});

/// Extractive baseline. Candidates are 1-5 token spans of the contexts; a span
/// may not start or end with a stop word, a question word or a token that is
/// only punctuation. Spans are compared after answer normalization and scored
///   (number of contexts containing it) * sum over those contexts of 1/(rank+1)
/// with rank 0-based. Ties go to the span first seen in the best-ranked
/// context, then the earlier position, then the shorter span. Returns the
/// first occurrence's surface text, or "" when nothing qualifies.
std::string read_baseline(const ReaderRequest& request);

bool is_stop_word(std::string_view normalized_word);

}  // namespace hetqa
