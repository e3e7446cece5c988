#pragma once

// Answer normalization and the retrieval / answer metrics.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hetqa/corpus.hpp"
#include "hetqa/index.hpp"

namespace hetqa {

/// Lowercase, drop ASCII punctuation, drop the standalone words a/an/the,
/// collapse whitespace. Idempotent.
std::string normalize_answer(std::string_view s);

/// True iff some answer's normalized token sequence occurs contiguously in the
/// normalized token sequence of `text`. Answers that normalize to nothing
/// never match.
bool has_answer(std::string_view text, std::span<const std::string> answers);

/// Answers pre-normalized once, for repeated matching against many texts.
class AnswerMatcher {
public:
    explicit AnswerMatcher(std::span<const std::string> answers);
    bool matches(std::string_view text) const;
    bool matches_tokens(std::span<const std::string> normalized_tokens) const;
    bool empty() const { return answers_.empty(); }

private:
    std::vector<std::vector<std::string>> answers_;
};

std::vector<std::string> normalized_tokens(std::string_view text);

struct RetrievalResult {
    std::string question_id;
    std::vector<ScoredDoc> docs;
};

nlohmann::json to_json(const RetrievalResult& r);
RetrievalResult retrieval_result_from_json(const nlohmann::json& j);
std::vector<RetrievalResult> load_retrieval(const std::filesystem::path& path);
void write_retrieval(std::span<const RetrievalResult> results, const std::filesystem::path& path);

struct Metrics {
    std::map<std::size_t, double> recall_at;
    std::optional<double> exact_match;
    std::optional<double> hits_at_1;
    std::size_t n_questions = 0;

    bool operator==(const Metrics&) const = default;
};

nlohmann::json to_json(const Metrics& m);
/// Plain-text table for terminals.
std::string format_metrics(const Metrics& m);

/// For each k, the fraction of `questions` whose top-k retrieved docs contain
/// an answer. Questions absent from `results` count as misses. Throws
/// ValidationError for a result whose question id or doc id does not resolve.
Metrics recall_at_k(std::span<const RetrievalResult> results, std::span<const Question> questions,
                    const PassageLookup& passages, std::span<const std::size_t> ks);

/// Per-question top-k hit flags, in `questions` order.
std::vector<bool> answer_hits(std::span<const RetrievalResult> results,
                              std::span<const Question> questions, const PassageLookup& passages,
                              std::size_t k);

/// question id -> predicted answer.
using Predictions = std::unordered_map<std::string, std::string>;

Predictions load_predictions(const std::filesystem::path& path);
void write_predictions(const Predictions& preds, std::span<const Question> order,
                       const std::filesystem::path& path);

bool is_exact_match(std::string_view prediction, std::span<const std::string> gold);

/// EM against any gold answer; Hits@1 is the same number. Missing predictions
/// are wrong.
Metrics exact_match(const Predictions& predictions, std::span<const Question> gold);

struct SourceShare {
    SourceType source;
    double full_set = 0.0;
    double improvement_set = 0.0;
};

struct AttributionReport {
    std::size_t n_questions = 0;
    std::size_t n_improved = 0;
    std::vector<std::string> improved_ids;
    bool degenerate = false;
    std::vector<SourceShare> shares;  // one per SourceType, in enum order
};

nlohmann::json to_json(const AttributionReport& r);

/// Compares a baseline (a) with a candidate (b). The improvement set holds
/// questions b answers correctly and a does not. For the full set and the
/// improvement set, reports the fraction of questions with at least one
/// answer-bearing passage of each source among b's retrieved docs (top k).
/// Throws ValidationError if the two result sets cover different questions.
AttributionReport source_attribution(std::span<const RetrievalResult> results_a,
                                     std::span<const RetrievalResult> results_b,
                                     const Predictions& predictions_a,
                                     const Predictions& predictions_b,
                                     std::span<const Question> gold, const PassageLookup& passages,
                                     std::size_t k = 100);

}  // namespace hetqa
