#pragma once

// Shared data model: passages, questions, tokenization and the JSONL corpus
// files every other stage reads and writes.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hetqa {

enum class SourceType { text, list, table, kb };

constexpr std::size_t kSourceTypeCount = 4;

std::string_view to_string(SourceType s);
/// Throws ValidationError for anything other than text/list/table/kb.
SourceType parse_source_type(std::string_view s);

struct Token {
    std::string surface;
    bool operator==(const Token&) const = default;
};

/// Whitespace tokenizer. ASCII and Unicode whitespace (NBSP, the U+2000 block,
/// ideographic space, ...) all separate tokens. Total and deterministic.
std::vector<Token> tokenize(std::string_view text);

/// tokenize(text).size() without materializing tokens.
std::size_t count_tokens(std::string_view text);

/// Tokens re-joined with single spaces.
std::string normalize_whitespace(std::string_view text);

/// Lowercase, drop '?', collapse whitespace. Idempotent.
std::string normalize_question(std::string_view text);

/// Where a flattened passage came from.
struct Provenance {
    std::string table_id;
    std::vector<std::size_t> rows;
    std::vector<std::string> relation_ids;
    bool oversized = false;

    bool operator==(const Provenance&) const = default;
};

struct Passage {
    std::string id;
    SourceType source = SourceType::text;
    std::string title;
    std::string text;
    std::size_t token_count = 0;
    std::optional<Provenance> provenance;

    bool operator==(const Passage&) const = default;
};

/// Builds a passage with token_count derived from text. Throws ValidationError
/// on an empty id or empty text.
Passage make_passage(std::string id, SourceType source, std::string title, std::string text,
                     std::optional<Provenance> provenance = std::nullopt);

struct Question {
    std::string id;
    std::string text;
    std::vector<std::string> answers;
    std::vector<std::string> linked_entities;
    std::string dataset;

    bool operator==(const Question&) const = default;
};

nlohmann::json to_json(const Provenance& p);
nlohmann::json to_json(const Passage& p);
nlohmann::json to_json(const Question& q);
Provenance provenance_from_json(const nlohmann::json& j);
Passage passage_from_json(const nlohmann::json& j);
Question question_from_json(const nlohmann::json& j);

/// Ordered passages with an id lookup. Ids are unique.
class Corpus {
public:
    Corpus() = default;
    /// Throws ValidationError naming the first duplicate id.
    explicit Corpus(std::vector<Passage> passages);

    std::span<const Passage> passages() const { return passages_; }
    std::size_t size() const { return passages_.size(); }
    bool empty() const { return passages_.empty(); }
    const Passage& operator[](std::size_t i) const { return passages_[i]; }
    const Passage* find(std::string_view id) const;

    /// Appends another corpus; duplicate ids across the two are rejected.
    void append(std::span<const Passage> more);

private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Resolves a passage id to its passage, or nullptr.
using PassageLookup = std::function<const Passage*(std::string_view)>;

Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::span<const Passage> passages, const std::filesystem::path& path);

std::vector<Question> load_questions(const std::filesystem::path& path);
void write_questions(std::span<const Question> questions, const std::filesystem::path& path);

}  // namespace hetqa
