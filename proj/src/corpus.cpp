#include "hetqa/corpus.hpp"

#include "hetqa/error.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

constexpr std::string_view kSourceNames[] = {"text", "list", "table", "kb"};

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_array()) throw ValidationError(std::string("field \"") + key + "\" must be an array");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_string()) throw ValidationError(std::string("field \"") + key + "\" must hold strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

std::string_view to_string(SourceType s) { return kSourceNames[static_cast<int>(s)]; }

SourceType parse_source_type(std::string_view s) {
    for (std::size_t i = 0; i < kSourceTypeCount; ++i) {
        if (kSourceNames[i] == s) return static_cast<SourceType>(i);
    }
    throw ValidationError("unknown source type \"" + std::string(s) + "\"");
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    for (auto piece : text::split_ws(text)) out.push_back(Token{std::string(piece)});
    return out;
}

std::size_t count_tokens(std::string_view text) {
    std::size_t n = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < text.size();) {
        const std::size_t w = text::whitespace_width(text, i);
        if (w > 0) {
            in_token = false;
            i += w;
        } else {
            if (!in_token) ++n;
            in_token = true;
            ++i;
        }
    }
    return n;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    for (auto piece : text::split_ws(text)) {
        if (!out.empty()) out.push_back(' ');
        out.append(piece);
    }
    return out;
}

std::string normalize_question(std::string_view text) {
    std::string lowered = text::ascii_lower(text);
    std::erase(lowered, '?');
    return normalize_whitespace(lowered);
}

Passage make_passage(std::string id, SourceType source, std::string title, std::string text,
                     std::optional<Provenance> provenance) {
    if (id.empty()) throw ValidationError("passage id must be non-empty");
    if (text::is_blank(text)) throw ValidationError("passage \"" + id + "\" has empty text");
    Passage p;
    p.token_count = count_tokens(text);
    p.id = std::move(id);
    p.source = source;
    p.title = std::move(title);
    p.text = std::move(text);
    p.provenance = std::move(provenance);
    return p;
}

nlohmann::json to_json(const Provenance& p) {
    nlohmann::json j = nlohmann::json::object();
    if (!p.table_id.empty()) j["table_id"] = p.table_id;
    if (!p.rows.empty()) j["rows"] = p.rows;
    if (!p.relation_ids.empty()) j["relation_ids"] = p.relation_ids;
    if (p.oversized) j["oversized"] = true;
    return j;
}

Provenance provenance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("provenance must be an object or null");
    Provenance p;
    for (const auto& [key, value] : j.items()) {
        if (key == "table_id") {
            p.table_id = value.get<std::string>();
        } else if (key == "rows") {
            p.rows = value.get<std::vector<std::size_t>>();
        } else if (key == "relation_ids") {
            p.relation_ids = value.get<std::vector<std::string>>();
        } else if (key == "oversized") {
            p.oversized = value.get<bool>();
        } else {
            throw ValidationError("unknown provenance field \"" + key + "\"");
        }
    }
    return p;
}

nlohmann::json to_json(const Passage& p) {
    return {{"id", p.id},
            {"source", std::string(to_string(p.source))},
            {"title", p.title},
            {"text", p.text},
            {"provenance", p.provenance ? to_json(*p.provenance) : nlohmann::json(nullptr)}};
}

Passage passage_from_json(const nlohmann::json& j) {
    std::optional<Provenance> prov;
    if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
        prov = provenance_from_json(*it);
    }
    std::string title;
    if (auto it = j.find("title"); it != j.end()) title = it->get<std::string>();
    return make_passage(require_string(j, "id"), parse_source_type(require_string(j, "source")),
                        std::move(title), require_string(j, "text"), std::move(prov));
}

nlohmann::json to_json(const Question& q) {
    return {{"id", q.id},
            {"text", q.text},
            {"answers", q.answers},
            {"linked_entities", q.linked_entities},
            {"dataset", q.dataset}};
}

Question question_from_json(const nlohmann::json& j) {
    Question q;
    q.id = require_string(j, "id");
    q.text = require_string(j, "text");
    q.answers = string_list(j, "answers");
    if (q.answers.empty()) throw ValidationError("question \"" + q.id + "\" has no answers");
    for (const auto& a : q.answers) {
        if (a.empty()) throw ValidationError("question \"" + q.id + "\" has an empty answer string");
    }
    if (j.contains("linked_entities")) q.linked_entities = string_list(j, "linked_entities");
    if (auto it = j.find("dataset"); it != j.end()) q.dataset = it->get<std::string>();
    return q;
}

Corpus::Corpus(std::vector<Passage> passages) { append(passages); }

void Corpus::append(std::span<const Passage> more) {
    passages_.reserve(passages_.size() + more.size());
    for (const auto& p : more) {
        auto [it, inserted] = by_id_.emplace(p.id, passages_.size());
        if (!inserted) throw ValidationError("duplicate passage id \"" + p.id + "\"");
        passages_.push_back(p);
    }
}

const Passage* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &passages_[it->second];
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::vector<Passage> passages;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        passages.push_back(passage_from_json(j));
    });
    return Corpus(std::move(passages));
}

void write_corpus(std::span<const Passage> passages, const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& p : passages) w.write_json_line(to_json(p));
    w.commit();
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
    std::vector<Question> out;
    std::unordered_map<std::string, std::size_t> seen;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        Question q = question_from_json(j);
        if (!seen.emplace(q.id, out.size()).second) {
            throw ValidationError("duplicate question id \"" + q.id + "\"");
        }
        out.push_back(std::move(q));
    });
    return out;
}

void write_questions(std::span<const Question> questions, const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& q : questions) w.write_json_line(to_json(q));
    w.commit();
}

}  // namespace hetqa
