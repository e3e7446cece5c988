#include "hetqa/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "hetqa/error.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

bool contains_run(std::span<const std::string> hay, std::span<const std::string> needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
            return true;
        }
    }
    return false;
}

const Passage& resolve(const PassageLookup& passages, const std::string& id) {
    const Passage* p = passages(id);
    if (!p) throw ValidationError("retrieved doc id \"" + id + "\" is not in the corpus");
    return *p;
}

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

}  // namespace

std::string normalize_answer(std::string_view s) {
    std::string lowered = text::ascii_lower(s);
    std::erase_if(lowered, [](char c) { return text::is_ascii_punct(c); });
    std::string out;
    for (auto w : text::split_ws(lowered)) {
        if (is_article(w)) continue;
        if (!out.empty()) out += ' ';
        out.append(w);
    }
    return out;
}

std::vector<std::string> normalized_tokens(std::string_view content) {
    const std::string norm = normalize_answer(content);
    std::vector<std::string> out;
    for (auto w : text::split_ws(norm)) out.emplace_back(w);
    return out;
}

AnswerMatcher::AnswerMatcher(std::span<const std::string> answers) {
    for (const auto& a : answers) {
        auto toks = normalized_tokens(a);
        if (!toks.empty()) answers_.push_back(std::move(toks));
    }
}

bool AnswerMatcher::matches_tokens(std::span<const std::string> tokens) const {
    return std::any_of(answers_.begin(), answers_.end(),
                       [&](const auto& a) { return contains_run(tokens, a); });
}

bool AnswerMatcher::matches(std::string_view content) const {
    if (answers_.empty()) return false;
    return matches_tokens(normalized_tokens(content));
}

bool has_answer(std::string_view content, std::span<const std::string> answers) {
    return AnswerMatcher(answers).matches(content);
}

nlohmann::json to_json(const RetrievalResult& r) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : r.docs) {
        docs.push_back({{"doc_id", d.doc_id}, {"score", d.score}, {"source", std::string(to_string(d.source))}});
    }
    return {{"question_id", r.question_id}, {"results", std::move(docs)}};
}

RetrievalResult retrieval_result_from_json(const nlohmann::json& j) {
    RetrievalResult r;
    r.question_id = require_string(j, "question_id");
    for (const auto& d : require(j, "results")) {
        r.docs.push_back({require_string(d, "doc_id"), require(d, "score").get<double>(),
                          parse_source_type(require_string(d, "source"))});
    }
    return r;
}

std::vector<RetrievalResult> load_retrieval(const std::filesystem::path& path) {
    std::vector<RetrievalResult> out;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        out.push_back(retrieval_result_from_json(j));
    });
    return out;
}

void write_retrieval(std::span<const RetrievalResult> results, const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& r : results) w.write_json_line(to_json(r));
    w.commit();
}

nlohmann::json to_json(const Metrics& m) {
    nlohmann::json recall = nlohmann::json::object();
    for (const auto& [k, v] : m.recall_at) recall[std::to_string(k)] = v;
    nlohmann::json j = {{"n_questions", m.n_questions}, {"recall_at", std::move(recall)}};
    if (m.exact_match) j["exact_match"] = *m.exact_match;
    if (m.hits_at_1) j["hits_at_1"] = *m.hits_at_1;
    return j;
}

std::string format_metrics(const Metrics& m) {
    std::string out = "metric        value\n";
    out += "questions     " + std::to_string(m.n_questions) + "\n";
    for (const auto& [k, v] : m.recall_at) {
        std::string name = "R@" + std::to_string(k);
        name.resize(14, ' ');
        out += name + fixed(v) + "\n";
    }
    if (m.exact_match) out += "EM            " + fixed(*m.exact_match) + "\n";
    if (m.hits_at_1) out += "Hits@1        " + fixed(*m.hits_at_1) + "\n";
    return out;
}

std::vector<bool> answer_hits(std::span<const RetrievalResult> results,
                              std::span<const Question> questions, const PassageLookup& passages,
                              std::size_t k) {
    std::unordered_map<std::string, std::size_t> qpos;
    for (std::size_t i = 0; i < questions.size(); ++i) qpos.emplace(questions[i].id, i);
    std::vector<bool> hit(questions.size(), false);
    for (const auto& r : results) {
        auto it = qpos.find(r.question_id);
        if (it == qpos.end()) {
            throw ValidationError("retrieval result for unknown question \"" + r.question_id + "\"");
        }
        const AnswerMatcher matcher(questions[it->second].answers);
        const std::size_t n = std::min(k, r.docs.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (matcher.matches(resolve(passages, r.docs[i].doc_id).text)) {
                hit[it->second] = true;
                break;
            }
        }
    }
    return hit;
}

Metrics recall_at_k(std::span<const RetrievalResult> results, std::span<const Question> questions,
                    const PassageLookup& passages, std::span<const std::size_t> ks) {
    std::unordered_map<std::string, std::size_t> qpos;
    for (std::size_t i = 0; i < questions.size(); ++i) qpos.emplace(questions[i].id, i);
    // Rank of the first answer-bearing doc per question; npos when none.
    std::vector<std::size_t> first_hit(questions.size(), std::string::npos);
    std::size_t depth = 0;
    for (auto k : ks) depth = std::max(depth, k);
    for (const auto& r : results) {
        auto it = qpos.find(r.question_id);
        if (it == qpos.end()) {
            throw ValidationError("retrieval result for unknown question \"" + r.question_id + "\"");
        }
        const AnswerMatcher matcher(questions[it->second].answers);
        const std::size_t n = std::min(depth, r.docs.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (matcher.matches(resolve(passages, r.docs[i].doc_id).text)) {
                first_hit[it->second] = std::min(first_hit[it->second], i);
                break;
            }
        }
    }
    Metrics m;
    m.n_questions = questions.size();
    for (auto k : ks) {
        std::size_t hits = 0;
        for (auto h : first_hit) hits += (h != std::string::npos && h < k) ? 1 : 0;
        m.recall_at[k] = questions.empty() ? 0.0 : static_cast<double>(hits) / questions.size();
    }
    return m;
}

Predictions load_predictions(const std::filesystem::path& path) {
    Predictions out;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        out[require_string(j, "question_id")] = require_string(j, "answer");
    });
    return out;
}

void write_predictions(const Predictions& preds, std::span<const Question> order,
                       const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& q : order) {
        auto it = preds.find(q.id);
        if (it != preds.end()) w.write_json_line({{"question_id", q.id}, {"answer", it->second}});
    }
    w.commit();
}

bool is_exact_match(std::string_view prediction, std::span<const std::string> gold) {
    const std::string p = normalize_answer(prediction);
    if (p.empty()) return false;
    return std::any_of(gold.begin(), gold.end(),
                       [&](const std::string& g) { return normalize_answer(g) == p; });
}

Metrics exact_match(const Predictions& predictions, std::span<const Question> gold) {
    std::size_t correct = 0;
    for (const auto& q : gold) {
        auto it = predictions.find(q.id);
        if (it != predictions.end() && is_exact_match(it->second, q.answers)) ++correct;
    }
    Metrics m;
    m.n_questions = gold.size();
    const double em = gold.empty() ? 0.0 : static_cast<double>(correct) / gold.size();
    m.exact_match = em;
    m.hits_at_1 = em;
    return m;
}

nlohmann::json to_json(const AttributionReport& r) {
    nlohmann::json shares = nlohmann::json::object();
    for (const auto& s : r.shares) {
        shares[std::string(to_string(s.source))] = {{"full_set", s.full_set},
                                                    {"improvement_set", s.improvement_set}};
    }
    return {{"n_questions", r.n_questions},
            {"n_improved", r.n_improved},
            {"improved_ids", r.improved_ids},
            {"degenerate", r.degenerate},
            {"shares", std::move(shares)}};
}

AttributionReport source_attribution(std::span<const RetrievalResult> results_a,
                                     std::span<const RetrievalResult> results_b,
                                     const Predictions& predictions_a,
                                     const Predictions& predictions_b,
                                     std::span<const Question> gold, const PassageLookup& passages,
                                     std::size_t k) {
    const auto ids_of = [](std::span<const RetrievalResult> rs) {
        std::vector<std::string> ids;
        for (const auto& r : rs) ids.push_back(r.question_id);
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    const auto ids_a = ids_of(results_a);
    const auto ids_b = ids_of(results_b);
    if (ids_a != ids_b) throw ValidationError("baseline and candidate cover different questions");
    if (std::adjacent_find(ids_b.begin(), ids_b.end()) != ids_b.end()) {
        throw ValidationError("duplicate question id in retrieval results");
    }
    std::unordered_map<std::string, const Question*> by_id;
    for (const auto& q : gold) by_id.emplace(q.id, &q);

    AttributionReport rep;
    std::vector<std::size_t> full(kSourceTypeCount, 0), improved(kSourceTypeCount, 0);
    for (const auto& r : results_b) {
        auto it = by_id.find(r.question_id);
        if (it == by_id.end()) {
            throw ValidationError("retrieval result for unknown question \"" + r.question_id + "\"");
        }
        const Question& q = *it->second;
        const auto pred = [&](const Predictions& p) {
            auto f = p.find(q.id);
            return f == p.end() ? std::string() : f->second;
        };
        const bool gained = is_exact_match(pred(predictions_b), q.answers) &&
                            !is_exact_match(pred(predictions_a), q.answers);
        ++rep.n_questions;
        if (gained) {
            ++rep.n_improved;
            rep.improved_ids.push_back(q.id);
        }
        std::vector<bool> has(kSourceTypeCount, false);
        const AnswerMatcher matcher(q.answers);
        const std::size_t n = std::min(k, r.docs.size());
        for (std::size_t i = 0; i < n; ++i) {
            const Passage& p = resolve(passages, r.docs[i].doc_id);
            const auto s = static_cast<std::size_t>(p.source);
            if (!has[s] && matcher.matches(p.text)) has[s] = true;
        }
        for (std::size_t s = 0; s < kSourceTypeCount; ++s) {
            if (!has[s]) continue;
            ++full[s];
            if (gained) ++improved[s];
        }
    }
    std::sort(rep.improved_ids.begin(), rep.improved_ids.end());
    rep.degenerate = rep.n_improved == 0;
    for (std::size_t s = 0; s < kSourceTypeCount; ++s) {
        SourceShare share;
        share.source = static_cast<SourceType>(s);
        share.full_set = rep.n_questions ? static_cast<double>(full[s]) / rep.n_questions : 0.0;
        share.improvement_set =
            rep.n_improved ? static_cast<double>(improved[s]) / rep.n_improved : 0.0;
        rep.shares.push_back(share);
    }
    return rep;
}

}  // namespace hetqa
