#include "hetqa/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "hetqa/error.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/reader_bridge.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError("config key \"" + std::string(key) + "\": bad number \"" + std::string(v) + "\"");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key \"" + std::string(key) + "\": bad boolean \"" + std::string(v) + "\"");
}

// Shortest text that parses back to the same double.
std::string fmt_double(double d) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, ptr);
}

struct Field {
    std::function<void(PipelineConfig&, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define HETQA_STRING(name)                                                                   \
    {#name, {[](PipelineConfig& c, std::string_view v) { c.name = std::string(v); },         \
             [](const PipelineConfig& c) { return c.name; }}}
#define HETQA_SIZE(name)                                                                     \
    {#name, {[](PipelineConfig& c, std::string_view v) { c.name = parse_number<std::size_t>(#name, v); }, \
             [](const PipelineConfig& c) { return std::to_string(c.name); }}}
#define HETQA_DOUBLE(name)                                                                   \
    {#name, {[](PipelineConfig& c, std::string_view v) { c.name = parse_number<double>(#name, v); }, \
             [](const PipelineConfig& c) { return fmt_double(c.name); }}}

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> f{
        HETQA_STRING(kb),
        HETQA_STRING(tables),
        HETQA_STRING(text),
        HETQA_STRING(questions),
        HETQA_STRING(linking),
        HETQA_STRING(output_dir),
        HETQA_SIZE(token_limit),
        HETQA_SIZE(k_total),
        HETQA_SIZE(kb_quota),
        {"tune_quota", {[](PipelineConfig& c, std::string_view v) { c.tune_quota = parse_bool("tune_quota", v); },
                        [](const PipelineConfig& c) { return std::string(c.tune_quota ? "true" : "false"); }}},
        HETQA_STRING(table_mode),
        HETQA_STRING(embedder),
        HETQA_STRING(embed_endpoint),
        HETQA_SIZE(embed_dim),
        HETQA_STRING(reader),
        HETQA_STRING(reader_endpoint),
        HETQA_SIZE(reader_contexts),
        HETQA_DOUBLE(bm25_k1),
        HETQA_DOUBLE(bm25_b),
        {"seed", {[](PipelineConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("seed", v); },
                  [](const PipelineConfig& c) { return std::to_string(c.seed); }}},
    };
    return f;
}

#undef HETQA_STRING
#undef HETQA_SIZE
#undef HETQA_DOUBLE

void note(const Progress& p, const std::string& msg) {
    if (p) p(msg);
}

}  // namespace

void PipelineConfig::validate() const {
    if (token_limit == 0) throw ValidationError("token_limit must be positive");
    if (k_total == 0) throw ValidationError("k_total must be positive");
    QuotaPolicy{k_total, kb_quota}.validate();
    parse_linearization_mode(table_mode);
    if (embedder != "stub" && embedder != "remote") {
        throw ValidationError("embedder must be stub or remote, got \"" + embedder + "\"");
    }
    if (embedder == "remote" && embed_endpoint.empty()) {
        throw ValidationError("embedder remote requires embed_endpoint");
    }
    if (embed_dim == 0) throw ValidationError("embed_dim must be positive");
    if (reader != "baseline" && reader != "remote") {
        throw ValidationError("reader must be baseline or remote, got \"" + reader + "\"");
    }
    if (reader == "remote" && reader_endpoint.empty()) {
        throw ValidationError("reader remote requires reader_endpoint");
    }
    if (reader_contexts == 0) throw ValidationError("reader_contexts must be positive");
    if (!(bm25_k1 >= 0.0) || !(bm25_b >= 0.0 && bm25_b <= 1.0)) {
        throw ValidationError("bm25 parameters out of range");
    }
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
    auto it = fields().find(key);
    if (it == fields().end()) throw ValidationError("unknown config key \"" + std::string(key) + "\"");
    it->second.set(config, value);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, f] : fields()) out.push_back(k);
    return out;
}

PipelineConfig parse_config(std::string_view content) {
    PipelineConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        std::string_view line = content.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        const auto trim = [](std::string_view s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos) return std::string_view{};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        try {
            apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open config");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const PipelineConfig& config) {
    std::string out;
    for (const auto& [k, f] : fields()) out += k + " = " + f.get(config) + "\n";
    return out;
}

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config) {
    if (config.embedder == "remote") {
        return std::make_unique<RemoteEmbedder>(config.embed_endpoint, config.embed_dim);
    }
    return std::make_unique<HashingEmbedder>(config.embed_dim);
}

TableFlattening flatten_tables(std::span<const Table> tables, std::size_t token_limit,
                               LinearizationMode mode, const TableFilterConfig& filter) {
    TableFlattening out;
    out.tables_in = tables.size();
    auto filtered = filter_tables(tables, filter);
    out.tables_kept = filtered.kept.size();
    out.dropped_single_row = filtered.dropped_single_row;
    out.dropped_service = filtered.dropped_service;
    for (const auto& t : filtered.kept) {
        for (auto& c : chunk_table(t, token_limit, mode)) out.passages.push_back(std::move(c.passage));
    }
    return out;
}

TableFlattening flatten_tables(std::span<const RawTable> raw, std::size_t token_limit,
                               LinearizationMode mode, const TableFilterConfig& filter) {
    const auto tables = extract_tables(raw);
    return flatten_tables(std::span<const Table>(tables), token_limit, mode, filter);
}

std::vector<Passage> flatten_kb(std::span<const HyperRelation> relations, std::size_t token_limit) {
    std::vector<RelationSentence> sentences;
    sentences.reserve(relations.size());
    for (const auto& r : relations) sentences.push_back(to_sentence(r));
    return pack_relations(sentences, token_limit, "kb");
}

E2EResult run_e2e(const PipelineConfig& config, const Progress& progress) {
    config.validate();
    if (config.questions.empty()) throw ValidationError("e2e requires questions");
    const auto mode = parse_linearization_mode(config.table_mode);

    Corpus corpus;
    if (!config.text.empty()) {
        corpus = load_corpus(config.text);
        note(progress, "text passages: " + std::to_string(corpus.size()));
    }
    if (!config.tables.empty()) {
        const auto raw = load_raw_tables(config.tables);
        auto flat = flatten_tables(std::span<const RawTable>(raw), config.token_limit, mode);
        note(progress, "tables: " + std::to_string(flat.tables_kept) + " of " +
                           std::to_string(flat.tables_in) + " kept, " +
                           std::to_string(flat.passages.size()) + " chunks");
        corpus.append(flat.passages);
    }
    if (corpus.empty()) throw ValidationError("e2e needs text or tables");

    KBGraph graph;
    if (!config.kb.empty()) {
        graph = KBGraph(load_kb(config.kb));
        note(progress, "kb relations: " + std::to_string(graph.relation_count()));
    }
    EntityLinking linking;
    if (!config.linking.empty()) linking = load_linking(config.linking);
    const auto questions = load_questions(config.questions);
    note(progress, "questions: " + std::to_string(questions.size()));

    auto embedder = make_embedder(config);
    const auto index = DenseIndex::build(corpus.passages(), *embedder);
    note(progress, "dense index: " + std::to_string(index.size()) + " x " + std::to_string(index.dim()));

    E2EResult res;
    res.main_passages = corpus.size();

    std::vector<std::string> qtexts;
    for (const auto& q : questions) qtexts.push_back(q.text);
    const auto qvecs = embedder->embed_batch(qtexts);

    RelationEmbeddingCache cache;
    std::vector<std::vector<ScoredDoc>> main_hits, kb_hits;
    Corpus kb_corpus;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const Question& q = questions[i];
        main_hits.push_back(search_dense(index, qvecs[i], config.k_total));
        std::vector<std::string> entities = q.linked_entities;
        if (auto it = linking.find(q.id); it != linking.end()) entities = it->second;
        if (graph.relation_count() > 0) {
            auto kb = kb_candidates_for_question(q, graph, entities, *embedder, config.k_total,
                                                 config.token_limit, &cache);
            kb_corpus.append(kb.passages);
            kb_hits.push_back(std::move(kb.docs));
        } else {
            kb_hits.emplace_back();
        }
    }
    res.kb_passages = kb_corpus.size();
    note(progress, "kb passages: " + std::to_string(res.kb_passages));

    const PassageLookup lookup = [&](std::string_view id) -> const Passage* {
        if (const Passage* p = corpus.find(id)) return p;
        return kb_corpus.find(id);
    };

    res.policy = {config.k_total, config.kb_quota};
    if (config.tune_quota) {
        std::unordered_map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < questions.size(); ++i) pos.emplace(questions[i].id, i);
        std::vector<std::size_t> candidates;
        for (auto c : kDefaultQuotaCandidates) {
            if (c <= config.k_total) candidates.push_back(c);
        }
        auto tuning = tune_quota(
            questions, [&](const Question& q) { return main_hits[pos.at(q.id)]; },
            [&](const Question& q) { return kb_hits[pos.at(q.id)]; }, lookup, candidates,
            config.k_total);
        res.policy = tuning.best;
        res.quota_table = std::move(tuning.recall_by_quota);
        note(progress, "tuned kb_quota: " + std::to_string(res.policy.kb_quota));
    }

    for (std::size_t i = 0; i < questions.size(); ++i) {
        res.retrieval.push_back({questions[i].id, merge_quota(main_hits[i], kb_hits[i], res.policy)});
    }

    std::vector<ReaderRequest> requests;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        requests.push_back(make_reader_request(questions[i], res.retrieval[i].docs, lookup,
                                               config.reader_contexts));
    }
    if (config.reader == "remote") {
        const auto answers = RemoteReader(config.reader_endpoint).read_all(requests);
        for (std::size_t i = 0; i < questions.size(); ++i) {
            res.predictions[questions[i].id] = answers[i].answer;
        }
    } else {
        for (std::size_t i = 0; i < questions.size(); ++i) {
            res.predictions[questions[i].id] = read_baseline(requests[i]);
        }
    }

    std::vector<std::size_t> ks{1, 5, 20, 100};
    if (std::find(ks.begin(), ks.end(), config.k_total) == ks.end()) ks.push_back(config.k_total);
    res.metrics = recall_at_k(res.retrieval, questions, lookup, ks);
    const Metrics em = exact_match(res.predictions, questions);
    res.metrics.exact_match = em.exact_match;
    res.metrics.hits_at_1 = em.hits_at_1;

    const std::filesystem::path out = config.output_dir;
    std::filesystem::create_directories(out);
    std::vector<Passage> all(corpus.passages().begin(), corpus.passages().end());
    all.insert(all.end(), kb_corpus.passages().begin(), kb_corpus.passages().end());
    write_corpus(all, out / "corpus.jsonl");
    write_retrieval(res.retrieval, out / "retrieval.jsonl");
    write_predictions(res.predictions, questions, out / "predictions.jsonl");
    nlohmann::json metrics = to_json(res.metrics);
    metrics["kb_quota"] = res.policy.kb_quota;
    if (!res.quota_table.empty()) {
        nlohmann::json table = nlohmann::json::object();
        for (const auto& [q, r] : res.quota_table) table[std::to_string(q)] = r;
        metrics["quota_recall"] = std::move(table);
    }
    write_text_atomic(out / "metrics.json", dump_compact(metrics) + "\n");
    write_text_atomic(out / "config.txt", format_config(config));
    note(progress, "wrote " + out.string());
    return res;
}

}  // namespace hetqa
