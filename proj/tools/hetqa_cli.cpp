// hetqa: command-line front end. Every subcommand loads its inputs, calls the
// library operation of the same name and writes its outputs atomically.
//
// Exit codes: 0 ok, 1 other failure, 2 missing/unreadable input, 3 invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetqa/corpus.hpp"
#include "hetqa/error.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/fusion.hpp"
#include "hetqa/index.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/kb_flatten.hpp"
#include "hetqa/pipeline.hpp"
#include "hetqa/reader_bridge.hpp"
#include "hetqa/table_flatten.hpp"
#include "hetqa/trainset.hpp"

using namespace hetqa;

namespace {

struct Settings {
    std::string config_path;
    std::vector<std::string> sets;  // key=value from --set
    std::map<std::string, std::string> flags;
    bool emit_config = false;

    PipelineConfig resolve() const {
        PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ValidationError("--set expects key=value, got \"" + kv + "\"");
            apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& [k, v] : flags) apply_setting(c, k, v);
        c.validate();
        return c;
    }
};

// A flag that overrides the config key of the same meaning.
void config_flag(CLI::App* app, Settings& s, const std::string& flag, const std::string& key,
                 const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

void log(const std::string& msg) { std::cerr << "[hetqa] " << msg << "\n"; }

Corpus load_corpora(const std::vector<std::string>& paths) {
    Corpus c;
    for (const auto& p : paths) {
        auto part = load_corpus(p);
        c.append(part.passages());
    }
    return c;
}

PassageLookup lookup_of(const Corpus& c) {
    return [&c](std::string_view id) { return c.find(id); };
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_atomic(path, dump_compact(j) + "\n");
}

std::vector<std::string> entities_for(const Question& q, const EntityLinking& linking) {
    if (auto it = linking.find(q.id); it != linking.end()) return it->second;
    return q.linked_entities;
}

std::vector<std::vector<ScoredDoc>> dense_hits(const DenseIndex& index, std::span<const Question> qs,
                                               Embedder& embedder, std::size_t k) {
    if (embedder.dim() != index.dim()) {
        throw ValidationError("embedder dim " + std::to_string(embedder.dim()) +
                              " does not match index dim " + std::to_string(index.dim()));
    }
    std::vector<std::string> texts;
    for (const auto& q : qs) texts.push_back(q.text);
    const auto vecs = embedder.embed_batch(texts);
    std::vector<std::vector<ScoredDoc>> out;
    for (const auto& v : vecs) out.push_back(search_dense(index, v, k));
    return out;
}

struct KbSide {
    std::vector<std::vector<ScoredDoc>> hits;
    std::vector<Passage> passages;
};

KbSide kb_hits(std::span<const Question> qs, const std::string& kb_path, const std::string& linking_path,
               Embedder& embedder, const PipelineConfig& c) {
    const KBGraph graph(load_kb(kb_path));
    const EntityLinking linking = linking_path.empty() ? EntityLinking{} : load_linking(linking_path);
    RelationEmbeddingCache cache;
    KbSide out;
    for (const auto& q : qs) {
        auto kb = kb_candidates_for_question(q, graph, entities_for(q, linking), embedder, c.k_total,
                                             c.token_limit, &cache);
        out.passages.insert(out.passages.end(), kb.passages.begin(), kb.passages.end());
        out.hits.push_back(std::move(kb.docs));
    }
    return out;
}

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoul(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("bad integer list \"" + s + "\"");
        }
    }
    if (out.empty()) throw ValidationError("empty integer list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous-source open-domain QA toolkit"};
    app.require_subcommand(1);
    Settings s;
    app.add_option("--config", s.config_path, "key = value config file");
    app.add_option("--set", s.sets, "override a config key (key=value), repeatable");
    app.add_flag("--emit-config", s.emit_config, "print the resolved config and exit");
    config_flag(&app, s, "--token-limit", "token_limit", "passage token limit");
    config_flag(&app, s, "--seed", "seed", "random seed");
    config_flag(&app, s, "--embedder", "embedder", "stub or remote");
    config_flag(&app, s, "--embed-endpoint", "embed_endpoint", "embedding service URL");
    config_flag(&app, s, "--embed-dim", "embed_dim", "embedding dimension");

    std::function<void(const PipelineConfig&)> run;

    // flatten-kb
    std::string kb_in, out_path;
    auto* fkb = app.add_subcommand("flatten-kb", "KB JSONL -> packed KB passages");
    fkb->add_option("--kb", kb_in, "KB relations JSONL")->required();
    fkb->add_option("--out", out_path, "output corpus JSONL")->required();
    fkb->callback([&] {
        run = [&](const PipelineConfig& c) {
            const auto rels = load_kb(kb_in);
            if (rels.empty()) log("warning: " + kb_in + " has no relations");
            const auto passages = flatten_kb(rels, c.token_limit);
            write_corpus(passages, out_path);
            log(std::to_string(rels.size()) + " relations -> " + std::to_string(passages.size()) + " passages");
        };
    });

    // flatten-tables
    std::string tables_in, tables_out;
    auto* ftab = app.add_subcommand("flatten-tables", "table JSONL -> table chunk passages");
    ftab->add_option("--tables", tables_in, "raw tables JSONL")->required();
    ftab->add_option("--out", out_path, "output corpus JSONL")->required();
    ftab->add_option("--tables-out", tables_out, "also write the extracted, filtered tables");
    config_flag(ftab, s, "--mode", "table_mode", "simple or template");
    ftab->callback([&] {
        run = [&](const PipelineConfig& c) {
            const auto raw = load_raw_tables(tables_in);
            const auto tables = extract_tables(raw);
            const auto flat = flatten_tables(std::span<const Table>(tables), c.token_limit,
                                             parse_linearization_mode(c.table_mode));
            write_corpus(flat.passages, out_path);
            if (!tables_out.empty()) write_tables(filter_tables(tables).kept, tables_out);
            log(std::to_string(flat.tables_kept) + " of " + std::to_string(flat.tables_in) + " tables kept (" +
                std::to_string(flat.dropped_single_row) + " single-row, " +
                std::to_string(flat.dropped_service) + " service), " +
                std::to_string(flat.passages.size()) + " chunks");
        };
    });

    // import-html-tables
    std::string html_in, page_title, id_prefix = "t";
    auto* imp = app.add_subcommand("import-html-tables", "HTML page -> raw tables JSONL");
    imp->add_option("--html", html_in, "HTML file")->required();
    imp->add_option("--page-title", page_title, "page title for every table");
    imp->add_option("--id-prefix", id_prefix, "table id prefix");
    imp->add_option("--out", out_path, "output tables JSONL")->required();
    imp->callback([&] {
        run = [&](const PipelineConfig&) {
            std::ifstream in(html_in, std::ios::binary);
            if (!in) throw IoError(html_in, "cannot open input");
            std::ostringstream ss;
            ss << in.rdbuf();
            const auto tables = import_html_tables(ss.str(), page_title, id_prefix);
            write_raw_tables(tables, out_path);
            log(std::to_string(tables.size()) + " top-level tables");
        };
    });

    // build-index
    std::string index_kind;
    std::vector<std::string> corpus_in;
    auto* bidx = app.add_subcommand("build-index", "build a dense, bm25 or joint index");
    bidx->add_option("kind", index_kind, "dense | bm25 | joint")
        ->required()
        ->check(CLI::IsMember({"dense", "bm25", "joint"}));
    bidx->add_option("--corpus", corpus_in, "corpus JSONL (joint: one per source)")->required();
    bidx->add_option("--out", out_path, "index file")->required();
    config_flag(bidx, s, "--k1", "bm25_k1", "BM25 k1");
    config_flag(bidx, s, "--b", "bm25_b", "BM25 b");
    bidx->callback([&] {
        run = [&](const PipelineConfig& c) {
            if (index_kind == "dense" && corpus_in.size() != 1) {
                throw ValidationError("dense index takes exactly one --corpus; use joint for several");
            }
            const Corpus corpus = load_corpora(corpus_in);
            if (index_kind == "bm25") {
                Bm25Index::build(corpus.passages(), {c.bm25_k1, c.bm25_b}).save(out_path);
            } else {
                auto embedder = make_embedder(c);
                DenseIndex::build(corpus.passages(), *embedder).save(out_path);
            }
            log(index_kind + " index over " + std::to_string(corpus.size()) + " passages");
        };
    });

    // retrieve
    std::string retrieve_kind, index_in, questions_in, linking_in, kb_corpus_out;
    auto* ret = app.add_subcommand("retrieve", "retrieve for every question");
    ret->add_option("kind", retrieve_kind, "joint | quota")->required()->check(CLI::IsMember({"joint", "quota"}));
    ret->add_option("--index", index_in, "dense index over the main sources")->required();
    ret->add_option("--questions", questions_in, "questions JSONL")->required();
    ret->add_option("--kb", kb_in, "KB relations JSONL (quota)");
    ret->add_option("--linking", linking_in, "entity linking JSONL (quota)");
    ret->add_option("--kb-corpus-out", kb_corpus_out, "where to write the per-question KB passages (quota)");
    ret->add_option("--out", out_path, "retrieval JSONL")->required();
    config_flag(ret, s, "--k", "k_total", "results per question");
    config_flag(ret, s, "--kb-quota", "kb_quota", "KB slots (quota)");
    ret->callback([&] {
        run = [&](const PipelineConfig& c) {
            const auto index = DenseIndex::load(index_in);
            const auto qs = load_questions(questions_in);
            auto embedder = make_embedder(c);
            auto main = dense_hits(index, qs, *embedder, c.k_total);
            std::vector<RetrievalResult> results;
            if (retrieve_kind == "joint") {
                for (std::size_t i = 0; i < qs.size(); ++i) results.push_back({qs[i].id, std::move(main[i])});
            } else {
                if (kb_in.empty() || kb_corpus_out.empty()) {
                    throw ValidationError("retrieve quota needs --kb and --kb-corpus-out");
                }
                auto kb = kb_hits(qs, kb_in, linking_in, *embedder, c);
                const QuotaPolicy policy{c.k_total, c.kb_quota};
                for (std::size_t i = 0; i < qs.size(); ++i) {
                    results.push_back({qs[i].id, merge_quota(main[i], kb.hits[i], policy)});
                }
                write_corpus(kb.passages, kb_corpus_out);
            }
            write_retrieval(results, out_path);
            log(std::to_string(results.size()) + " questions retrieved");
        };
    });

    // tune-quota
    std::string candidates_arg = "0,5,10,20,30,50";
    auto* tune = app.add_subcommand("tune-quota", "pick the KB quota maximizing dev recall");
    tune->add_option("--index", index_in, "dense index over the main sources")->required();
    tune->add_option("--corpus", corpus_in, "corpora the index was built from")->required();
    tune->add_option("--questions", questions_in, "dev questions JSONL")->required();
    tune->add_option("--kb", kb_in, "KB relations JSONL")->required();
    tune->add_option("--linking", linking_in, "entity linking JSONL");
    tune->add_option("--candidates", candidates_arg, "comma-separated quotas");
    tune->add_option("--out", out_path, "JSON report")->required();
    config_flag(tune, s, "--k", "k_total", "results per question");
    tune->callback([&] {
        run = [&](const PipelineConfig& c) {
            const auto index = DenseIndex::load(index_in);
            const Corpus corpus = load_corpora(corpus_in);
            const auto qs = load_questions(questions_in);
            auto embedder = make_embedder(c);
            const auto main = dense_hits(index, qs, *embedder, c.k_total);
            auto kb = kb_hits(qs, kb_in, linking_in, *embedder, c);
            const Corpus kb_corpus(kb.passages);
            std::unordered_map<std::string, std::size_t> pos;
            for (std::size_t i = 0; i < qs.size(); ++i) pos.emplace(qs[i].id, i);
            const auto candidates = parse_list(candidates_arg);
            const auto t = tune_quota(
                qs, [&](const Question& q) { return main[pos.at(q.id)]; },
                [&](const Question& q) { return kb.hits[pos.at(q.id)]; },
                [&](std::string_view id) {
                    const Passage* p = corpus.find(id);
                    return p ? p : kb_corpus.find(id);
                },
                candidates, c.k_total);
            nlohmann::json table = nlohmann::json::array();
            for (const auto& [q, r] : t.recall_by_quota) {
                table.push_back({{"kb_quota", q}, {"recall", r}});
                std::cout << "kb_quota " << q << "  R@" << c.k_total << " " << r << "\n";
            }
            write_json_file(out_path, {{"k_total", t.best.k_total}, {"kb_quota", t.best.kb_quota}, {"candidates", table}});
            log("best kb_quota " + std::to_string(t.best.kb_quota));
        };
    });

    // build-trainset
    std::string bm25_in;
    std::size_t negatives = 1;
    std::string drop_report;
    auto* bts = app.add_subcommand("build-trainset", "positives and BM25 hard negatives");
    bts->add_option("--questions", questions_in, "questions JSONL")->required();
    bts->add_option("--corpus", corpus_in, "corpus JSONL, repeatable")->required();
    bts->add_option("--bm25", bm25_in, "prebuilt BM25 index (built on the fly otherwise)");
    bts->add_option("--tables", tables_in, "raw tables JSONL, for resampling table positives");
    bts->add_option("--negatives", negatives, "hard negatives per question");
    bts->add_option("--out", out_path, "training samples JSONL")->required();
    bts->callback([&] {
        run = [&](const PipelineConfig& c) {
            const Corpus corpus = load_corpora(corpus_in);
            const auto qs = load_questions(questions_in);
            const Bm25Index bm25 = bm25_in.empty() ? Bm25Index::build(corpus.passages(), {c.bm25_k1, c.bm25_b})
                                                   : Bm25Index::load(bm25_in);
            std::vector<Table> tables;
            if (!tables_in.empty()) tables = extract_tables(load_raw_tables(tables_in));
            TrainsetOptions opt;
            opt.negatives_per_q = negatives;
            opt.token_limit = c.token_limit;
            opt.seed = c.seed;
            const auto built = build_samples_bm25(qs, corpus, bm25, opt, tables);
            write_training_samples(built.samples, out_path);
            log(std::to_string(built.samples.size()) + " samples, " + std::to_string(built.dropped_no_positive) +
                " dropped without a positive, " + std::to_string(built.flagged) + " flagged");
        };
    });

    // mine-negatives
    std::string samples_in;
    std::vector<std::string> rounds_in;
    auto* mine = app.add_subcommand("mine-negatives", "replace negatives with retriever-mined ones");
    mine->add_option("--samples", samples_in, "training samples JSONL")->required();
    mine->add_option("--corpus", corpus_in, "corpus JSONL, repeatable")->required();
    mine->add_option("--round", rounds_in, "retrieval JSONL of each round's retriever, in order")->required();
    mine->add_option("--negatives", negatives, "hard negatives per question");
    mine->add_option("--out", out_path, "training samples JSONL")->required();
    mine->callback([&] {
        run = [&](const PipelineConfig&) {
            const Corpus corpus = load_corpora(corpus_in);
            const auto samples = load_training_samples(samples_in);
            std::vector<std::unordered_map<std::string, std::vector<std::string>>> rankings;
            for (const auto& path : rounds_in) {
                auto& m = rankings.emplace_back();
                for (const auto& r : load_retrieval(path)) {
                    auto& ids = m[r.question_id];
                    for (const auto& d : r.docs) ids.push_back(d.doc_id);
                }
            }
            const auto mined = mine_iterative_negatives(
                samples,
                [&](const Question& q, std::size_t round) {
                    const auto& m = rankings.at(round - 1);
                    auto it = m.find(q.id);
                    if (it == m.end()) throw ValidationError("round " + std::to_string(round) + " has no ranking for \"" + q.id + "\"");
                    return it->second;
                },
                lookup_of(corpus), rankings.size(), negatives);
            write_training_samples(mined.samples, out_path);
            for (const auto& r : mined.rounds) {
                log("round " + std::to_string(r.round) + (r.aborted ? " aborted: " + r.error : "") +
                    " overlap " + std::to_string(r.overlap) + " flagged " + std::to_string(r.flagged));
            }
        };
    });

    // mix
    std::vector<std::string> mix_in;
    auto* mix = app.add_subcommand("mix", "upsample and shuffle several training sets");
    mix->add_option("--input", mix_in, "tag=path:factor, repeatable")->required();
    mix->add_option("--out", out_path, "mixed samples JSONL")->required();
    mix->callback([&] {
        run = [&](const PipelineConfig& c) {
            std::vector<DatasetStream> streams;
            for (const auto& spec : mix_in) {
                const auto eq = spec.find('=');
                const auto colon = spec.rfind(':');
                if (eq == std::string::npos || colon == std::string::npos || colon < eq) {
                    throw ValidationError("--input expects tag=path:factor, got \"" + spec + "\"");
                }
                DatasetStream ds;
                ds.tag = spec.substr(0, eq);
                ds.factor = parse_list(spec.substr(colon + 1)).at(0);
                ds.samples = load_training_samples(spec.substr(eq + 1, colon - eq - 1));
                streams.push_back(std::move(ds));
            }
            const auto mixed = mix_datasets(streams, c.seed);
            AtomicWriter w(out_path);
            for (const auto& m : mixed) {
                auto j = to_json(m.sample);
                j["dataset"] = m.tag;
                w.write_json_line(j);
            }
            w.commit();
            log(std::to_string(mixed.size()) + " mixed samples");
        };
    });

    // read
    std::string retrieval_in;
    auto* rd = app.add_subcommand("read", "answer every question from its retrieved passages");
    rd->add_option("--questions", questions_in, "questions JSONL")->required();
    rd->add_option("--retrieval", retrieval_in, "retrieval JSONL")->required();
    rd->add_option("--corpus", corpus_in, "corpus JSONL, repeatable")->required();
    rd->add_option("--out", out_path, "predictions JSONL")->required();
    config_flag(rd, s, "--reader", "reader", "baseline or remote");
    config_flag(rd, s, "--reader-endpoint", "reader_endpoint", "reader service URL");
    config_flag(rd, s, "--contexts", "reader_contexts", "contexts per question");
    rd->callback([&] {
        run = [&](const PipelineConfig& c) {
            const Corpus corpus = load_corpora(corpus_in);
            const auto qs = load_questions(questions_in);
            std::unordered_map<std::string, std::vector<ScoredDoc>> docs;
            for (auto& r : load_retrieval(retrieval_in)) docs[r.question_id] = std::move(r.docs);
            std::vector<ReaderRequest> reqs;
            for (const auto& q : qs) reqs.push_back(make_reader_request(q, docs[q.id], lookup_of(corpus), c.reader_contexts));
            Predictions preds;
            std::size_t empty = 0;
            if (c.reader == "remote") {
                const auto answers = RemoteReader(c.reader_endpoint).read_all(reqs);
                for (std::size_t i = 0; i < qs.size(); ++i) {
                    preds[qs[i].id] = answers[i].answer;
                    empty += answers[i].empty ? 1 : 0;
                }
            } else {
                for (std::size_t i = 0; i < qs.size(); ++i) {
                    preds[qs[i].id] = read_baseline(reqs[i]);
                    empty += preds[qs[i].id].empty() ? 1 : 0;
                }
            }
            write_predictions(preds, qs, out_path);
            log(std::to_string(qs.size()) + " answered, " + std::to_string(empty) + " empty");
        };
    });

    // eval
    std::string eval_kind, predictions_in, retrieval_b, predictions_b, ks_arg = "1,5,20,100";
    std::size_t attribution_k = 100;
    auto* ev = app.add_subcommand("eval", "recall@k, EM, or source attribution");
    ev->add_option("kind", eval_kind, "recall | em | attribution")
        ->required()
        ->check(CLI::IsMember({"recall", "em", "attribution"}));
    ev->add_option("--questions", questions_in, "gold questions JSONL")->required();
    ev->add_option("--retrieval", retrieval_in, "retrieval JSONL (recall; baseline for attribution)");
    ev->add_option("--corpus", corpus_in, "corpus JSONL, repeatable (recall, attribution)");
    ev->add_option("--predictions", predictions_in, "predictions JSONL (em; baseline for attribution)");
    ev->add_option("--retrieval-b", retrieval_b, "candidate retrieval JSONL (attribution)");
    ev->add_option("--predictions-b", predictions_b, "candidate predictions JSONL (attribution)");
    ev->add_option("--ks", ks_arg, "comma-separated k values (recall)");
    ev->add_option("--attribution-k", attribution_k, "retrieved docs inspected (attribution)");
    ev->add_option("--out", out_path, "metrics JSON");
    ev->callback([&] {
        run = [&](const PipelineConfig&) {
            const auto qs = load_questions(questions_in);
            const auto need = [](const std::string& v, const char* flag) {
                if (v.empty()) throw ValidationError(std::string("eval needs ") + flag);
            };
            nlohmann::json result;
            if (eval_kind == "recall") {
                need(retrieval_in, "--retrieval");
                const Corpus corpus = load_corpora(corpus_in);
                const auto m = recall_at_k(load_retrieval(retrieval_in), qs, lookup_of(corpus), parse_list(ks_arg));
                std::cout << format_metrics(m);
                result = to_json(m);
            } else if (eval_kind == "em") {
                need(predictions_in, "--predictions");
                const auto m = exact_match(load_predictions(predictions_in), qs);
                std::cout << format_metrics(m);
                result = to_json(m);
            } else {
                need(retrieval_in, "--retrieval");
                need(retrieval_b, "--retrieval-b");
                need(predictions_in, "--predictions");
                need(predictions_b, "--predictions-b");
                const Corpus corpus = load_corpora(corpus_in);
                const auto rep = source_attribution(load_retrieval(retrieval_in), load_retrieval(retrieval_b),
                                                    load_predictions(predictions_in),
                                                    load_predictions(predictions_b), qs, lookup_of(corpus),
                                                    attribution_k);
                result = to_json(rep);
                std::cout << "improved " << rep.n_improved << " of " << rep.n_questions
                          << (rep.degenerate ? " (degenerate comparison)" : "") << "\n";
                for (const auto& sh : rep.shares) {
                    std::cout << to_string(sh.source) << "  full " << sh.full_set << "  improved "
                              << sh.improvement_set << "\n";
                }
            }
            if (!out_path.empty()) write_json_file(out_path, result);
        };
    });

    // e2e
    auto* e2e = app.add_subcommand("e2e", "flatten, index, fuse, read and evaluate");
    config_flag(e2e, s, "--kb", "kb", "KB relations JSONL");
    config_flag(e2e, s, "--tables", "tables", "raw tables JSONL");
    config_flag(e2e, s, "--text", "text", "text passages JSONL");
    config_flag(e2e, s, "--questions", "questions", "questions JSONL");
    config_flag(e2e, s, "--linking", "linking", "entity linking JSONL");
    config_flag(e2e, s, "--out-dir", "output_dir", "output directory");
    config_flag(e2e, s, "--k", "k_total", "results per question");
    config_flag(e2e, s, "--kb-quota", "kb_quota", "KB slots");
    config_flag(e2e, s, "--tune-quota", "tune_quota", "tune the quota on the questions (true/false)");
    config_flag(e2e, s, "--mode", "table_mode", "simple or template");
    config_flag(e2e, s, "--reader", "reader", "baseline or remote");
    config_flag(e2e, s, "--reader-endpoint", "reader_endpoint", "reader service URL");
    e2e->callback([&] {
        run = [&](const PipelineConfig& c) {
            const auto res = run_e2e(c, [](std::string_view m) { log(std::string(m)); });
            std::cout << format_metrics(res.metrics);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const PipelineConfig config = s.resolve();
        if (s.emit_config) {
            std::cout << format_config(config);
            return 0;
        }
        run(config);
        return 0;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
