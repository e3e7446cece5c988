#include "hetqa/trainset.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "hetqa/error.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/rng.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

std::vector<ScoredDoc> ranked_for(const Bm25Index& bm25, const Question& q, std::size_t depth) {
    if (depth == 0 || bm25.doc_count() == 0) return {};
    return bm25.search(q.text, std::min(depth, bm25.doc_count()));
}

}  // namespace

TrainsetBuild build_samples_bm25(std::span<const Question> questions, const Corpus& corpus,
                                 const Bm25Index& bm25, const TrainsetOptions& options,
                                 std::span<const Table> tables) {
    std::unordered_map<std::string_view, const Table*> table_by_id;
    for (const auto& t : tables) table_by_id.emplace(t.id, &t);

    TrainsetBuild out;
    for (const auto& q : questions) {
        if (q.answers.empty()) throw ValidationError("question \"" + q.id + "\" has no answers");
        const AnswerMatcher matcher(q.answers);
        const auto passage_of = [&](const ScoredDoc& d) -> const Passage& {
            const Passage* p = corpus.find(d.doc_id);
            if (!p) throw ValidationError("BM25 index references unknown passage \"" + d.doc_id + "\"");
            return *p;
        };

        auto ranked = ranked_for(bm25, q, options.search_depth);
        const Passage* positive = nullptr;
        for (const auto& d : ranked) {
            const Passage& p = passage_of(d);
            if (matcher.matches(p.text)) {
                positive = &p;
                break;
            }
        }
        if (!positive && ranked.size() == options.search_depth) {
            for (const auto& d : ranked_for(bm25, q, bm25.doc_count())) {
                const Passage& p = passage_of(d);
                if (matcher.matches(p.text)) {
                    positive = &p;
                    break;
                }
            }
        }
        // Passages sharing no term with the question tie at zero and rank by id.
        if (!positive) {
            for (const auto& p : corpus.passages()) {
                if (matcher.matches(p.text) && (!positive || p.id < positive->id)) positive = &p;
            }
        }
        if (!positive) {
            ++out.dropped_no_positive;
            continue;
        }

        TrainingSample s;
        s.question = q;
        s.positive = *positive;
        if (positive->provenance && !positive->provenance->table_id.empty()) {
            auto it = table_by_id.find(positive->provenance->table_id);
            if (it != table_by_id.end()) {
                const std::uint64_t seed = options.seed ^ text::fnv1a64(q.id);
                if (auto chunk = sample_positive_chunk(*it->second, q.answers, options.token_limit, seed)) {
                    s.positive = std::move(chunk->passage);
                }
            }
        }
        for (const auto& d : ranked) {
            if (s.hard_negatives.size() >= options.negatives_per_q) break;
            if (d.doc_id == positive->id) continue;
            const Passage& p = passage_of(d);
            if (!matcher.matches(p.text)) s.hard_negatives.push_back(p);
        }
        s.flagged = s.hard_negatives.size() < options.negatives_per_q;
        out.flagged += s.flagged ? 1 : 0;
        out.samples.push_back(std::move(s));
    }
    return out;
}

MiningResult mine_iterative_negatives(std::span<const TrainingSample> samples,
                                      const RoundRetriever& retriever, const PassageLookup& passages,
                                      std::size_t round_count, std::size_t negatives_per_q) {
    if (round_count == 0) throw ValidationError("round_count must be at least 1");
    MiningResult res;
    res.samples.assign(samples.begin(), samples.end());

    for (std::size_t round = 1; round <= round_count; ++round) {
        RoundStats stats;
        stats.round = round;
        std::vector<std::vector<Passage>> next(res.samples.size());
        std::size_t reused = 0, total = 0;
        try {
            for (std::size_t i = 0; i < res.samples.size(); ++i) {
                const TrainingSample& s = res.samples[i];
                const AnswerMatcher matcher(s.question.answers);
                std::unordered_set<std::string> before;
                for (const auto& n : s.hard_negatives) before.insert(n.id);
                for (const auto& id : retriever(s.question, round)) {
                    if (next[i].size() >= negatives_per_q) break;
                    if (id == s.positive.id) continue;
                    const Passage* p = passages(id);
                    if (!p) throw ValidationError("retriever returned unknown passage \"" + id + "\"");
                    if (matcher.matches(p->text)) continue;
                    if (std::any_of(next[i].begin(), next[i].end(),
                                    [&](const Passage& n) { return n.id == id; })) {
                        continue;
                    }
                    next[i].push_back(*p);
                    reused += before.count(id);
                    ++total;
                }
            }
        } catch (const std::exception& e) {
            stats.aborted = true;
            stats.error = e.what();
            for (const auto& s : res.samples) stats.flagged += s.flagged ? 1 : 0;
            res.rounds.push_back(std::move(stats));
            continue;
        }
        for (std::size_t i = 0; i < res.samples.size(); ++i) {
            res.samples[i].hard_negatives = std::move(next[i]);
            res.samples[i].flagged = res.samples[i].hard_negatives.size() < negatives_per_q;
            stats.flagged += res.samples[i].flagged ? 1 : 0;
        }
        stats.overlap = total ? static_cast<double>(reused) / static_cast<double>(total) : 0.0;
        res.rounds.push_back(std::move(stats));
    }
    return res;
}

std::vector<MixedSample> mix_datasets(std::span<const DatasetStream> streams, std::uint64_t seed) {
    std::vector<MixedSample> out;
    for (const auto& s : streams) {
        if (s.factor == 0) throw ValidationError("upsample factor for \"" + s.tag + "\" must be >= 1");
        for (std::size_t r = 0; r < s.factor; ++r) {
            for (const auto& sample : s.samples) out.push_back({s.tag, sample});
        }
    }
    Rng rng(seed);
    rng.shuffle(std::span<MixedSample>(out));
    return out;
}

nlohmann::json to_json(const TrainingSample& s) {
    nlohmann::json negs = nlohmann::json::array();
    for (const auto& n : s.hard_negatives) negs.push_back(to_json(n));
    nlohmann::json j = {{"question", to_json(s.question)},
                        {"positive", to_json(s.positive)},
                        {"hard_negatives", std::move(negs)}};
    if (s.flagged) j["flagged"] = true;
    return j;
}

TrainingSample training_sample_from_json(const nlohmann::json& j) {
    TrainingSample s;
    s.question = question_from_json(require(j, "question"));
    s.positive = passage_from_json(require(j, "positive"));
    for (const auto& n : require(j, "hard_negatives")) s.hard_negatives.push_back(passage_from_json(n));
    if (j.contains("flagged")) s.flagged = j.at("flagged").get<bool>();
    return s;
}

std::vector<TrainingSample> load_training_samples(const std::filesystem::path& path) {
    std::vector<TrainingSample> out;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        out.push_back(training_sample_from_json(j));
    });
    return out;
}

void write_training_samples(std::span<const TrainingSample> samples,
                            const std::filesystem::path& path) {
    AtomicWriter w(path);
    for (const auto& s : samples) w.write_json_line(to_json(s));
    w.commit();
}

}  // namespace hetqa
