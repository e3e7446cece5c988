#include "hetqa/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "hetqa/error.hpp"

namespace hetqa {

void QuotaPolicy::validate() const {
    if (kb_quota > k_total) {
        throw ValidationError("kb_quota " + std::to_string(kb_quota) + " exceeds k_total " +
                              std::to_string(k_total));
    }
}

std::vector<ScoredDoc> retrieve_joint(const DenseIndex& joint_index, std::span<const double> query,
                                      std::size_t k) {
    return joint_index.search(query, k);
}

std::vector<ScoredDoc> merge_quota(std::span<const ScoredDoc> main_results,
                                   std::span<const ScoredDoc> kb_results, const QuotaPolicy& policy) {
    policy.validate();
    std::vector<ScoredDoc> out;
    std::unordered_set<std::string> taken;
    std::size_t next_main = 0, next_kb = 0;

    const auto take = [&](std::span<const ScoredDoc> from, std::size_t& cursor, std::size_t want) {
        std::size_t got = 0;
        while (got < want && cursor < from.size()) {
            const ScoredDoc& d = from[cursor++];
            if (taken.insert(d.doc_id).second) {
                out.push_back(d);
                ++got;
            }
        }
        return got;
    };

    const std::size_t kb_taken = take(kb_results, next_kb, policy.kb_quota);
    take(main_results, next_main, policy.k_total - kb_taken);
    // Backfill whichever side ran short.
    take(kb_results, next_kb, policy.k_total - out.size());
    take(main_results, next_main, policy.k_total - out.size());
    sort_ranked(out);
    return out;
}

QuotaTuning tune_quota(std::span<const Question> dev_questions, const Retriever& main_retriever,
                       const Retriever& kb_retriever, const PassageLookup& passages,
                       std::span<const std::size_t> candidate_quotas, std::size_t k_total) {
    if (candidate_quotas.empty()) throw ValidationError("no candidate quotas given");
    std::vector<std::vector<ScoredDoc>> main, kb;
    main.reserve(dev_questions.size());
    kb.reserve(dev_questions.size());
    for (const auto& q : dev_questions) {
        main.push_back(main_retriever(q));
        kb.push_back(kb_retriever(q));
    }
    QuotaTuning res;
    double best_recall = -1.0;
    const std::size_t ks[] = {k_total};
    for (std::size_t quota : candidate_quotas) {
        const QuotaPolicy policy{k_total, quota};
        policy.validate();
        std::vector<RetrievalResult> merged;
        merged.reserve(dev_questions.size());
        for (std::size_t i = 0; i < dev_questions.size(); ++i) {
            merged.push_back({dev_questions[i].id, merge_quota(main[i], kb[i], policy)});
        }
        const double recall = recall_at_k(merged, dev_questions, passages, ks).recall_at.at(k_total);
        res.recall_by_quota.emplace_back(quota, recall);
        if (recall > best_recall || (recall == best_recall && quota < res.best.kb_quota)) {
            best_recall = recall;
            res.best = policy;
        }
    }
    return res;
}

std::vector<std::vector<float>> RelationEmbeddingCache::get_or_embed(
    std::span<const RelationSentence> sentences, Embedder& embedder) {
    std::vector<std::vector<float>> out(sentences.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard lock(mu_);
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            auto it = cache_.find(sentences[i].relation_id);
            if (it != cache_.end()) {
                out[i] = it->second;
            } else {
                missing.push_back(i);
            }
        }
    }
    if (missing.empty()) return out;
    std::vector<std::string> texts;
    texts.reserve(missing.size());
    for (auto i : missing) texts.push_back(sentences[i].text);
    const auto vecs = embedder.embed_batch(texts);
    if (vecs.size() != texts.size()) throw ValidationError("embedder returned the wrong vector count");
    std::lock_guard lock(mu_);
    for (std::size_t m = 0; m < missing.size(); ++m) {
        if (vecs[m].size() != embedder.dim()) throw ValidationError("embedder returned the wrong dim");
        auto [it, inserted] = cache_.try_emplace(sentences[missing[m]].relation_id, to_float(vecs[m]));
        out[missing[m]] = it->second;
    }
    return out;
}

std::size_t RelationEmbeddingCache::size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
}

KbCandidates kb_candidates_for_question(const Question& question, const KBGraph& graph,
                                        std::span<const std::string> linked_entities,
                                        Embedder& embedder, std::size_t k, std::size_t token_limit,
                                        RelationEmbeddingCache* cache) {
    KbCandidates out;
    if (linked_entities.empty() || k == 0) return out;
    const Neighborhood hood = two_hop_neighborhood(graph, linked_entities);
    out.neighborhood_size = hood.relations.size();
    out.unknown_seeds = hood.unknown_seeds;
    if (hood.relations.empty()) return out;

    std::vector<RelationSentence> sentences;
    sentences.reserve(hood.relations.size());
    for (auto r : hood.relations) sentences.push_back(to_sentence(graph.relations()[r]));

    std::vector<std::vector<float>> rel_vecs;
    if (cache) {
        rel_vecs = cache->get_or_embed(sentences, embedder);
    } else {
        std::vector<std::string> texts;
        for (const auto& s : sentences) texts.push_back(s.text);
        for (const auto& v : embedder.embed_batch(texts)) rel_vecs.push_back(to_float(v));
    }
    const std::string qtext[] = {question.text};
    const auto qvec = to_float(embedder.embed_batch(qtext).at(0));

    std::vector<double> scores(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (rel_vecs[i].size() != qvec.size()) throw ValidationError("embedder returned the wrong dim");
        scores[i] = inner_product(qvec, rel_vecs[i]);
    }
    std::vector<std::size_t> order(sentences.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return sentences[a].relation_id < sentences[b].relation_id;
    });
    order.resize(std::min(k, order.size()));

    std::vector<RelationSentence> ranked;
    std::unordered_map<std::string, double> score_of;
    for (auto i : order) {
        ranked.push_back(sentences[i]);
        score_of[sentences[i].relation_id] = scores[i];
    }
    out.passages = pack_relations(ranked, token_limit, question.id + "/kb");
    for (const auto& p : out.passages) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& rid : p.provenance->relation_ids) best = std::max(best, score_of.at(rid));
        out.docs.push_back({p.id, best, SourceType::kb});
    }
    sort_ranked(out.docs);
    return out;
}

}  // namespace hetqa
