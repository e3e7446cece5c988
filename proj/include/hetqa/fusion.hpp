#pragma once

// Multi-source retrieval: one joint dense index, or separate main and KB
// retrieval merged under a fixed KB quota tuned for dev-set recall.

#include <cstddef>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetqa/corpus.hpp"
#include "hetqa/eval.hpp"
#include "hetqa/index.hpp"
#include "hetqa/kb_flatten.hpp"

namespace hetqa {

struct QuotaPolicy {
    std::size_t k_total = 100;
    std::size_t kb_quota = 0;

    /// Throws ValidationError unless kb_quota <= k_total.
    void validate() const;
    bool operator==(const QuotaPolicy&) const = default;
};

inline const std::vector<std::size_t> kDefaultQuotaCandidates{0, 5, 10, 20, 30, 50};

/// Dense search over an index holding every non-KB source together.
std::vector<ScoredDoc> retrieve_joint(const DenseIndex& joint_index, std::span<const double> query,
                                      std::size_t k);

/// Takes the top min(kb_quota, |kb|) KB docs and fills the rest of k_total
/// from main; a shortfall on either side is backfilled from the other. Doc ids
/// already taken are skipped. The merged set is returned in ranked order.
std::vector<ScoredDoc> merge_quota(std::span<const ScoredDoc> main_results,
                                   std::span<const ScoredDoc> kb_results, const QuotaPolicy& policy);

using Retriever = std::function<std::vector<ScoredDoc>(const Question&)>;

struct QuotaTuning {
    QuotaPolicy best;
    std::vector<std::pair<std::size_t, double>> recall_by_quota;  // candidate order
};

/// Evaluates recall@k_total of merge_quota for every candidate quota on the
/// dev questions and returns the best (ties go to the smaller quota).
/// Candidates above k_total are rejected.
QuotaTuning tune_quota(std::span<const Question> dev_questions, const Retriever& main_retriever,
                       const Retriever& kb_retriever, const PassageLookup& passages,
                       std::span<const std::size_t> candidate_quotas, std::size_t k_total);

/// Relation embeddings keyed by relation id; safe for concurrent use.
class RelationEmbeddingCache {
public:
    /// Embeds (with `embedder`) only the relations not cached yet.
    std::vector<std::vector<float>> get_or_embed(std::span<const RelationSentence> sentences,
                                                 Embedder& embedder);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::vector<float>> cache_;
};

struct KbCandidates {
    std::vector<Passage> passages;
    std::vector<ScoredDoc> docs;  // ranked; one per passage
    std::size_t neighborhood_size = 0;
    std::size_t unknown_seeds = 0;
};

/// Per-question KB retrieval: 2-hop neighborhood of the linked entities,
/// linearized and scored against the question embedding, the top k relations
/// packed into passages. A passage scores the max of its member relations.
/// Passage ids are "<question id>/kb#<n>".
KbCandidates kb_candidates_for_question(const Question& question, const KBGraph& graph,
                                        std::span<const std::string> linked_entities,
                                        Embedder& embedder, std::size_t k,
                                        std::size_t token_limit = 100,
                                        RelationEmbeddingCache* cache = nullptr);

}  // namespace hetqa
