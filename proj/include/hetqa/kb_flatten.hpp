#pragma once

// Knowledge-base relations to text: triple and hyper-relation linearization,
// 2-hop neighborhoods around linked entities, and packing ranked relation
// sentences into passage-sized documents.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hetqa/corpus.hpp"

namespace hetqa {

struct KBEntity {
    std::string id;
    std::string surface;
    bool operator==(const KBEntity&) const = default;
};

/// Relation object: an entity (graph node) or a literal (terminal).
struct KBObject {
    std::string surface;
    std::string entity_id;  // empty for literals

    bool is_entity() const { return !entity_id.empty(); }
    static KBObject entity(KBEntity e) { return {std::move(e.surface), std::move(e.id)}; }
    static KBObject literal(std::string value) { return {std::move(value), {}}; }
    bool operator==(const KBObject&) const = default;
};

struct KBTriple {
    KBEntity subject;
    std::string predicate;
    KBObject object;
};

struct KBClause {
    std::string predicate;
    KBObject object;
    bool operator==(const KBClause&) const = default;
};

/// A subject with a primary predicate/object pair and ordered qualifier
/// pairs. With no qualifiers it is a plain triple.
struct HyperRelation {
    std::string id;
    KBEntity subject;
    KBClause primary;
    std::vector<KBClause> qualifiers;

    KBTriple primary_triple() const { return {subject, primary.predicate, primary.object}; }
};

/// "<subject> <predicate> <object>." Throws ValidationError naming the part
/// (subject, predicate or object) whose surface form is empty.
std::string linearize_triple(const KBTriple& t);

/// "<subject> <p0> <o0>, <p1> <o1>, ..., <pn> <on>." with the primary clause
/// first and qualifiers in stored order.
std::string linearize_hyper_relation(const HyperRelation& h);

/// Identity for deduplication: subject id, primary predicate and object, and
/// the qualifiers in sorted order.
std::string relation_key(const HyperRelation& h);

/// Relations indexed by every entity they touch: the subject and each
/// entity-valued object, qualifier objects included. Literals are not nodes.
class KBGraph {
public:
    KBGraph() = default;
    explicit KBGraph(std::vector<HyperRelation> relations);

    std::span<const HyperRelation> relations() const { return relations_; }
    std::size_t relation_count() const { return relations_.size(); }
    bool has_entity(std::string_view id) const;
    std::size_t entity_count() const { return adjacency_.size(); }
    /// Indices into relations(), ascending.
    std::span<const std::size_t> incident(std::string_view entity_id) const;
    /// Every entity id touched by relation i (subject first, then objects in clause order).
    std::vector<std::string> entities_of(std::size_t relation) const;
    const HyperRelation* find_relation(std::string_view id) const;

private:
    std::vector<HyperRelation> relations_;
    std::unordered_map<std::string, std::vector<std::size_t>> adjacency_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct Neighborhood {
    /// Indices into the graph's relations, ascending, one per relation_key.
    std::vector<std::size_t> relations;
    std::size_t unknown_seeds = 0;
};

/// Relations incident to a seed, plus relations incident to any entity that
/// shares a relation with a seed. Unknown seeds are skipped and counted.
Neighborhood two_hop_neighborhood(const KBGraph& g, std::span<const std::string> seeds);

struct RelationSentence {
    std::string relation_id;
    std::string subject;  // surface form, becomes the passage title
    std::string text;
};

RelationSentence to_sentence(const HyperRelation& h);

/// Greedy in-order packing: each passage takes the longest prefix of the
/// remaining sentences whose joined token count is <= token_limit. A sentence
/// that alone exceeds the limit becomes its own passage, flagged oversized.
/// Passage ids are id_prefix + "#" + ordinal.
std::vector<Passage> pack_relations(std::span<const RelationSentence> ranked,
                                    std::size_t token_limit, std::string_view id_prefix = "kb");

HyperRelation hyper_relation_from_json(const nlohmann::json& j, std::string default_id);
nlohmann::json to_json(const HyperRelation& h);

/// KB JSONL; relations without an "id" get "r<line>".
std::vector<HyperRelation> load_kb(const std::filesystem::path& path);

/// Entity-linking JSONL: question id -> linked entity ids.
using EntityLinking = std::unordered_map<std::string, std::vector<std::string>>;
EntityLinking load_linking(const std::filesystem::path& path);

}  // namespace hetqa
