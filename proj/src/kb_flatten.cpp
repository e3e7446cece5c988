#include "hetqa/kb_flatten.hpp"

#include <algorithm>
#include <unordered_set>

#include "hetqa/error.hpp"
#include "hetqa/jsonl.hpp"
#include "hetqa/text.hpp"

namespace hetqa {

namespace {

void require_surface(std::string_view surface, const char* part) {
    if (text::is_blank(surface)) {
        throw ValidationError(std::string("relation has an empty ") + part + " surface form");
    }
}

std::string clause_key(const KBClause& c) {
    std::string k = c.predicate;
    k += '\x1f';
    k += c.object.is_entity() ? "e:" + c.object.entity_id : "l:" + c.object.surface;
    return k;
}

KBObject object_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("relation object must be a JSON object");
    if (auto it = j.find("literal"); it != j.end()) {
        auto value = it->get<std::string>();
        require_surface(value, "object");
        return KBObject::literal(std::move(value));
    }
    KBEntity e{require_string(j, "id"), require_string(j, "surface")};
    if (e.id.empty()) throw ValidationError("entity id must be non-empty");
    require_surface(e.surface, "object");
    return KBObject::entity(std::move(e));
}

nlohmann::json object_to_json(const KBObject& o) {
    if (o.is_entity()) return {{"id", o.entity_id}, {"surface", o.surface}};
    return {{"literal", o.surface}};
}

}  // namespace

std::string linearize_triple(const KBTriple& t) {
    require_surface(t.subject.surface, "subject");
    require_surface(t.predicate, "predicate");
    require_surface(t.object.surface, "object");
    return t.subject.surface + " " + t.predicate + " " + t.object.surface + ".";
}

std::string linearize_hyper_relation(const HyperRelation& h) {
    std::string out = linearize_triple(h.primary_triple());
    out.pop_back();  // terminal period goes after the last clause
    for (const auto& q : h.qualifiers) {
        require_surface(q.predicate, "predicate");
        require_surface(q.object.surface, "object");
        out += ", ";
        out += q.predicate;
        out += ' ';
        out += q.object.surface;
    }
    out += '.';
    return out;
}

std::string relation_key(const HyperRelation& h) {
    std::vector<std::string> quals;
    quals.reserve(h.qualifiers.size());
    for (const auto& q : h.qualifiers) quals.push_back(clause_key(q));
    std::sort(quals.begin(), quals.end());
    std::string key = h.subject.id;
    key += '\x1e';
    key += clause_key(h.primary);
    for (const auto& q : quals) {
        key += '\x1e';
        key += q;
    }
    return key;
}

KBGraph::KBGraph(std::vector<HyperRelation> relations) : relations_(std::move(relations)) {
    for (std::size_t i = 0; i < relations_.size(); ++i) {
        const auto& r = relations_[i];
        if (!r.id.empty() && !by_id_.emplace(r.id, i).second) {
            throw ValidationError("duplicate relation id \"" + r.id + "\"");
        }
        for (const auto& e : entities_of(i)) {
            auto& list = adjacency_[e];
            if (list.empty() || list.back() != i) list.push_back(i);
        }
    }
}

bool KBGraph::has_entity(std::string_view id) const { return adjacency_.contains(std::string(id)); }

std::span<const std::size_t> KBGraph::incident(std::string_view entity_id) const {
    auto it = adjacency_.find(std::string(entity_id));
    if (it == adjacency_.end()) return {};
    return it->second;
}

std::vector<std::string> KBGraph::entities_of(std::size_t relation) const {
    const auto& r = relations_.at(relation);
    std::vector<std::string> out{r.subject.id};
    const auto add = [&](const KBObject& o) {
        if (o.is_entity() && std::find(out.begin(), out.end(), o.entity_id) == out.end()) {
            out.push_back(o.entity_id);
        }
    };
    add(r.primary.object);
    for (const auto& q : r.qualifiers) add(q.object);
    return out;
}

const HyperRelation* KBGraph::find_relation(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &relations_[it->second];
}

Neighborhood two_hop_neighborhood(const KBGraph& g, std::span<const std::string> seeds) {
    Neighborhood out;
    std::vector<char> picked(g.relation_count(), 0);
    std::unordered_set<std::string> frontier;  // entities one edge from a seed (seeds included)
    for (const auto& s : seeds) {
        if (!g.has_entity(s)) {
            ++out.unknown_seeds;
            continue;
        }
        for (std::size_t r : g.incident(s)) {
            if (picked[r]) continue;
            picked[r] = 1;
            for (auto& e : g.entities_of(r)) frontier.insert(std::move(e));
        }
    }
    for (const auto& e : frontier) {
        for (std::size_t r : g.incident(e)) picked[r] = 1;
    }
    std::unordered_set<std::string> keys;
    for (std::size_t r = 0; r < picked.size(); ++r) {
        if (picked[r] && keys.insert(relation_key(g.relations()[r])).second) {
            out.relations.push_back(r);
        }
    }
    return out;
}

RelationSentence to_sentence(const HyperRelation& h) {
    return {h.id, h.subject.surface, linearize_hyper_relation(h)};
}

std::vector<Passage> pack_relations(std::span<const RelationSentence> ranked,
                                    std::size_t token_limit, std::string_view id_prefix) {
    if (token_limit == 0) throw ValidationError("token_limit must be at least 1");
    std::vector<Passage> out;
    std::size_t i = 0;
    while (i < ranked.size()) {
        std::size_t used = count_tokens(ranked[i].text);
        std::size_t end = i + 1;
        while (end < ranked.size()) {
            const std::size_t next = count_tokens(ranked[end].text);
            if (used + next > token_limit) break;
            used += next;
            ++end;
        }
        Provenance prov;
        std::vector<std::string> texts;
        for (std::size_t j = i; j < end; ++j) {
            prov.relation_ids.push_back(ranked[j].relation_id);
            texts.push_back(ranked[j].text);
        }
        prov.oversized = used > token_limit;
        out.push_back(make_passage(std::string(id_prefix) + "#" + std::to_string(out.size()),
                                   SourceType::kb, ranked[i].subject, text::join(texts, " "),
                                   std::move(prov)));
        i = end;
    }
    return out;
}

HyperRelation hyper_relation_from_json(const nlohmann::json& j, std::string default_id) {
    HyperRelation h;
    if (auto it = j.find("id"); it != j.end()) {
        h.id = it->get<std::string>();
    } else {
        h.id = std::move(default_id);
    }
    if (h.id.empty()) throw ValidationError("relation id must be non-empty");
    const auto& subj = require(j, "subject");
    h.subject = {require_string(subj, "id"), require_string(subj, "surface")};
    if (h.subject.id.empty()) throw ValidationError("subject id must be non-empty");
    require_surface(h.subject.surface, "subject");
    h.primary.predicate = require_string(j, "predicate");
    require_surface(h.primary.predicate, "predicate");
    h.primary.object = object_from_json(require(j, "object"));
    if (auto it = j.find("qualifiers"); it != j.end()) {
        if (!it->is_array()) throw ValidationError("\"qualifiers\" must be an array");
        for (const auto& q : *it) {
            KBClause c{require_string(q, "predicate"), object_from_json(require(q, "object"))};
            require_surface(c.predicate, "predicate");
            h.qualifiers.push_back(std::move(c));
        }
    }
    return h;
}

nlohmann::json to_json(const HyperRelation& h) {
    nlohmann::json quals = nlohmann::json::array();
    for (const auto& q : h.qualifiers) {
        quals.push_back({{"predicate", q.predicate}, {"object", object_to_json(q.object)}});
    }
    return {{"id", h.id},
            {"subject", {{"id", h.subject.id}, {"surface", h.subject.surface}}},
            {"predicate", h.primary.predicate},
            {"object", object_to_json(h.primary.object)},
            {"qualifiers", std::move(quals)}};
}

std::vector<HyperRelation> load_kb(const std::filesystem::path& path) {
    std::vector<HyperRelation> out;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
        out.push_back(hyper_relation_from_json(j, "r" + std::to_string(line)));
    });
    return out;
}

EntityLinking load_linking(const std::filesystem::path& path) {
    EntityLinking out;
    for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        auto qid = require_string(j, "question_id");
        auto entities = require(j, "entities").get<std::vector<std::string>>();
        auto& slot = out[qid];
        for (auto& e : entities) {
            if (std::find(slot.begin(), slot.end(), e) == slot.end()) slot.push_back(std::move(e));
        }
    });
    return out;
}

}  // namespace hetqa
