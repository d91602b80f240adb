#include "hetq/graph.hpp"

#include "hetq/error.hpp"
#include "hetq/text.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace hetq {

namespace {

auto mention_key(const MentionEdge& m) {
    return std::tie(m.chunk_id, m.span.begin, m.span.end, m.entity_id);
}

auto relation_key(const RelationEdge& r) {
    return std::tie(r.src_entity, r.dst_entity, r.predicate, r.provenance_chunk);
}

// Shared by from_parts (throws) and verify (reports).
std::vector<std::string> check_parts(const std::vector<TextChunk>& chunks,
                                     const std::vector<EntityNode>& entities,
                                     const std::vector<MentionEdge>& mentions,
                                     const std::vector<RelationEdge>& relations) {
    std::vector<std::string> violations;
    auto flag = [&](std::string message) { violations.push_back(std::move(message)); };

    std::map<std::string, const TextChunk*, std::less<>> chunk_by_id;
    for (const TextChunk& c : chunks) {
        if (!chunk_by_id.emplace(c.chunk_id, &c).second) {
            flag("duplicate chunk id: " + c.chunk_id);
        }
    }
    std::map<std::string, const EntityNode*, std::less<>> entity_by_id;
    for (const EntityNode& e : entities) {
        if (!entity_by_id.emplace(e.entity_id, &e).second) {
            flag("duplicate entity id: " + e.entity_id);
        }
        if (!is_entity_tag(e.type_tag)) {
            flag("entity " + e.entity_id + " has unknown tag: " + e.type_tag);
        }
        if (e.aliases.empty()) {
            flag("entity " + e.entity_id + " (" + e.canonical_name + ") has no aliases");
        }
        if (e.entity_id != entity_id_for(e.canonical_name, e.type_tag)) {
            flag("entity id " + e.entity_id + " does not hash from (" + e.canonical_name + ", " +
                 e.type_tag + ")");
        }
    }

    std::map<std::string, std::size_t, std::less<>> mention_count;
    for (const MentionEdge& m : mentions) {
        auto chunk = chunk_by_id.find(m.chunk_id);
        if (chunk == chunk_by_id.end()) {
            flag("mention references missing chunk: " + m.chunk_id);
        } else if (m.span.begin >= m.span.end || m.span.end > chunk->second->text.size()) {
            std::ostringstream os;
            os << "mention span [" << m.span.begin << "," << m.span.end
               << ") falls outside chunk " << m.chunk_id << " (" << chunk->second->text.size()
               << " chars)";
            flag(os.str());
        }
        if (entity_by_id.find(m.entity_id) == entity_by_id.end()) {
            flag("mention references missing entity: " + m.entity_id);
        } else {
            ++mention_count[m.entity_id];
        }
    }
    for (const EntityNode& e : entities) {
        if (mention_count[e.entity_id] == 0) {
            flag("floating entity (no mentions): " + e.canonical_name + " [" + e.type_tag + "]");
        }
    }

    for (const RelationEdge& r : relations) {
        if (entity_by_id.find(r.src_entity) == entity_by_id.end()) {
            flag("relation references missing src entity: " + r.src_entity);
        }
        if (entity_by_id.find(r.dst_entity) == entity_by_id.end()) {
            flag("relation references missing dst entity: " + r.dst_entity);
        }
        if (r.src_entity == r.dst_entity) {
            flag("relation is a self-loop on entity: " + r.src_entity);
        }
        if (chunk_by_id.find(r.provenance_chunk) == chunk_by_id.end()) {
            flag("relation references missing provenance chunk: " + r.provenance_chunk);
        }
        if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
            flag("relation confidence out of [0,1]: " + std::to_string(r.confidence) + " on " +
                 r.src_entity + " -[" + r.predicate + "]-> " + r.dst_entity);
        }
    }
    return violations;
}

} // namespace

bool is_entity_tag(std::string_view tag) {
    return std::find(kEntityTags.begin(), kEntityTags.end(), tag) != kEntityTags.end();
}

std::string entity_id_for(std::string_view canonical_name, std::string_view type_tag) {
    std::string key;
    key.reserve(canonical_name.size() + 1 + type_tag.size());
    key.append(canonical_name);
    key.push_back('\x1f');
    key.append(type_tag);
    return hex16(fnv1a64(key));
}

std::string chunk_node_id(std::string_view chunk_id) {
    return "c:" + std::string(chunk_id);
}

std::string entity_node_id(std::string_view entity_id) {
    return "e:" + std::string(entity_id);
}

HetGraph HetGraph::from_parts(std::vector<TextChunk> chunks, std::vector<EntityNode> entities,
                              std::vector<MentionEdge> mentions,
                              std::vector<RelationEdge> relations) {
    auto violations = check_parts(chunks, entities, mentions, relations);
    if (!violations.empty()) {
        std::string message = "graph integrity violations:";
        for (const std::string& v : violations) {
            message += "\n  - " + v;
        }
        throw GraphError(message);
    }
    HetGraph g;
    g.chunks_ = std::move(chunks);
    g.entities_ = std::move(entities);
    g.mentions_ = std::move(mentions);
    g.relations_ = std::move(relations);
    g.finalize();
    return g;
}

void HetGraph::finalize() {
    std::sort(chunks_.begin(), chunks_.end(),
              [](const TextChunk& a, const TextChunk& b) { return a.chunk_id < b.chunk_id; });
    std::sort(entities_.begin(), entities_.end(),
              [](const EntityNode& a, const EntityNode& b) { return a.entity_id < b.entity_id; });
    for (EntityNode& e : entities_) {
        std::sort(e.aliases.begin(), e.aliases.end());
        e.aliases.erase(std::unique(e.aliases.begin(), e.aliases.end()), e.aliases.end());
    }

    std::sort(mentions_.begin(), mentions_.end(), [](const MentionEdge& a, const MentionEdge& b) {
        return mention_key(a) < mention_key(b);
    });
    mentions_.erase(std::unique(mentions_.begin(), mentions_.end()), mentions_.end());

    // Duplicate relations (same endpoints, predicate, provenance)
    // collapse to the highest confidence seen, so merge order never
    // changes the result.
    std::sort(relations_.begin(), relations_.end(),
              [](const RelationEdge& a, const RelationEdge& b) {
                  return std::tuple_cat(relation_key(a), std::tie(b.confidence)) <
                         std::tuple_cat(relation_key(b), std::tie(a.confidence));
              });
    relations_.erase(std::unique(relations_.begin(), relations_.end(),
                                 [](const RelationEdge& a, const RelationEdge& b) {
                                     return relation_key(a) == relation_key(b);
                                 }),
                     relations_.end());

    chunk_index_.clear();
    entity_index_.clear();
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        chunk_index_[chunks_[i].chunk_id] = i;
    }
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        entity_index_[entities_[i].entity_id] = chunks_.size() + i;
    }

    adjacency_.assign(node_count(), {});
    degrees_.assign(node_count(), 0);
    mention_chunks_.assign(entities_.size(), {});
    for (const MentionEdge& m : mentions_) {
        const std::size_t c = index_of_chunk(m.chunk_id);
        const std::size_t e = index_of_entity(m.entity_id);
        adjacency_[c].push_back(e);
        adjacency_[e].push_back(c);
        ++degrees_[c];
        ++degrees_[e];
        mention_chunks_[e - chunks_.size()].push_back(c);
    }
    for (const RelationEdge& r : relations_) {
        const std::size_t s = index_of_entity(r.src_entity);
        const std::size_t d = index_of_entity(r.dst_entity);
        adjacency_[s].push_back(d);
        adjacency_[d].push_back(s);
        ++degrees_[s];
        ++degrees_[d];
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    for (auto& list : mention_chunks_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
}

std::size_t HetGraph::index_of_chunk(std::string_view chunk_id) const {
    auto it = chunk_index_.find(chunk_id);
    return it == chunk_index_.end() ? knpos : it->second;
}

std::size_t HetGraph::index_of_entity(std::string_view entity_id) const {
    auto it = entity_index_.find(entity_id);
    return it == entity_index_.end() ? knpos : it->second;
}

std::string HetGraph::node_id(std::size_t node) const {
    return node_is_entity(node) ? entity_node_id(entity_at(node).entity_id)
                                : chunk_node_id(chunk_at(node).chunk_id);
}

bool HetGraph::operator==(const HetGraph& other) const {
    return chunks_ == other.chunks_ && entities_ == other.entities_ &&
           mentions_ == other.mentions_ && relations_ == other.relations_;
}

HetGraph build_graph(std::vector<TextChunk> chunks, const std::vector<MentionInput>& mentions,
                     std::vector<RelationEdge> relations) {
    std::map<std::string, EntityNode> entities; // keyed by entity_id
    std::vector<MentionEdge> edges;
    edges.reserve(mentions.size());
    for (const MentionInput& m : mentions) {
        const std::string canonical = canonical_name(m.surface);
        const std::string id = entity_id_for(canonical, m.type_tag);
        auto [it, inserted] = entities.try_emplace(id);
        if (inserted) {
            it->second.entity_id = id;
            it->second.canonical_name = canonical;
            it->second.type_tag = m.type_tag;
        }
        it->second.aliases.push_back(m.surface);
        edges.push_back({m.chunk_id, id, m.span});
    }

    std::vector<EntityNode> entity_list;
    entity_list.reserve(entities.size());
    for (auto& [id, e] : entities) {
        entity_list.push_back(std::move(e));
    }
    return HetGraph::from_parts(std::move(chunks), std::move(entity_list), std::move(edges),
                                std::move(relations));
}

std::map<std::string, double> degree_centrality(const HetGraph& graph) {
    std::map<std::string, double> out;
    const std::size_t n = graph.node_count();
    for (std::size_t v = 0; v < n; ++v) {
        out[graph.node_id(v)] =
            n < 2 ? 0.0 : static_cast<double>(graph.degree(v)) / static_cast<double>(n - 1);
    }
    return out;
}

std::vector<std::string> verify(const HetGraph& graph) {
    auto violations =
        check_parts(graph.chunks(), graph.entities(), graph.mentions(), graph.relations());
    // the sum-of-degrees identity guards the adjacency build itself
    std::size_t degree_sum = 0;
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
        degree_sum += graph.degree(v);
    }
    if (degree_sum != 2 * (graph.mentions().size() + graph.relations().size())) {
        violations.push_back("degree sum does not equal twice the edge count");
    }
    return violations;
}

} // namespace hetq
