#pragma once

#include "hetq/ingest.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hetq {

inline constexpr std::array<std::string_view, 7> kEntityTags = {
    "person", "org", "product", "time", "place", "metric", "other"};

bool is_entity_tag(std::string_view tag);

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    auto operator<=>(const Span&) const = default;
};

struct EntityNode {
    std::string entity_id;
    std::string canonical_name;          // case-folded, whitespace-collapsed
    std::string type_tag;                // one of kEntityTags
    std::vector<std::string> aliases;    // raw surfaces, sorted unique, nonempty

    bool operator==(const EntityNode&) const = default;
};

struct MentionEdge {
    std::string chunk_id;
    std::string entity_id;
    Span span; // within the chunk's text

    bool operator==(const MentionEdge&) const = default;
};

struct RelationEdge {
    std::string src_entity;
    std::string predicate;
    std::string dst_entity;
    std::string provenance_chunk;
    double confidence = 1.0;

    bool operator==(const RelationEdge&) const = default;
};

// Stable id: hex of fnv1a64 over canonical_name, 0x1f, type_tag.
std::string entity_id_for(std::string_view canonical_name, std::string_view type_tag);

// Graph-wide node identifiers used for ordering, centrality maps and
// budget tie-breaks: chunks as "c:<chunk_id>", entities as
// "e:<entity_id>".
std::string chunk_node_id(std::string_view chunk_id);
std::string entity_node_id(std::string_view entity_id);

inline constexpr std::size_t knpos = static_cast<std::size_t>(-1);

// Immutable after construction: all vectors sorted and deduplicated,
// adjacency prebuilt. Node handles index chunks first (sorted by
// chunk_id), then entities (sorted by entity_id).
class HetGraph {
public:
    HetGraph() = default;

    // Validates referential integrity, spans, tags, bounds and the
    // no-floating-entities rule; throws GraphError listing every
    // offending record. Used by build_graph and load_graph.
    static HetGraph from_parts(std::vector<TextChunk> chunks, std::vector<EntityNode> entities,
                               std::vector<MentionEdge> mentions,
                               std::vector<RelationEdge> relations);

    const std::vector<TextChunk>& chunks() const { return chunks_; }
    const std::vector<EntityNode>& entities() const { return entities_; }
    const std::vector<MentionEdge>& mentions() const { return mentions_; }
    const std::vector<RelationEdge>& relations() const { return relations_; }

    std::size_t node_count() const { return chunks_.size() + entities_.size(); }
    bool empty() const { return node_count() == 0; }

    std::size_t index_of_chunk(std::string_view chunk_id) const;   // knpos when absent
    std::size_t index_of_entity(std::string_view entity_id) const; // knpos when absent

    bool node_is_entity(std::size_t node) const { return node >= chunks_.size(); }
    const TextChunk& chunk_at(std::size_t node) const { return chunks_[node]; }
    const EntityNode& entity_at(std::size_t node) const { return entities_[node - chunks_.size()]; }
    std::string node_id(std::size_t node) const;

    // Distinct neighboring nodes (parallel edges collapse here).
    const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_[node]; }
    // Incident edge count (parallel edges each count).
    std::size_t degree(std::size_t node) const { return degrees_[node]; }

    // Mentions of one entity, as chunk node handles in ascending order.
    const std::vector<std::size_t>& mention_chunks_of(std::size_t entity_node) const {
        return mention_chunks_[entity_node - chunks_.size()];
    }

    bool operator==(const HetGraph& other) const;

private:
    void finalize(); // sort, dedup, index, adjacency

    std::vector<TextChunk> chunks_;
    std::vector<EntityNode> entities_;
    std::vector<MentionEdge> mentions_;
    std::vector<RelationEdge> relations_;

    std::map<std::string, std::size_t, std::less<>> chunk_index_;
    std::map<std::string, std::size_t, std::less<>> entity_index_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::vector<std::size_t> degrees_;
    std::vector<std::vector<std::size_t>> mention_chunks_;
};

// One raw mention before entity deduplication.
struct MentionInput {
    std::string chunk_id;
    std::string surface;
    std::string type_tag;
    Span span;
};

// Deduplicates entities by (canonical_name, type_tag), unions aliases,
// collapses duplicate edges, and finalizes. Permutation-invariant.
// Throws GraphError listing dangling or malformed inputs.
HetGraph build_graph(std::vector<TextChunk> chunks, const std::vector<MentionInput>& mentions,
                     std::vector<RelationEdge> relations);

// degree/(N-1) over the union node set; all zero when N < 2.
std::map<std::string, double> degree_centrality(const HetGraph& graph);

// Re-checks every structural invariant; returns human-readable
// violations, empty when the graph is sound.
std::vector<std::string> verify(const HetGraph& graph);

} // namespace hetq
