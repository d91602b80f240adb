#pragma once

// Deterministic random graph fixtures shared by the unit tests and
// the acceptance checks.

#include "hetq/graph.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct GraphParts {
    std::vector<hetq::TextChunk> chunks;
    std::vector<hetq::MentionInput> mentions;
    std::vector<hetq::RelationEdge> relations;
};

// Structurally valid random parts: every entity gets at least one
// mention, spans stay inside their chunk, no self-loop relations.
inline GraphParts random_graph_parts(std::mt19937_64& rng, std::size_t max_nodes = 20) {
    GraphParts parts;
    std::uniform_int_distribution<std::size_t> chunk_count(1, std::max<std::size_t>(1, max_nodes / 2));
    const std::size_t n_chunks = chunk_count(rng);

    for (std::size_t i = 0; i < n_chunks; ++i) {
        hetq::TextChunk chunk;
        chunk.doc_id = "doc" + std::to_string(i / 3);
        chunk.ordinal = i % 3;
        char ord[8];
        std::snprintf(ord, sizeof(ord), "%06zu", chunk.ordinal);
        chunk.chunk_id = chunk.doc_id + ":" + ord;
        std::uniform_int_distribution<std::size_t> len(20, 80);
        chunk.begin = 0;
        chunk.text.assign(len(rng), 'x');
        chunk.end = chunk.text.size();
        parts.chunks.push_back(std::move(chunk));
    }
    // chunk ids must be unique; doc/ordinal scheme above guarantees it
    // only within a doc, so rewrite ids with a global ordinal
    for (std::size_t i = 0; i < parts.chunks.size(); ++i) {
        char ord[8];
        std::snprintf(ord, sizeof(ord), "%06zu", i);
        parts.chunks[i].chunk_id = parts.chunks[i].doc_id + ":" + ord;
        parts.chunks[i].ordinal = i;
    }

    const std::size_t entity_room = max_nodes > n_chunks ? max_nodes - n_chunks : 1;
    std::uniform_int_distribution<std::size_t> entity_count(1, std::max<std::size_t>(1, entity_room));
    const std::size_t n_entities = entity_count(rng);
    const char* tags[] = {"person", "org", "product", "time", "place", "metric", "other"};

    std::vector<std::pair<std::string, std::string>> entity_names; // (name, tag)
    for (std::size_t e = 0; e < n_entities; ++e) {
        std::string name = "entity " + std::to_string(e);
        std::string tag = tags[rng() % 7];
        entity_names.emplace_back(name, tag);
        // at least one mention so no entity floats
        std::uniform_int_distribution<std::size_t> pick_chunk(0, parts.chunks.size() - 1);
        std::size_t extra = rng() % 3;
        for (std::size_t m = 0; m <= extra; ++m) {
            const auto& chunk = parts.chunks[pick_chunk(rng)];
            std::uniform_int_distribution<std::size_t> pos(0, chunk.text.size() - 2);
            std::size_t b = pos(rng);
            std::uniform_int_distribution<std::size_t> width(1, chunk.text.size() - b);
            parts.mentions.push_back({chunk.chunk_id, name, tag, {b, b + width(rng)}});
        }
    }

    if (n_entities >= 2) {
        std::uniform_int_distribution<std::size_t> rel_count(0, 2 * n_entities);
        std::uniform_int_distribution<std::size_t> pick_entity(0, n_entities - 1);
        std::uniform_int_distribution<std::size_t> pick_chunk(0, parts.chunks.size() - 1);
        std::uniform_real_distribution<double> conf(0.0, 1.0);
        const std::size_t n_rel = rel_count(rng);
        for (std::size_t r = 0; r < n_rel; ++r) {
            std::size_t a = pick_entity(rng);
            std::size_t b = pick_entity(rng);
            if (a == b) continue;
            hetq::RelationEdge edge;
            edge.src_entity = hetq::entity_id_for(entity_names[a].first, entity_names[a].second);
            edge.dst_entity = hetq::entity_id_for(entity_names[b].first, entity_names[b].second);
            edge.predicate = "rel" + std::to_string(r % 4);
            edge.provenance_chunk = parts.chunks[pick_chunk(rng)].chunk_id;
            edge.confidence = conf(rng);
            parts.relations.push_back(std::move(edge));
        }
    }
    return parts;
}

inline hetq::HetGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes = 20) {
    GraphParts parts = random_graph_parts(rng, max_nodes);
    return hetq::build_graph(parts.chunks, parts.mentions, parts.relations);
}

} // namespace testsupport
