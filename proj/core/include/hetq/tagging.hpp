#pragma once

#include "hetq/gateway.hpp"
#include "hetq/graph.hpp"
#include "hetq/ingest.hpp"

#include <string>
#include <vector>

namespace hetq {

struct ExtractedMention {
    std::string surface;
    std::string type_tag;
    Span span;

    bool operator==(const ExtractedMention&) const = default;
};

struct ExtractionResult {
    std::vector<ExtractedMention> mentions;
    std::size_t dropped = 0; // model records failing span/substring/tag checks
};

// Tags one chunk through the gateway. Every kept mention's span indexes
// chunk.text and the substring equals the surface; records failing that
// (or carrying an unknown tag) are dropped and counted. Gateway
// failures propagate with the chunk id attached.
ExtractionResult extract_entities(const TextChunk& chunk, ModelGateway& gateway);

struct RelationResult {
    std::vector<RelationEdge> relations;
    std::size_t dropped = 0; // edges citing unknown surfaces, self-loops, bad records
};

// Infers relations among this chunk's mentions. Surfaces are resolved
// against `mentions`; provenance is chunk.chunk_id; confidences are
// clamped to [0,1]. Fewer than two mentions short-circuits to empty.
RelationResult infer_relations(const TextChunk& chunk, const std::vector<ExtractedMention>& mentions,
                               ModelGateway& gateway);

// JSON wire form of a mention list, as fed back into the relation
// template.
std::string mentions_to_json(const std::vector<ExtractedMention>& mentions);

} // namespace hetq
