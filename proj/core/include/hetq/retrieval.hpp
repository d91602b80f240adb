#pragma once

#include "hetq/gateway.hpp"
#include "hetq/graph.hpp"

#include <string>
#include <vector>

namespace hetq {

struct AnchorSet {
    std::string query;
    std::vector<std::string> anchors;         // entity ids, ordered by query position
    std::vector<std::string> unmatched_terms; // content terms with no entity hit
};

// Resolves query mentions to graph entities by canonical name. Tagging
// runs through the gateway exactly as at index time; on top of that,
// query token n-grams are matched against canonical names with plural
// folding and "<Heads> A and B" coordination expansion, so "drug a
// efficacy" finds "Drug A" and "Products A and B" finds both products.
// Zero anchors is a valid result, never an error.
AnchorSet anchor_entities(const std::string& query, const HetGraph& graph, ModelGateway& gateway);

struct ExpandedNode {
    std::size_t node = 0; // graph node handle
    std::size_t hops = 0; // true minimum distance from the anchor set

    bool operator==(const ExpandedNode&) const = default;
};

// Multi-source BFS, bounded by hop_limit. When a frontier would push
// the result past node_budget, nodes are admitted in (hops, node_id)
// order until the budget is exactly filled. Result is sorted the same
// way. Unknown anchor ids throw GraphError naming the id.
std::vector<ExpandedNode> bfs_expand(const HetGraph& graph, const std::vector<std::string>& anchors,
                                     std::size_t hop_limit, std::size_t node_budget);

struct RetrievalWeights {
    double alpha = 0.5; // anchor match
    double beta = 0.3;  // degree centrality
    double gamma = 0.2; // hop proximity
};

struct RankedNode {
    std::string node_id;
    std::size_t node = 0;
    std::size_t hops = 0;
    int match = 0; // 1 when the node is an anchor
    double centrality = 0.0;
    double score = 0.0;
};

// score = alpha*match + beta*centrality + gamma/(1+hops), sorted by
// (-score, node_id).
std::vector<RankedNode> score_nodes(const std::vector<ExpandedNode>& expanded,
                                    const HetGraph& graph, const std::vector<std::string>& anchors,
                                    const RetrievalWeights& weights);

struct ContextChunk {
    std::string chunk_id;
    std::string text;
    double score = 0.0;
};

struct ContextBundle {
    std::vector<ContextChunk> chunks; // non-increasing score
    std::size_t total_chars = 0;
    std::vector<std::string> anchors; // provenance
    RetrievalWeights weights;         // provenance

    std::string joined_text() const; // chunk texts separated by blank lines
};

// Greedy whole-chunk packing: walk ranked nodes in order, entity nodes
// contributing their mention chunks at the entity's score, chunk nodes
// themselves; a chunk enters only if it fits whole in the remaining
// budget, otherwise it is skipped and the walk continues.
ContextBundle assemble_context(const std::vector<RankedNode>& ranked, const HetGraph& graph,
                               std::size_t char_budget,
                               const std::vector<std::string>& anchors = {},
                               const RetrievalWeights& weights = {});

} // namespace hetq
