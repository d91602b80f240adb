#include "hetq/retrieval.hpp"

#include "hetq/error.hpp"
#include "hetq/tagging.hpp"
#include "hetq/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hetq {

namespace {

bool sorted_by_node_id(const HetGraph& graph, std::vector<std::size_t>& nodes) {
    std::vector<std::pair<std::string, std::size_t>> keyed;
    keyed.reserve(nodes.size());
    for (std::size_t v : nodes) {
        keyed.emplace_back(graph.node_id(v), v);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        nodes[i] = keyed[i].second;
    }
    return true;
}

} // namespace

AnchorSet anchor_entities(const std::string& query, const HetGraph& graph,
                          ModelGateway& gateway) {
    AnchorSet out;
    out.query = query;

    std::map<std::string, std::vector<std::string>> by_name; // canonical -> entity ids
    for (const EntityNode& e : graph.entities()) {
        by_name[e.canonical_name].push_back(e.entity_id); // already id-sorted
    }

    const std::string folded = casefold(query); // length-preserving, offsets align
    const auto tokens = tokenize(folded);
    std::vector<bool> covered(tokens.size(), false);
    std::vector<std::pair<std::size_t, std::string>> hits; // (query position, entity id)

    auto record = [&](std::size_t position, const std::string& name, std::size_t first_token,
                      std::size_t last_token) {
        auto it = by_name.find(name);
        if (it == by_name.end()) return;
        for (const std::string& id : it->second) {
            hits.emplace_back(position, id);
        }
        for (std::size_t t = first_token; t <= last_token && t < tokens.size(); ++t) {
            covered[t] = true;
        }
    };

    // the same tagging path used at index time
    TextChunk query_chunk;
    query_chunk.chunk_id = "query:000000";
    query_chunk.doc_id = "query";
    query_chunk.end = query.size();
    query_chunk.text = query;
    for (const ExtractedMention& m : extract_entities(query_chunk, gateway).mentions) {
        auto it = by_name.find(canonical_name(m.surface));
        if (it == by_name.end()) continue;
        for (const std::string& id : it->second) {
            hits.emplace_back(m.span.begin, id);
        }
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (tokens[t].begin < m.span.end && tokens[t].end > m.span.begin) {
                covered[t] = true;
            }
        }
    }

    // token n-grams with plural folding
    constexpr std::size_t kMaxGram = 4;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        for (std::size_t n = 1; n <= kMaxGram && i + n <= tokens.size(); ++n) {
            std::string raw;
            std::string stripped;
            for (std::size_t k = i; k < i + n; ++k) {
                if (k > i) {
                    raw += ' ';
                    stripped += ' ';
                }
                raw += tokens[k].text;
                stripped += strip_plural(tokens[k].text);
            }
            record(tokens[i].begin, raw, i, i + n - 1);
            if (stripped != raw) {
                record(tokens[i].begin, stripped, i, i + n - 1);
            }
        }
    }

    // coordination: "<Heads> A and B" also tries "<head> b"
    auto is_item = [&](const Token& t) {
        return t.begin < query.size() && std::isupper(static_cast<unsigned char>(query[t.begin]));
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string head = strip_plural(tokens[i].text);
        if (head == tokens[i].text) continue;
        bool saw_item = false;
        for (std::size_t j = i + 1; j < tokens.size(); ++j) {
            if (tokens[j].text == "and" || tokens[j].text == "or") continue;
            if (!is_item(tokens[j])) break;
            if (saw_item) { // the first item is already the n-gram "<heads> a"
                record(tokens[j].begin, head + " " + tokens[j].text, j, j);
            }
            saw_item = true;
        }
    }

    std::sort(hits.begin(), hits.end());
    std::set<std::string> seen;
    for (const auto& [pos, id] : hits) {
        if (seen.insert(id).second) {
            out.anchors.push_back(id);
        }
    }

    std::set<std::string> reported;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (covered[t] || is_stopword(tokens[t].text)) continue;
        if (reported.insert(tokens[t].text).second) {
            out.unmatched_terms.push_back(tokens[t].text);
        }
    }
    return out;
}

std::vector<ExpandedNode> bfs_expand(const HetGraph& graph, const std::vector<std::string>& anchors,
                                     std::size_t hop_limit, std::size_t node_budget) {
    std::vector<std::size_t> sources;
    for (const std::string& id : anchors) {
        const std::size_t v = graph.index_of_entity(id);
        if (v == knpos) {
            throw GraphError("anchor entity not in graph: " + id);
        }
        if (std::find(sources.begin(), sources.end(), v) == sources.end()) {
            sources.push_back(v);
        }
    }
    if (node_budget < sources.size()) {
        throw Error("node_budget " + std::to_string(node_budget) + " is smaller than the anchor count " +
                    std::to_string(sources.size()));
    }

    std::vector<bool> seen(graph.node_count(), false);
    std::vector<ExpandedNode> out;
    std::vector<std::size_t> layer = sources;
    sorted_by_node_id(graph, layer);
    for (std::size_t v : layer) {
        seen[v] = true;
        out.push_back({v, 0});
    }

    for (std::size_t hops = 1; hops <= hop_limit && !layer.empty() && out.size() < node_budget;
         ++hops) {
        std::vector<std::size_t> next;
        for (std::size_t v : layer) {
            for (std::size_t w : graph.neighbors(v)) {
                if (!seen[w]) {
                    seen[w] = true;
                    next.push_back(w);
                }
            }
        }
        sorted_by_node_id(graph, next);
        const std::size_t room = node_budget - out.size();
        if (next.size() > room) {
            next.resize(room); // (hops, node_id) admission until the budget is exact
        }
        for (std::size_t v : next) {
            out.push_back({v, hops});
        }
        layer = std::move(next);
    }
    return out;
}

std::vector<RankedNode> score_nodes(const std::vector<ExpandedNode>& expanded,
                                    const HetGraph& graph, const std::vector<std::string>& anchors,
                                    const RetrievalWeights& weights) {
    std::set<std::size_t> anchor_nodes;
    for (const std::string& id : anchors) {
        const std::size_t v = graph.index_of_entity(id);
        if (v != knpos) {
            anchor_nodes.insert(v);
        }
    }

    const std::size_t n = graph.node_count();
    std::vector<RankedNode> out;
    out.reserve(expanded.size());
    for (const ExpandedNode& e : expanded) {
        RankedNode r;
        r.node = e.node;
        r.node_id = graph.node_id(e.node);
        r.hops = e.hops;
        r.match = anchor_nodes.count(e.node) ? 1 : 0;
        r.centrality =
            n < 2 ? 0.0 : static_cast<double>(graph.degree(e.node)) / static_cast<double>(n - 1);
        r.score = weights.alpha * r.match + weights.beta * r.centrality +
                  weights.gamma / (1.0 + static_cast<double>(r.hops));
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const RankedNode& a, const RankedNode& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node_id < b.node_id;
    });
    return out;
}

std::string ContextBundle::joined_text() const {
    std::string out;
    for (const ContextChunk& c : chunks) {
        if (!out.empty()) {
            out += "\n\n";
        }
        out += c.text;
    }
    return out;
}

ContextBundle assemble_context(const std::vector<RankedNode>& ranked, const HetGraph& graph,
                               std::size_t char_budget, const std::vector<std::string>& anchors,
                               const RetrievalWeights& weights) {
    ContextBundle bundle;
    bundle.anchors = anchors;
    bundle.weights = weights;

    std::set<std::size_t> included;
    auto admit = [&](std::size_t chunk_node, double score) {
        if (included.count(chunk_node)) return;
        const TextChunk& chunk = graph.chunk_at(chunk_node);
        if (chunk.text.size() > char_budget - bundle.total_chars) return; // never truncated
        included.insert(chunk_node);
        bundle.chunks.push_back({chunk.chunk_id, chunk.text, score});
        bundle.total_chars += chunk.text.size();
    };

    for (const RankedNode& r : ranked) {
        if (bundle.total_chars >= char_budget) break;
        if (graph.node_is_entity(r.node)) {
            for (std::size_t chunk_node : graph.mention_chunks_of(r.node)) {
                admit(chunk_node, r.score);
            }
        } else {
            admit(r.node, r.score);
        }
    }
    return bundle;
}

} // namespace hetq
