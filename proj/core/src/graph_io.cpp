#include "hetq/graph_io.hpp"

#include "hetq/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

using ordered_json = nlohmann::ordered_json;

namespace hetq {

namespace {

std::string dump(const ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ordered_json parse_line(const std::string& line, std::size_t line_no) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("graph file line " + std::to_string(line_no) + " is not a JSON object",
                         line_no);
    }
    return j;
}

template <typename T>
T require(const ordered_json& j, const char* field, std::size_t line_no) {
    auto it = j.find(field);
    if (it == j.end()) {
        throw ParseError("graph file line " + std::to_string(line_no) + " is missing field '" +
                             field + "'",
                         line_no);
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError("graph file line " + std::to_string(line_no) + " has a bad '" + field +
                             "' field",
                         line_no);
    }
}

} // namespace

void save_graph(const HetGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open graph file for writing: " + path.string());
    }

    ordered_json header{{"format", "hetgraph"},
                        {"version", kGraphFormatVersion},
                        {"counts",
                         {{"chunks", graph.chunks().size()},
                          {"entities", graph.entities().size()},
                          {"mentions", graph.mentions().size()},
                          {"relations", graph.relations().size()}}}};
    out << dump(header) << '\n';

    for (const TextChunk& c : graph.chunks()) {
        out << dump({{"kind", "chunk"},
                     {"chunk_id", c.chunk_id},
                     {"doc_id", c.doc_id},
                     {"ordinal", c.ordinal},
                     {"begin", c.begin},
                     {"end", c.end},
                     {"text", c.text}})
            << '\n';
    }
    for (const EntityNode& e : graph.entities()) {
        out << dump({{"kind", "entity"},
                     {"entity_id", e.entity_id},
                     {"canonical_name", e.canonical_name},
                     {"type_tag", e.type_tag},
                     {"aliases", e.aliases}})
            << '\n';
    }
    for (const MentionEdge& m : graph.mentions()) {
        out << dump({{"kind", "mention"},
                     {"chunk_id", m.chunk_id},
                     {"entity_id", m.entity_id},
                     {"span", {m.span.begin, m.span.end}}})
            << '\n';
    }
    for (const RelationEdge& r : graph.relations()) {
        out << dump({{"kind", "relation"},
                     {"src_entity", r.src_entity},
                     {"predicate", r.predicate},
                     {"dst_entity", r.dst_entity},
                     {"provenance_chunk", r.provenance_chunk},
                     {"confidence", r.confidence}})
            << '\n';
    }
    out.flush();
    if (!out) {
        throw IoError("failed writing graph file: " + path.string());
    }
}

HetGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open graph file: " + path.string());
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw GraphError("graph file is empty (missing header): " + path.string());
    }
    ordered_json header = parse_line(line, 1);
    if (header.value("format", "") != "hetgraph") {
        throw GraphError("not a hetgraph file: " + path.string());
    }
    const int version = header.value("version", -1);
    if (version != kGraphFormatVersion) {
        throw GraphError("graph file version mismatch: found " + std::to_string(version) +
                         ", expected " + std::to_string(kGraphFormatVersion));
    }
    auto counts = header.find("counts");
    if (counts == header.end() || !counts->is_object()) {
        throw GraphError("graph file header is missing record counts");
    }

    std::vector<TextChunk> chunks;
    std::vector<EntityNode> entities;
    std::vector<MentionEdge> mentions;
    std::vector<RelationEdge> relations;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json rec = parse_line(line, line_no);
        const std::string kind = require<std::string>(rec, "kind", line_no);
        if (kind == "chunk") {
            TextChunk c;
            c.chunk_id = require<std::string>(rec, "chunk_id", line_no);
            c.doc_id = require<std::string>(rec, "doc_id", line_no);
            c.ordinal = require<std::size_t>(rec, "ordinal", line_no);
            c.begin = require<std::size_t>(rec, "begin", line_no);
            c.end = require<std::size_t>(rec, "end", line_no);
            c.text = require<std::string>(rec, "text", line_no);
            chunks.push_back(std::move(c));
        } else if (kind == "entity") {
            EntityNode e;
            e.entity_id = require<std::string>(rec, "entity_id", line_no);
            e.canonical_name = require<std::string>(rec, "canonical_name", line_no);
            e.type_tag = require<std::string>(rec, "type_tag", line_no);
            e.aliases = require<std::vector<std::string>>(rec, "aliases", line_no);
            entities.push_back(std::move(e));
        } else if (kind == "mention") {
            MentionEdge m;
            m.chunk_id = require<std::string>(rec, "chunk_id", line_no);
            m.entity_id = require<std::string>(rec, "entity_id", line_no);
            auto span = require<std::vector<std::size_t>>(rec, "span", line_no);
            if (span.size() != 2) {
                throw ParseError("graph file line " + std::to_string(line_no) +
                                     " span must be [begin, end]",
                                 line_no);
            }
            m.span = {span[0], span[1]};
            mentions.push_back(std::move(m));
        } else if (kind == "relation") {
            RelationEdge r;
            r.src_entity = require<std::string>(rec, "src_entity", line_no);
            r.predicate = require<std::string>(rec, "predicate", line_no);
            r.dst_entity = require<std::string>(rec, "dst_entity", line_no);
            r.provenance_chunk = require<std::string>(rec, "provenance_chunk", line_no);
            r.confidence = require<double>(rec, "confidence", line_no);
            relations.push_back(std::move(r));
        } else {
            throw GraphError("graph file line " + std::to_string(line_no) +
                             " has unknown record kind: " + kind);
        }
    }

    auto expect = [&](const char* key, std::size_t got) {
        const std::size_t want = counts->value(key, std::size_t{0});
        if (want != got) {
            throw GraphError("graph file is truncated or inconsistent: header lists " +
                             std::to_string(want) + " " + key + " records, found " +
                             std::to_string(got));
        }
    };
    expect("chunks", chunks.size());
    expect("entities", entities.size());
    expect("mentions", mentions.size());
    expect("relations", relations.size());

    return HetGraph::from_parts(std::move(chunks), std::move(entities), std::move(mentions),
                                std::move(relations));
}

} // namespace hetq
