#include "hetq/tagging.hpp"

#include "hetq/error.hpp"
#include "hetq/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

using json = nlohmann::json;

namespace hetq {

namespace {

Completion complete_for_chunk(ModelGateway& gateway, const PromptRequest& req,
                              const std::string& chunk_id) {
    try {
        return gateway.complete(req);
    } catch (const BackendError& e) {
        throw BackendError(std::string(e.what()) + " (while tagging chunk " + chunk_id + ")",
                           e.attempts(), e.status());
    }
}

} // namespace

std::string mentions_to_json(const std::vector<ExtractedMention>& mentions) {
    json arr = json::array();
    for (const ExtractedMention& m : mentions) {
        arr.push_back({{"surface", m.surface},
                       {"type", m.type_tag},
                       {"start", m.span.begin},
                       {"end", m.span.end}});
    }
    return arr.dump();
}

ExtractionResult extract_entities(const TextChunk& chunk, ModelGateway& gateway) {
    ExtractionResult result;
    if (chunk.text.empty()) {
        return result;
    }

    PromptRequest req;
    req.template_id = TemplateId::ner;
    req.variables["text"] = chunk.text;
    const Completion completion = complete_for_chunk(gateway, req, chunk.chunk_id);

    json arr = json::parse(completion.text, nullptr, false);
    if (!arr.is_array()) {
        throw BackendError("ner output is not a JSON array (chunk " + chunk.chunk_id + ")");
    }
    for (const auto& rec : arr) {
        if (!rec.is_object()) {
            ++result.dropped;
            continue;
        }
        ExtractedMention m;
        m.surface = rec.value("surface", "");
        m.type_tag = rec.value("type", "");
        m.span.begin = rec.value("start", chunk.text.size() + 1);
        m.span.end = rec.value("end", std::size_t{0});

        const bool span_ok = m.span.begin < m.span.end && m.span.end <= chunk.text.size();
        const bool matches =
            span_ok && chunk.text.compare(m.span.begin, m.span.end - m.span.begin, m.surface) == 0;
        if (m.surface.empty() || !is_entity_tag(m.type_tag) || !matches) {
            ++result.dropped;
            continue;
        }
        result.mentions.push_back(std::move(m));
    }
    return result;
}

RelationResult infer_relations(const TextChunk& chunk,
                               const std::vector<ExtractedMention>& mentions,
                               ModelGateway& gateway) {
    RelationResult result;
    if (mentions.size() < 2) {
        return result;
    }

    PromptRequest req;
    req.template_id = TemplateId::relation;
    req.variables["text"] = chunk.text;
    req.variables["mentions"] = mentions_to_json(mentions);
    const Completion completion = complete_for_chunk(gateway, req, chunk.chunk_id);

    auto resolve = [&](const std::string& surface) -> const ExtractedMention* {
        for (const ExtractedMention& m : mentions) {
            if (m.surface == surface) return &m;
        }
        return nullptr;
    };

    std::istringstream lines(completion.text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line, nullptr, false);
        if (!rec.is_object()) {
            ++result.dropped;
            continue;
        }
        const ExtractedMention* src = resolve(rec.value("src", ""));
        const ExtractedMention* dst = resolve(rec.value("dst", ""));
        const std::string predicate = rec.value("predicate", "");
        if (src == nullptr || dst == nullptr || predicate.empty()) {
            ++result.dropped;
            continue;
        }
        RelationEdge edge;
        edge.src_entity = entity_id_for(canonical_name(src->surface), src->type_tag);
        edge.dst_entity = entity_id_for(canonical_name(dst->surface), dst->type_tag);
        if (edge.src_entity == edge.dst_entity) {
            ++result.dropped;
            continue;
        }
        edge.predicate = predicate;
        edge.provenance_chunk = chunk.chunk_id;
        edge.confidence = std::clamp(rec.value("confidence", 1.0), 0.0, 1.0);
        result.relations.push_back(std::move(edge));
    }
    return result;
}

} // namespace hetq
