#include "hetq/gateway.hpp"

#include "hetq/error.hpp"

#include <cmath>

namespace hetq {

std::string_view template_name(TemplateId id) {
    switch (id) {
    case TemplateId::ner: return "ner";
    case TemplateId::relation: return "relation";
    case TemplateId::table_extract: return "table_extract";
    case TemplateId::plan_synthesis: return "plan_synthesis";
    case TemplateId::answer: return "answer";
    case TemplateId::paraphrase: return "paraphrase";
    }
    return "answer";
}

namespace {

// The instruction text sent to an http backend. The mock reads the
// bound variables directly, but rendering still validates bindings.
std::string_view template_body(TemplateId id) {
    switch (id) {
    case TemplateId::ner:
        return "Tag named entities in the text below. Reply with a JSON array of objects "
               "carrying surface, type, start, and end, where type is one of person, org, "
               "product, time, place, metric, other and [start,end) indexes the text.\n"
               "Text:\n{text}";
    case TemplateId::relation:
        return "Given the text and its entity mentions, list subject-predicate-object relations "
               "as JSON lines carrying src, predicate, dst, and confidence. src and dst must "
               "be mention surfaces.\nText:\n{text}\nMentions:\n{mentions}";
    case TemplateId::table_extract:
        return "Extract rows matching the schema from the text. Reply with one JSON object per "
               "line keyed by column name.\nSchema: {schema}\nText:\n{chunks}";
    case TemplateId::plan_synthesis:
        return "Translate the question into a relational plan using the grammar "
               "Scan/Filter/Project/Join/Aggregate/Sort/Limit. Resolve relative time "
               "against reference quarter {reference_quarter}. Reply with the plan text only.\n"
               "Catalog:\n{catalog}\nQuestion: {question}\n{error}";
    case TemplateId::answer:
        return "Answer the question from the context.\nContext:\n{context}\nQuestion: {question}";
    case TemplateId::paraphrase:
        return "Paraphrase an answer to: {question}";
    }
    return "";
}

} // namespace

std::string render_template(const PromptRequest& req) {
    std::string_view body = template_body(req.template_id);
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size();) {
        if (body[i] == '{') {
            std::size_t close = body.find('}', i);
            if (close == std::string_view::npos) {
                out.push_back(body[i++]);
                continue;
            }
            std::string key(body.substr(i + 1, close - i - 1));
            auto it = req.variables.find(key);
            if (it == req.variables.end()) {
                throw Error("template " + std::string(template_name(req.template_id)) +
                            " placeholder {" + key + "} is unbound");
            }
            out += it->second;
            i = close + 1;
        } else {
            out.push_back(body[i++]);
        }
    }
    return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    const std::size_t n = std::min(a.values.size(), b.values.size());
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += a.values[i] * b.values[i];
    }
    for (double v : a.values) na += v * v;
    for (double v : b.values) nb += v * v;
    if (na == 0 || nb == 0) {
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

void BackendConfig::validate() const {
    if (mode == BackendKind::http && endpoint_url.empty()) {
        throw Error("http backend requires a nonempty endpoint_url");
    }
    if (timeout_ms <= 0) throw Error("backend timeout_ms must be positive");
    if (max_retries < 0) throw Error("backend max_retries must be non-negative");
    if (max_in_flight <= 0) throw Error("backend max_in_flight must be positive");
    if (embedding_dim == 0) throw Error("backend embedding_dim must be positive");
}

std::vector<double> fit_and_normalize(std::vector<double> values, std::size_t dim) {
    values.resize(dim, 0.0);
    double norm2 = 0;
    for (double v : values) norm2 += v * v;
    if (norm2 > 0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : values) v *= inv;
    }
    return values;
}

std::shared_ptr<ModelGateway> make_gateway(const BackendConfig& cfg) {
    cfg.validate();
    if (cfg.mode == BackendKind::http) {
        return make_http_gateway(cfg);
    }
    return make_mock_gateway(cfg);
}

} // namespace hetq
