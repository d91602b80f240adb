#include "hetq/pipeline.hpp"

#include "hetq/error.hpp"
#include "hetq/extraction.hpp"
#include "hetq/graph_io.hpp"
#include "hetq/tagging.hpp"
#include "hetq/text.hpp"
#include "hetq/validate.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hetq {
namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

// --------------------------------------------------------------------------
// Config parsing: strict key set, typed values, absent keys keep base.
// --------------------------------------------------------------------------

[[noreturn]] void bad_key(const std::string& path) {
    throw Error("unknown config key: " + path);
}

void expect_object(const json& v, const std::string& path) {
    if (!v.is_object()) throw Error("config key " + path + " must be an object");
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            bad_key(prefix.empty() ? item.key() : prefix + "." + item.key());
        }
    }
}

double get_number(const json& obj, const std::string& prefix, const char* key, double current) {
    auto it = obj.find(key);
    if (it == obj.end()) return current;
    if (!it->is_number()) throw Error("config key " + prefix + "." + key + " must be a number");
    return it->get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& prefix, const char* key,
                         std::int64_t current) {
    auto it = obj.find(key);
    if (it == obj.end()) return current;
    if (!it->is_number_integer()) {
        throw Error("config key " + prefix + "." + key + " must be an integer");
    }
    return it->get<std::int64_t>();
}

std::size_t get_size(const json& obj, const std::string& prefix, const char* key,
                     std::size_t current) {
    std::int64_t v = get_integer(obj, prefix, key, static_cast<std::int64_t>(current));
    if (v < 0) throw Error("config key " + prefix + "." + key + " must be non-negative");
    return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const std::string& prefix, const char* key,
                       std::string current) {
    auto it = obj.find(key);
    if (it == obj.end()) return current;
    if (!it->is_string()) throw Error("config key " + prefix + "." + key + " must be a string");
    return it->get<std::string>();
}

void parse_chunking(const json& v, ChunkingPolicy& out) {
    expect_object(v, "chunking");
    check_keys(v, "chunking", {"max_chars", "overlap_chars"});
    out.max_chars = get_size(v, "chunking", "max_chars", out.max_chars);
    out.overlap_chars = get_size(v, "chunking", "overlap_chars", out.overlap_chars);
}

void parse_retrieval(const json& v, RetrievalConfig& out) {
    expect_object(v, "retrieval");
    check_keys(v, "retrieval", {"hop_limit", "node_budget", "char_budget", "weights"});
    out.hop_limit = get_size(v, "retrieval", "hop_limit", out.hop_limit);
    out.node_budget = get_size(v, "retrieval", "node_budget", out.node_budget);
    out.char_budget = get_size(v, "retrieval", "char_budget", out.char_budget);
    if (auto it = v.find("weights"); it != v.end()) {
        expect_object(*it, "retrieval.weights");
        check_keys(*it, "retrieval.weights", {"alpha", "beta", "gamma"});
        out.weights.alpha = get_number(*it, "retrieval.weights", "alpha", out.weights.alpha);
        out.weights.beta = get_number(*it, "retrieval.weights", "beta", out.weights.beta);
        out.weights.gamma = get_number(*it, "retrieval.weights", "gamma", out.weights.gamma);
    }
}

void parse_backend(const json& v, BackendConfig& out) {
    expect_object(v, "backend");
    check_keys(v, "backend",
               {"mode", "endpoint_url", "api_key_env", "model", "timeout_ms", "max_retries",
                "max_in_flight", "embedding_dim"});
    if (auto it = v.find("mode"); it != v.end()) {
        if (!it->is_string()) throw Error("config key backend.mode must be a string");
        const std::string mode = it->get<std::string>();
        if (mode == "mock") out.mode = BackendKind::mock;
        else if (mode == "http") out.mode = BackendKind::http;
        else throw Error("config key backend.mode must be \"mock\" or \"http\", got \"" + mode + "\"");
    }
    out.endpoint_url = get_string(v, "backend", "endpoint_url", out.endpoint_url);
    out.api_key_env = get_string(v, "backend", "api_key_env", out.api_key_env);
    out.model = get_string(v, "backend", "model", out.model);
    out.timeout_ms = static_cast<int>(get_integer(v, "backend", "timeout_ms", out.timeout_ms));
    out.max_retries = static_cast<int>(get_integer(v, "backend", "max_retries", out.max_retries));
    out.max_in_flight =
        static_cast<int>(get_integer(v, "backend", "max_in_flight", out.max_in_flight));
    out.embedding_dim = get_size(v, "backend", "embedding_dim", out.embedding_dim);
}

void parse_entropy(const json& v, EntropyConfig& out) {
    expect_object(v, "entropy");
    check_keys(v, "entropy", {"samples", "threshold_bits", "oracle", "tau"});
    out.samples = static_cast<int>(get_integer(v, "entropy", "samples", out.samples));
    out.threshold_bits = get_number(v, "entropy", "threshold_bits", out.threshold_bits);
    if (auto it = v.find("oracle"); it != v.end()) {
        if (!it->is_string()) throw Error("config key entropy.oracle must be a string");
        const std::string name = it->get<std::string>();
        auto mode = equivalence_mode_from_name(name);
        if (!mode) {
            throw Error("config key entropy.oracle must be \"exact_normalized\" or "
                        "\"embedding_cosine\", got \"" +
                        name + "\"");
        }
        out.oracle = *mode;
    }
    out.tau = get_number(v, "entropy", "tau", out.tau);
}

// --------------------------------------------------------------------------
// Table sidecar serialization.
// --------------------------------------------------------------------------

ordered_json cell_to_json(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return nullptr;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    return std::get<std::string>(v);
}

Value cell_from_json(const json& v, const std::string& where) {
    if (v.is_null()) return std::monostate{};
    if (v.is_number()) return v.get<double>();
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) return v.get<std::string>();
    throw ParseError("table sidecar: unsupported cell value in " + where);
}

ordered_json table_to_json(const Table& t) {
    ordered_json cols = ordered_json::array();
    for (const Column& c : t.schema.columns) {
        cols.push_back({{"name", c.name},
                        {"type", std::string(column_type_name(c.type))},
                        {"nullable", c.nullable},
                        {"percent", c.unit == Unit::percent}});
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r = ordered_json::array();
        for (const Value& cell : row) r.push_back(cell_to_json(cell));
        rows.push_back(std::move(r));
    }
    return ordered_json{{"name", t.schema.name}, {"columns", std::move(cols)},
                        {"rows", std::move(rows)}};
}

Table table_from_json(const json& rec, const std::string& where) {
    if (!rec.is_object() || !rec.contains("name") || !rec.contains("columns") ||
        !rec.contains("rows")) {
        throw ParseError("table sidecar: malformed record in " + where);
    }
    Table t;
    t.schema.name = rec.at("name").get<std::string>();
    for (const auto& c : rec.at("columns")) {
        Column col;
        col.name = c.at("name").get<std::string>();
        auto type = column_type_from_name(c.at("type").get<std::string>());
        if (!type) {
            throw ParseError("table sidecar: unknown column type in " + where + ": " +
                             c.at("type").get<std::string>());
        }
        col.type = *type;
        col.nullable = c.value("nullable", true);
        col.unit = c.value("percent", false) ? Unit::percent : Unit::none;
        t.schema.columns.push_back(std::move(col));
    }
    for (const auto& r : rec.at("rows")) {
        std::vector<Value> row;
        for (const auto& cell : r) row.push_back(cell_from_json(cell, where));
        t.rows.push_back(std::move(row));
    }
    auto faults = t.check();
    if (!faults.empty()) {
        throw ParseError("table sidecar: table " + t.schema.name + " fails validation: " +
                         faults.front());
    }
    return t;
}

// --------------------------------------------------------------------------
// Shared retrieval walk.
// --------------------------------------------------------------------------

ContextBundle retrieve_context(const AnchorSet& anchors, const HetGraph& graph,
                               const CliConfig& cfg) {
    auto expanded =
        bfs_expand(graph, anchors.anchors, cfg.retrieval.hop_limit, cfg.retrieval.node_budget);
    auto ranked = score_nodes(expanded, graph, anchors.anchors, cfg.retrieval.weights);
    return assemble_context(ranked, graph, cfg.retrieval.char_budget, anchors.anchors,
                            cfg.retrieval.weights);
}

} // namespace

// --------------------------------------------------------------------------
// Config.
// --------------------------------------------------------------------------

void CliConfig::validate() const {
    if (chunking.max_chars == 0) throw Error("chunking.max_chars must be positive");
    if (chunking.overlap_chars >= chunking.max_chars) {
        throw Error("chunking.overlap_chars must be smaller than chunking.max_chars");
    }
    if (retrieval.node_budget == 0) throw Error("retrieval.node_budget must be positive");
    if (retrieval.char_budget == 0) throw Error("retrieval.char_budget must be positive");
    for (double w : {retrieval.weights.alpha, retrieval.weights.beta, retrieval.weights.gamma}) {
        if (!std::isfinite(w) || w < 0.0) {
            throw Error("retrieval.weights must be finite and non-negative");
        }
    }
    backend.validate();
    if (entropy.samples < 2) throw Error("entropy.samples must be at least 2");
    if (!std::isfinite(entropy.threshold_bits) || entropy.threshold_bits < 0.0) {
        throw Error("entropy.threshold_bits must be finite and non-negative");
    }
    if (!(entropy.tau >= 0.0 && entropy.tau <= 1.0)) {
        throw Error("entropy.tau must lie in [0, 1]");
    }
    if (reference_quarter.empty()) throw Error("reference_quarter must be nonempty");
}

CliConfig env_defaults() {
    CliConfig cfg;
    if (const char* backend = std::getenv("MODEL_BACKEND")) {
        const std::string value = backend;
        if (value == "mock") cfg.backend.mode = BackendKind::mock;
        else if (value == "http") cfg.backend.mode = BackendKind::http;
        else if (!value.empty()) {
            throw Error("MODEL_BACKEND must be \"mock\" or \"http\", got \"" + value + "\"");
        }
    }
    if (const char* endpoint = std::getenv("MODEL_ENDPOINT")) {
        if (*endpoint != '\0') cfg.backend.endpoint_url = endpoint;
    }
    return cfg;
}

CliConfig parse_config_json(const std::string& text, CliConfig base) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) throw Error("config must be a JSON object");
    check_keys(doc, "", {"chunking", "retrieval", "backend", "entropy", "reference_quarter"});
    if (auto it = doc.find("chunking"); it != doc.end()) parse_chunking(*it, base.chunking);
    if (auto it = doc.find("retrieval"); it != doc.end()) parse_retrieval(*it, base.retrieval);
    if (auto it = doc.find("backend"); it != doc.end()) parse_backend(*it, base.backend);
    if (auto it = doc.find("entropy"); it != doc.end()) parse_entropy(*it, base.entropy);
    if (auto it = doc.find("reference_quarter"); it != doc.end()) {
        if (!it->is_string()) throw Error("config key reference_quarter must be a string");
        base.reference_quarter = it->get<std::string>();
    }
    base.validate();
    return base;
}

CliConfig load_config_file(const std::filesystem::path& path, CliConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), std::move(base));
}

std::string config_to_json(const CliConfig& cfg) {
    ordered_json doc;
    doc["chunking"] = {{"max_chars", cfg.chunking.max_chars},
                       {"overlap_chars", cfg.chunking.overlap_chars}};
    doc["retrieval"] = {{"hop_limit", cfg.retrieval.hop_limit},
                        {"node_budget", cfg.retrieval.node_budget},
                        {"char_budget", cfg.retrieval.char_budget},
                        {"weights",
                         {{"alpha", cfg.retrieval.weights.alpha},
                          {"beta", cfg.retrieval.weights.beta},
                          {"gamma", cfg.retrieval.weights.gamma}}}};
    doc["backend"] = {{"mode", cfg.backend.mode == BackendKind::mock ? "mock" : "http"},
                      {"endpoint_url", cfg.backend.endpoint_url},
                      {"api_key_env", cfg.backend.api_key_env},
                      {"model", cfg.backend.model},
                      {"timeout_ms", cfg.backend.timeout_ms},
                      {"max_retries", cfg.backend.max_retries},
                      {"max_in_flight", cfg.backend.max_in_flight},
                      {"embedding_dim", cfg.backend.embedding_dim}};
    doc["entropy"] = {{"samples", cfg.entropy.samples},
                      {"threshold_bits", cfg.entropy.threshold_bits},
                      {"oracle", std::string(equivalence_mode_name(cfg.entropy.oracle))},
                      {"tau", cfg.entropy.tau}};
    doc["reference_quarter"] = cfg.reference_quarter;
    return doc.dump(2) + "\n";
}

// --------------------------------------------------------------------------
// Indexing.
// --------------------------------------------------------------------------

BuiltIndex index_corpus(const std::filesystem::path& root, const CliConfig& cfg,
                        ModelGateway& gateway) {
    BuiltIndex out;
    CorpusManifest manifest = load_corpus(root);
    out.stats.documents = manifest.documents.size();
    out.stats.skipped = manifest.skipped.size();
    for (const auto& path : manifest.skipped) {
        out.warnings.push_back("skipped (unrecognized extension): " + path);
    }
    for (const auto& err : manifest.errors) {
        out.warnings.push_back("skipped (unreadable): " + err.path + ": " + err.message);
    }
    if (manifest.documents.empty()) {
        out.warnings.push_back("corpus has no indexable documents; the graph will be empty");
    }

    std::vector<TextChunk> chunks;
    std::vector<MentionInput> mentions;
    std::vector<RelationEdge> relations;
    for (const SourceDocument& doc : manifest.documents) {
        if (doc.format == DocFormat::text) {
            auto doc_chunks = chunk_document(doc, cfg.chunking);
            for (const TextChunk& chunk : doc_chunks) {
                auto extracted = extract_entities(chunk, gateway);
                out.stats.dropped_mentions += extracted.dropped;
                for (const ExtractedMention& m : extracted.mentions) {
                    mentions.push_back({chunk.chunk_id, m.surface, m.type_tag, m.span});
                }
                auto inferred = infer_relations(chunk, extracted.mentions, gateway);
                out.stats.dropped_relations += inferred.dropped;
                relations.insert(relations.end(), inferred.relations.begin(),
                                 inferred.relations.end());
            }
            chunks.insert(chunks.end(), doc_chunks.begin(), doc_chunks.end());
        } else {
            try {
                Table table = parse_structured(doc);
                const std::string name = table.schema.name;
                if (!out.tables.emplace(name, std::move(table)).second) {
                    out.warnings.push_back("dropped table from " + doc.path +
                                           ": name collides with an earlier document: " + name);
                }
            } catch (const Error& e) {
                out.warnings.push_back("dropped structured document " + doc.path + ": " +
                                       e.what());
            }
        }
    }
    out.stats.chunks = chunks.size();
    out.stats.tables = out.tables.size();

    out.graph = build_graph(std::move(chunks), mentions, relations);
    auto faults = verify(out.graph);
    if (!faults.empty()) {
        std::string msg = "index failed graph verification:";
        for (const auto& f : faults) msg += "\n  - " + f;
        throw GraphError(msg);
    }
    out.stats.chunk_nodes = out.graph.chunks().size();
    out.stats.entity_nodes = out.graph.entities().size();
    out.stats.mention_edges = out.graph.mentions().size();
    out.stats.relation_edges = out.graph.relations().size();
    return out;
}

std::filesystem::path tables_sidecar_path(const std::filesystem::path& graph_path) {
    std::filesystem::path p = graph_path;
    p += ".tables";
    return p;
}

void save_tables(const std::filesystem::path& path, const TableSet& tables) {
    std::ofstream outf(path, std::ios::binary | std::ios::trunc);
    if (!outf) throw IoError("cannot open table sidecar for writing: " + path.string());
    for (const auto& [name, table] : tables) {
        outf << table_to_json(table).dump() << '\n';
    }
    outf.flush();
    if (!outf) throw IoError("failed writing table sidecar: " + path.string());
}

TableSet load_tables(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open table sidecar: " + path.string());
    TableSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(line_no);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("table sidecar: invalid JSON at " + where + ": " + e.what(), e.byte);
        }
        Table table = table_from_json(rec, where);
        std::string name = table.schema.name;
        if (!out.emplace(name, std::move(table)).second) {
            throw ParseError("table sidecar: duplicate table name at " + where + ": " + name);
        }
    }
    return out;
}

void save_index(const std::filesystem::path& graph_path, const HetGraph& graph,
                const TableSet& tables) {
    save_graph(graph, graph_path);
    save_tables(tables_sidecar_path(graph_path), tables);
}

LoadedIndex load_index(const std::filesystem::path& graph_path) {
    LoadedIndex out;
    out.graph = load_graph(graph_path);
    const auto sidecar = tables_sidecar_path(graph_path);
    if (std::filesystem::exists(sidecar)) {
        out.tables = load_tables(sidecar);
    }
    return out;
}

// --------------------------------------------------------------------------
// Query.
// --------------------------------------------------------------------------

std::optional<QueryMode> query_mode_from_name(std::string_view name) {
    if (name == "auto") return QueryMode::automatic;
    if (name == "graph") return QueryMode::graph;
    if (name == "table") return QueryMode::table;
    return std::nullopt;
}

std::string_view query_mode_name(QueryMode mode) {
    switch (mode) {
    case QueryMode::automatic: return "auto";
    case QueryMode::graph: return "graph";
    case QueryMode::table: return "table";
    }
    return "auto";
}

QueryMode route_query(const std::string& question) {
    // raw tokens, not content terms: "than" is a stopword, and the
    // "more than" cue needs the adjacent pair intact
    std::vector<std::string> words;
    for (const Token& t : tokenize(question)) {
        words.push_back(casefold(t.text));
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string& w = words[i];
        if (w == "total" || w == "sum" || w == "average" || w == "count" || w == "compare") {
            return QueryMode::table;
        }
        if (w == "more" && i + 1 < words.size() && words[i + 1] == "than") {
            return QueryMode::table;
        }
    }
    return QueryMode::graph;
}

QueryResult run_query(const std::string& question, const HetGraph& graph, const TableSet& tables,
                      const CliConfig& cfg, ModelGateway& gateway, QueryMode mode) {
    QueryResult res;
    res.mode = mode == QueryMode::automatic ? route_query(question) : mode;
    res.anchors = anchor_entities(question, graph, gateway);
    res.context = retrieve_context(res.anchors, graph, cfg);

    if (res.mode == QueryMode::graph) {
        if (res.anchors.anchors.empty()) {
            res.status = QueryResult::Status::no_anchors;
            return res;
        }
        PromptRequest req;
        req.template_id = TemplateId::answer;
        req.variables = {{"context", res.context.joined_text()}, {"question", question}};
        res.answer = gateway.complete(req).text;
        return res;
    }

    // table mode: structured tables plus a table extracted from the
    // retrieved context, when there is any context to extract from
    TableSet exec_tables = tables;
    Catalog catalog;
    for (const auto& [name, table] : exec_tables) catalog.tables.emplace(name, table.schema);
    if (!res.context.chunks.empty()) {
        std::vector<TextChunk> ctx_chunks;
        for (const ContextChunk& cc : res.context.chunks) {
            TextChunk chunk;
            chunk.chunk_id = cc.chunk_id;
            chunk.end = cc.text.size();
            chunk.text = cc.text;
            ctx_chunks.push_back(std::move(chunk));
        }
        GeneratedTable generated = generate_table(ctx_chunks, SchemaHint{}, gateway);
        res.warnings.insert(res.warnings.end(), generated.warnings.begin(),
                            generated.warnings.end());
        if (generated.dropped_rows > 0) {
            res.warnings.push_back("extraction dropped " +
                                   std::to_string(generated.dropped_rows) +
                                   " nonconforming row(s)");
        }
        const std::string name = generated.table.schema.name;
        if (exec_tables.count(name) != 0) {
            res.warnings.push_back("extracted table name collides with a structured table, "
                                   "keeping the structured one: " +
                                   name);
        } else {
            catalog.tables.emplace(name, generated.table.schema);
            exec_tables.emplace(name, std::move(generated.table));
        }
    }
    if (catalog.tables.empty()) {
        throw Error("table mode found no tables: the index has no structured documents and "
                    "the query retrieved no context to extract rows from");
    }

    SynthesizedPlan synth = synthesize_plan(question, catalog, gateway, cfg.reference_quarter);
    res.plan_text = synth.plan_text;
    res.plan_retried = synth.retried;
    ValidationResult checked = validate_plan(synth.plan, catalog);
    if (!checked.ok()) {
        res.status = QueryResult::Status::invalid_plan;
        res.violations = checked.violations;
        return res;
    }
    res.table = execute(*checked.plan, exec_tables);
    return res;
}

AskResult run_ask(const std::string& question, const HetGraph& graph, const CliConfig& cfg,
                  ModelGateway& gateway) {
    AskResult out;
    out.anchors = anchor_entities(question, graph, gateway);
    out.context = retrieve_context(out.anchors, graph, cfg);
    SamplingParams sampling;
    sampling.n = cfg.entropy.samples;
    EquivalenceOracle oracle;
    oracle.mode = cfg.entropy.oracle;
    oracle.tau = cfg.entropy.tau;
    out.report = uncertainty_report(question, out.context.joined_text(), sampling, oracle,
                                    gateway, cfg.entropy.threshold_bits);
    return out;
}

} // namespace hetq
