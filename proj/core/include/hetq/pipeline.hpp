#pragma once

#include "hetq/entropy.hpp"
#include "hetq/exec.hpp"
#include "hetq/gateway.hpp"
#include "hetq/graph.hpp"
#include "hetq/ingest.hpp"
#include "hetq/retrieval.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetq {

struct RetrievalConfig {
    std::size_t hop_limit = 2;
    std::size_t node_budget = 64;
    std::size_t char_budget = 4000;
    RetrievalWeights weights;
};

struct EntropyConfig {
    int samples = 5;
    double threshold_bits = 1.0;
    EquivalenceMode oracle = EquivalenceMode::exact_normalized;
    double tau = 0.8;
};

struct CliConfig {
    ChunkingPolicy chunking;
    RetrievalConfig retrieval;
    BackendConfig backend;
    EntropyConfig entropy;
    std::string reference_quarter = "Q4";

    // Throws Error on out-of-range values (overlap >= max_chars,
    // non-positive budgets, samples < 2, tau outside [0,1], ...).
    void validate() const;
};

// Defaults with MODEL_BACKEND / MODEL_ENDPOINT applied. Env feeds the
// backend only and never overrides an explicit config file or flag, so
// it is the base that file values are parsed onto.
CliConfig env_defaults();

// Strict single-document JSON parse onto `base`. Unknown keys anywhere
// are an error naming the offending key path; so are wrongly typed
// values. Absent keys keep the base value.
CliConfig parse_config_json(const std::string& text, CliConfig base = CliConfig{});
CliConfig load_config_file(const std::filesystem::path& path, CliConfig base = CliConfig{});

// Stable key order, suitable for the repl `:config` view and for
// byte-determinism checks.
std::string config_to_json(const CliConfig& cfg);

struct IndexStats {
    std::size_t documents = 0;
    std::size_t skipped = 0;
    std::size_t chunks = 0;
    std::size_t tables = 0;
    std::size_t chunk_nodes = 0;
    std::size_t entity_nodes = 0;
    std::size_t mention_edges = 0;
    std::size_t relation_edges = 0;
    std::size_t dropped_mentions = 0;
    std::size_t dropped_relations = 0;
};

struct BuiltIndex {
    HetGraph graph;
    TableSet tables; // structured documents, keyed by table name
    IndexStats stats;
    std::vector<std::string> warnings;
};

// Full indexing pass: load corpus, chunk text documents, tag entities
// and relations through the gateway, build and verify the graph, parse
// structured documents into tables. Fatal problems (missing corpus,
// graph integrity) throw; per-file and per-item problems become
// warnings and drop counts.
BuiltIndex index_corpus(const std::filesystem::path& root, const CliConfig& cfg,
                        ModelGateway& gateway);

// Structured tables ride in a sidecar next to the graph file
// (<graph path> + ".tables", one JSON record per table) so a saved
// index round-trips through a single path argument.
std::filesystem::path tables_sidecar_path(const std::filesystem::path& graph_path);
void save_tables(const std::filesystem::path& path, const TableSet& tables);
TableSet load_tables(const std::filesystem::path& path);

void save_index(const std::filesystem::path& graph_path, const HetGraph& graph,
                const TableSet& tables);

struct LoadedIndex {
    HetGraph graph;
    TableSet tables;
};

// Loads the graph plus the sidecar when present (a graph saved without
// tables loads with an empty table set).
LoadedIndex load_index(const std::filesystem::path& graph_path);

enum class QueryMode { automatic, graph, table };

std::optional<QueryMode> query_mode_from_name(std::string_view name);
std::string_view query_mode_name(QueryMode mode);

// auto routing: aggregate/comparison cue words (total, sum, average,
// count, compare, or the pair "more than") pick table mode, everything
// else graph mode.
QueryMode route_query(const std::string& question);

struct QueryResult {
    enum class Status { ok, no_anchors, invalid_plan };

    Status status = Status::ok;
    QueryMode mode = QueryMode::graph; // resolved, never automatic
    AnchorSet anchors;
    ContextBundle context;
    std::string answer;                  // graph mode
    std::string plan_text;               // table mode, canonical form
    bool plan_retried = false;           // synthesis needed a second try
    std::optional<ResultTable> table;    // table mode, when the plan ran
    std::vector<std::string> violations; // status invalid_plan
    std::vector<std::string> warnings;
};

// One question through the hybrid pipeline. Graph mode with zero
// anchors reports Status::no_anchors; table mode with a plan the
// validator rejects reports Status::invalid_plan with every violation.
// Backend and I/O failures propagate as exceptions.
QueryResult run_query(const std::string& question, const HetGraph& graph, const TableSet& tables,
                      const CliConfig& cfg, ModelGateway& gateway,
                      QueryMode mode = QueryMode::automatic);

struct AskResult {
    AnchorSet anchors;
    ContextBundle context;
    EntropyReport report;
};

// Samples the answer path cfg.entropy.samples times over the retrieved
// context and reports semantic entropy. Zero anchors simply means an
// empty context; the sampling still runs.
AskResult run_ask(const std::string& question, const HetGraph& graph, const CliConfig& cfg,
                  ModelGateway& gateway);

} // namespace hetq
