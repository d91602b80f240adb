#include "hetq/error.hpp"
#include "hetq/graph.hpp"
#include "hetq/graph_io.hpp"
#include "hetq/pipeline.hpp"

#include "support/fake_gateway.hpp"
#include "support/paths.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

using namespace hetq;
using testsupport::FakeGateway;
namespace fs = std::filesystem;

namespace {

class EnvGuard {
public:
    EnvGuard(const char* name, const char* value) : name_(name) {
        if (const char* old = std::getenv(name)) saved_ = old;
        if (value) ::setenv(name, value, 1);
        else ::unsetenv(name);
    }
    ~EnvGuard() {
        if (saved_) ::setenv(name_.c_str(), saved_->c_str(), 1);
        else ::unsetenv(name_.c_str());
    }

private:
    std::string name_;
    std::optional<std::string> saved_;
};

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("hetq_pipeline_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

bool tables_equal(const TableSet& a, const TableSet& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [name, ta] : a) {
        auto it = b.find(name);
        if (it == b.end()) return false;
        const Table& tb = it->second;
        if (ta.schema.name != tb.schema.name ||
            ta.schema.columns.size() != tb.schema.columns.size() ||
            ta.rows.size() != tb.rows.size()) {
            return false;
        }
        for (std::size_t c = 0; c < ta.schema.columns.size(); ++c) {
            const Column& ca = ta.schema.columns[c];
            const Column& cb = tb.schema.columns[c];
            if (ca.name != cb.name || ca.type != cb.type || ca.nullable != cb.nullable ||
                ca.unit != cb.unit) {
                return false;
            }
        }
        for (std::size_t r = 0; r < ta.rows.size(); ++r) {
            for (std::size_t c = 0; c < ta.rows[r].size(); ++c) {
                if (!value_equal(ta.rows[r][c], tb.rows[r][c])) return false;
            }
        }
    }
    return true;
}

const BuiltIndex& demo_index() {
    static const BuiltIndex index = [] {
        auto gateway = make_mock_gateway();
        return index_corpus(testsupport::demo_dir(), CliConfig{}, *gateway);
    }();
    return index;
}

TableSet one_table(const std::string& name) {
    Table t;
    t.schema.name = name;
    t.schema.columns = {{"Quarter", ColumnType::text, true, Unit::none}};
    t.rows = {{Value{std::string("Q1")}}};
    TableSet set;
    set[name] = std::move(t);
    return set;
}

} // namespace

// ---------------------------------------------------------------------------
// Config.
// ---------------------------------------------------------------------------

TEST_CASE("config serialization is stable and parses back to itself") {
    const std::string text = config_to_json(CliConfig{});
    CHECK(!text.empty());
    CHECK(text.back() == '\n');
    auto j = nlohmann::json::parse(text);
    CHECK(j.at("chunking").at("max_chars") == 1000);
    CHECK(j.at("retrieval").at("weights").at("alpha") == 0.5);
    CHECK(j.at("backend").at("mode") == "mock");
    CHECK(j.at("entropy").at("oracle") == "exact_normalized");
    CHECK(j.at("reference_quarter") == "Q4");

    CliConfig parsed = parse_config_json(text);
    CHECK(config_to_json(parsed) == text);
    CHECK(config_to_json(parse_config_json("{}")) == text);
}

TEST_CASE("absent config keys keep the base value") {
    CliConfig base;
    base.chunking.max_chars = 500;
    base.backend.model = "tuned";
    CliConfig out = parse_config_json(
        R"({"retrieval": {"hop_limit": 3, "weights": {"alpha": 0.9}}})", base);
    CHECK(out.chunking.max_chars == 500);
    CHECK(out.backend.model == "tuned");
    CHECK(out.retrieval.hop_limit == 3);
    CHECK(out.retrieval.weights.alpha == 0.9);
    CHECK(out.retrieval.weights.beta == 0.3);
    CHECK(out.retrieval.node_budget == 64);
}

TEST_CASE("every config section parses") {
    CliConfig out = parse_config_json(R"({
      "chunking": {"max_chars": 800, "overlap_chars": 80},
      "retrieval": {"hop_limit": 1, "node_budget": 16, "char_budget": 900,
                    "weights": {"alpha": 1.0, "beta": 0.0, "gamma": 0.25}},
      "backend": {"mode": "http", "endpoint_url": "http://h:1/v1", "api_key_env": "KEY",
                  "model": "m", "timeout_ms": 500, "max_retries": 1, "max_in_flight": 2,
                  "embedding_dim": 64},
      "entropy": {"samples": 3, "threshold_bits": 0.5, "oracle": "embedding_cosine",
                  "tau": 0.7},
      "reference_quarter": "Q1"
    })");
    CHECK(out.chunking.overlap_chars == 80);
    CHECK(out.retrieval.char_budget == 900);
    CHECK(out.retrieval.weights.gamma == 0.25);
    CHECK(out.backend.mode == BackendKind::http);
    CHECK(out.backend.endpoint_url == "http://h:1/v1");
    CHECK(out.backend.api_key_env == "KEY");
    CHECK(out.backend.timeout_ms == 500);
    CHECK(out.backend.embedding_dim == 64);
    CHECK(out.entropy.samples == 3);
    CHECK(out.entropy.oracle == EquivalenceMode::embedding_cosine);
    CHECK(out.entropy.tau == 0.7);
    CHECK(out.reference_quarter == "Q1");
}

TEST_CASE("unknown config keys fail with their full path") {
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"widget": 1})"),
                         "unknown config key: widget", Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"chunking": {"max": 1}})"),
                         "unknown config key: chunking.max", Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"retrieval": {"weights": {"delta": 1.0}}})"),
                         "unknown config key: retrieval.weights.delta", Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"backend": {"api_key": "x"}})"),
                         "unknown config key: backend.api_key", Error);
}

TEST_CASE("config type faults name the key") {
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"chunking": {"max_chars": "big"}})"),
                         doctest::Contains("chunking.max_chars must be an integer"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"chunking": {"max_chars": 2.5}})"),
                         doctest::Contains("must be an integer"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"entropy": {"tau": "high"}})"),
                         doctest::Contains("entropy.tau must be a number"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"backend": {"mode": 5}})"),
                         doctest::Contains("backend.mode must be a string"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"backend": {"mode": "quantum"}})"),
                         doctest::Contains("\"mock\" or \"http\""), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"entropy": {"oracle": "fuzzy"}})"),
                         doctest::Contains("entropy.oracle"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"retrieval": {"node_budget": -4}})"),
                         doctest::Contains("must be non-negative"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"reference_quarter": 3})"),
                         doctest::Contains("reference_quarter must be a string"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"chunking": 7})"),
                         doctest::Contains("chunking must be an object"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json("[]"),
                         doctest::Contains("must be a JSON object"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json("{nope"),
                         doctest::Contains("not valid JSON"), ParseError);
}

TEST_CASE("config validation rejects out-of-range values") {
    CHECK_THROWS_WITH_AS(
        parse_config_json(R"({"chunking": {"max_chars": 100, "overlap_chars": 100}})"),
        doctest::Contains("overlap_chars must be smaller"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"entropy": {"samples": 1}})"),
                         doctest::Contains("at least 2"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"entropy": {"tau": 1.5}})"),
                         doctest::Contains("[0, 1]"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"retrieval": {"weights": {"alpha": -1.0}}})"),
                         doctest::Contains("finite and non-negative"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"retrieval": {"char_budget": 0}})"),
                         doctest::Contains("char_budget must be positive"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"backend": {"mode": "http"}})"),
                         doctest::Contains("requires a nonempty endpoint_url"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"backend": {"timeout_ms": 0}})"),
                         doctest::Contains("timeout_ms must be positive"), Error);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"reference_quarter": ""})"),
                         doctest::Contains("reference_quarter must be nonempty"), Error);
}

TEST_CASE("environment seeds the backend defaults and files override it") {
    SUBCASE("env applies when set") {
        EnvGuard backend("MODEL_BACKEND", "http");
        EnvGuard endpoint("MODEL_ENDPOINT", "http://env-host:9/v1");
        CliConfig cfg = env_defaults();
        CHECK(cfg.backend.mode == BackendKind::http);
        CHECK(cfg.backend.endpoint_url == "http://env-host:9/v1");

        // a config file parsed onto the env base wins where it speaks
        CliConfig overridden = parse_config_json(R"({"backend": {"mode": "mock"}})", cfg);
        CHECK(overridden.backend.mode == BackendKind::mock);
        CHECK(overridden.backend.endpoint_url == "http://env-host:9/v1");
    }
    SUBCASE("empty env values are ignored") {
        EnvGuard backend("MODEL_BACKEND", "");
        EnvGuard endpoint("MODEL_ENDPOINT", "");
        CliConfig cfg = env_defaults();
        CHECK(cfg.backend.mode == BackendKind::mock);
        CHECK(cfg.backend.endpoint_url.empty());
    }
    SUBCASE("unset env leaves pure defaults") {
        EnvGuard backend("MODEL_BACKEND", nullptr);
        EnvGuard endpoint("MODEL_ENDPOINT", nullptr);
        CHECK(config_to_json(env_defaults()) == config_to_json(CliConfig{}));
    }
    SUBCASE("a bad backend name is fatal") {
        EnvGuard backend("MODEL_BACKEND", "banana");
        CHECK_THROWS_WITH_AS(env_defaults(), doctest::Contains("MODEL_BACKEND"), Error);
    }
}

TEST_CASE("config files load from disk") {
    CHECK_THROWS_WITH_AS(load_config_file("/nonexistent/hetq.json"),
                         doctest::Contains("cannot open config file"), IoError);
    const fs::path dir = fresh_dir("config");
    write_file(dir / "cfg.json", R"({"entropy": {"samples": 7}})");
    CliConfig cfg = load_config_file(dir / "cfg.json");
    CHECK(cfg.entropy.samples == 7);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Routing.
// ---------------------------------------------------------------------------

TEST_CASE("query mode names round-trip") {
    CHECK(query_mode_from_name("auto") == QueryMode::automatic);
    CHECK(query_mode_from_name("graph") == QueryMode::graph);
    CHECK(query_mode_from_name("table") == QueryMode::table);
    CHECK(!query_mode_from_name("tables").has_value());
    CHECK(!query_mode_from_name("").has_value());
    CHECK(query_mode_name(QueryMode::automatic) == "auto");
    CHECK(query_mode_name(QueryMode::graph) == "graph");
    CHECK(query_mode_name(QueryMode::table) == "table");
}

TEST_CASE("auto routing keys on aggregate and comparison cues") {
    CHECK(route_query("Find the total sales of all products in Q3") == QueryMode::table);
    CHECK(route_query("What is the sum of ratings?") == QueryMode::table);
    CHECK(route_query("average rating per manufacturer") == QueryMode::table);
    CHECK(route_query("count the clinical trials") == QueryMode::table);
    CHECK(route_query("Compare Products A and B") == QueryMode::table);
    CHECK(route_query("TOTAL sales this year") == QueryMode::table);
    CHECK(route_query("Which products sold more than 100 units?") == QueryMode::table);

    CHECK(route_query("Tell me about Product A") == QueryMode::graph);
    CHECK(route_query("Summarize the report") == QueryMode::graph); // "sum" must be whole-word
    CHECK(route_query("more units, please") == QueryMode::graph);   // pair must be adjacent
    CHECK(route_query("more is less than ideal") == QueryMode::graph);
    CHECK(route_query("") == QueryMode::graph);
}

// ---------------------------------------------------------------------------
// Indexing the demo corpus.
// ---------------------------------------------------------------------------

TEST_CASE("the demo corpus indexes cleanly") {
    REQUIRE(!testsupport::demo_dir().empty());
    const BuiltIndex& index = demo_index();
    CHECK(index.warnings.empty());
    CHECK(index.stats.documents == 6);
    CHECK(index.stats.skipped == 0);
    CHECK(index.stats.chunks == 4);
    CHECK(index.stats.tables == 2);
    CHECK(index.stats.chunk_nodes == 4);
    CHECK(index.stats.entity_nodes == 21);
    CHECK(index.stats.mention_edges == 43);
    CHECK(index.stats.relation_edges == 12);
    CHECK(index.stats.dropped_mentions == 0);
    CHECK(index.stats.dropped_relations == 0);
    CHECK(verify(index.graph).empty());
    REQUIRE(index.tables.count("products") == 1);
    REQUIRE(index.tables.count("sales") == 1);

    // hand-summed Q3 sales from the structured table
    const Table& sales = index.tables.at("sales");
    const int qcol = sales.schema.find_column("quarter");
    const int scol = sales.schema.find_column("sales");
    REQUIRE(qcol >= 0);
    REQUIRE(scol >= 0);
    double q3 = 0.0;
    for (const auto& row : sales.rows) {
        if (value_equal(row[qcol], Value{std::string("Q3")})) {
            q3 += std::get<double>(row[scol]);
        }
    }
    CHECK(q3 == 218.0);
}

TEST_CASE("indexing twice gives structurally equal results") {
    auto gateway = make_mock_gateway();
    BuiltIndex again = index_corpus(testsupport::demo_dir(), CliConfig{}, *gateway);
    CHECK(again.graph == demo_index().graph);
    CHECK(tables_equal(again.tables, demo_index().tables));
}

TEST_CASE("per-file indexing problems become warnings, not failures") {
    const fs::path dir = fresh_dir("warnings");
    write_file(dir / "a.txt", "Product A works well.");
    write_file(dir / "notes.xyz", "not indexable");
    write_file(dir / "bad.csv", "x,y\n1\n");
    auto gateway = make_mock_gateway();
    BuiltIndex index = index_corpus(dir, CliConfig{}, *gateway);
    CHECK(index.stats.documents == 2); // a.txt and bad.csv
    CHECK(index.stats.skipped == 1);
    CHECK(index.stats.chunks == 1);
    CHECK(index.stats.tables == 0);
    bool skipped_warning = false;
    bool dropped_warning = false;
    for (const auto& w : index.warnings) {
        skipped_warning = skipped_warning || w.find("unrecognized extension") != std::string::npos;
        dropped_warning = dropped_warning || w.find("dropped structured document") != std::string::npos;
    }
    CHECK(skipped_warning);
    CHECK(dropped_warning);
    fs::remove_all(dir);
}

TEST_CASE("structured documents with colliding table names keep the first") {
    const fs::path dir = fresh_dir("collide");
    write_file(dir / "b.csv", "k,v\nx,1\n");
    write_file(dir / "b.json", R"([{"k": "y", "v": 2}])");
    auto gateway = make_mock_gateway();
    BuiltIndex index = index_corpus(dir, CliConfig{}, *gateway);
    CHECK(index.stats.tables == 1);
    REQUIRE(index.tables.count("b") == 1);
    bool collision = false;
    for (const auto& w : index.warnings) {
        collision = collision || w.find("name collides") != std::string::npos;
    }
    CHECK(collision);
    fs::remove_all(dir);
}

TEST_CASE("an empty corpus indexes to an empty graph with a warning") {
    const fs::path dir = fresh_dir("empty");
    auto gateway = make_mock_gateway();
    BuiltIndex index = index_corpus(dir, CliConfig{}, *gateway);
    CHECK(index.stats.documents == 0);
    CHECK(index.graph.chunks().empty());
    REQUIRE(!index.warnings.empty());
    CHECK(index.warnings.front().find("no indexable documents") != std::string::npos);
    fs::remove_all(dir);

    CHECK_THROWS_AS(index_corpus("/nonexistent/corpus", CliConfig{}, *gateway), IoError);
}

// ---------------------------------------------------------------------------
// Index persistence (graph file + table sidecar).
// ---------------------------------------------------------------------------

TEST_CASE("the sidecar path appends .tables") {
    CHECK(tables_sidecar_path("idx.graph") == fs::path("idx.graph.tables"));
    CHECK(tables_sidecar_path("/a/b/c.bin") == fs::path("/a/b/c.bin.tables"));
}

TEST_CASE("a saved index round-trips graph and tables") {
    const fs::path dir = fresh_dir("roundtrip");
    const fs::path path = dir / "demo.graph";
    const BuiltIndex& index = demo_index();
    save_index(path, index.graph, index.tables);
    CHECK(fs::exists(path));
    CHECK(fs::exists(tables_sidecar_path(path)));

    LoadedIndex loaded = load_index(path);
    CHECK(loaded.graph == index.graph);
    CHECK(tables_equal(loaded.tables, index.tables));
    fs::remove_all(dir);
}

TEST_CASE("a graph saved without a sidecar loads with empty tables") {
    const fs::path dir = fresh_dir("nosidecar");
    const fs::path path = dir / "demo.graph";
    save_graph(demo_index().graph, path);
    LoadedIndex loaded = load_index(path);
    CHECK(loaded.graph == demo_index().graph);
    CHECK(loaded.tables.empty());
    CHECK_THROWS_AS(load_index(dir / "missing.graph"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("table sidecar cells cover null, number, boolean and text") {
    Table t;
    t.schema.name = "mixed";
    t.schema.columns = {
        {"label", ColumnType::text, true, Unit::none},
        {"score", ColumnType::number, false, Unit::percent},
        {"flag", ColumnType::boolean, true, Unit::none},
    };
    t.rows = {
        {Value{std::string("a")}, Value{12.5}, Value{true}},
        {Value{}, Value{-3.0}, Value{}},
    };
    TableSet set;
    set["mixed"] = std::move(t);

    const fs::path dir = fresh_dir("cells");
    const fs::path path = dir / "x.tables";
    save_tables(path, set);
    TableSet loaded = load_tables(path);
    CHECK(tables_equal(set, loaded));
    CHECK(loaded.at("mixed").schema.columns[1].unit == Unit::percent);
    CHECK(loaded.at("mixed").schema.columns[1].nullable == false);
    fs::remove_all(dir);
}

TEST_CASE("sidecar loading rejects malformed files") {
    const fs::path dir = fresh_dir("sidecar_errors");
    auto path_for = [&](const char* name, const std::string& content) {
        const fs::path p = dir / name;
        write_file(p, content);
        return p;
    };

    CHECK_THROWS_AS(load_tables(dir / "missing.tables"), IoError);
    CHECK_THROWS_WITH_AS(load_tables(path_for("a", "{nope\n")),
                         doctest::Contains("invalid JSON at"), ParseError);
    CHECK_THROWS_WITH_AS(load_tables(path_for("b", R"({"name":"t"})" "\n")),
                         doctest::Contains("malformed record"), ParseError);
    CHECK_THROWS_WITH_AS(
        load_tables(path_for(
            "c", R"({"name":"t","columns":[{"name":"a","type":"widget"}],"rows":[]})" "\n")),
        doctest::Contains("unknown column type"), ParseError);
    CHECK_THROWS_WITH_AS(
        load_tables(path_for(
            "d", R"({"name":"t","columns":[{"name":"a","type":"number"}],"rows":[[{"x":1}]]})"
                 "\n")),
        doctest::Contains("unsupported cell value"), ParseError);
    CHECK_THROWS_WITH_AS(
        load_tables(path_for(
            "e", R"({"name":"t","columns":[{"name":"a","type":"number"}],"rows":[[1,2]]})" "\n")),
        doctest::Contains("fails validation"), ParseError);
    const std::string rec = R"({"name":"t","columns":[{"name":"a","type":"number"}],"rows":[]})";
    CHECK_THROWS_WITH_AS(load_tables(path_for("f", rec + "\n" + rec + "\n")),
                         doctest::Contains("duplicate table name"), ParseError);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// run_query / run_ask.
// ---------------------------------------------------------------------------

TEST_CASE("graph mode answers from retrieved context") {
    auto gateway = make_mock_gateway();
    const BuiltIndex& index = demo_index();
    auto res = run_query("Tell me about Product A", index.graph, index.tables, CliConfig{},
                         *gateway, QueryMode::graph);
    CHECK(res.status == QueryResult::Status::ok);
    CHECK(res.mode == QueryMode::graph);
    CHECK(!res.anchors.anchors.empty());
    CHECK(!res.context.chunks.empty());
    CHECK(!res.answer.empty());
    // the mock backend answers with the leading sentence of the context
    CHECK(res.context.joined_text().rfind(res.answer, 0) == 0);
    CHECK(res.plan_text.empty());
    CHECK(!res.table.has_value());
}

TEST_CASE("a two-product comparison retrieves both product chunks") {
    auto gateway = make_mock_gateway();
    const BuiltIndex& index = demo_index();
    auto res = run_query("Compare Products A and B", index.graph, index.tables, CliConfig{},
                         *gateway, QueryMode::graph);
    REQUIRE(res.status == QueryResult::Status::ok);
    bool saw_a = false;
    bool saw_b = false;
    for (const ContextChunk& c : res.context.chunks) {
        saw_a = saw_a || c.text.find("Product A") != std::string::npos;
        saw_b = saw_b || c.text.find("Product B") != std::string::npos;
    }
    CHECK(saw_a);
    CHECK(saw_b);
    CHECK(res.anchors.anchors.size() >= 2);
}

TEST_CASE("graph mode with zero anchors reports no_anchors") {
    auto gateway = make_mock_gateway();
    const BuiltIndex& index = demo_index();
    auto res = run_query("zzz qqq", index.graph, index.tables, CliConfig{}, *gateway,
                         QueryMode::graph);
    CHECK(res.status == QueryResult::Status::no_anchors);
    CHECK(res.answer.empty());
    CHECK(res.anchors.anchors.empty());
}

TEST_CASE("auto mode routes an aggregate question through tables") {
    auto gateway = make_mock_gateway();
    const BuiltIndex& index = demo_index();
    auto res = run_query("Find the total sales of all products in Q3", index.graph, index.tables,
                         CliConfig{}, *gateway, QueryMode::automatic);
    REQUIRE(res.status == QueryResult::Status::ok);
    CHECK(res.mode == QueryMode::table);
    CHECK(res.plan_text ==
          "Aggregate(group=[], aggs=[SUM(sales) AS sum_sales], "
          "input=Filter(pred=(quarter = \"Q3\"), input=Scan(sales)))");
    CHECK(!res.plan_retried);
    REQUIRE(res.table.has_value());
    REQUIRE(res.table->rows.size() == 1);
    CHECK(res.table->schema.columns[0].name == "sum_sales");
    CHECK(std::get<double>(res.table->rows[0][0]) == 218.0);
}

TEST_CASE("table mode surfaces validator rejections with every violation") {
    FakeGateway fake;
    fake.scripts[TemplateId::ner].push_back("[]");
    fake.scripts[TemplateId::plan_synthesis].push_back("Scan(widget)");
    const BuiltIndex& index = demo_index();
    auto res = run_query("count the widgets", index.graph, index.tables, CliConfig{}, fake,
                         QueryMode::automatic);
    CHECK(res.mode == QueryMode::table);
    CHECK(res.status == QueryResult::Status::invalid_plan);
    CHECK(res.plan_text == "Scan(widget)");
    REQUIRE(res.violations.size() == 1);
    CHECK(res.violations[0].find("unknown table widget") != std::string::npos);
    CHECK(!res.table.has_value());
}

TEST_CASE("table mode without tables or context is fatal") {
    FakeGateway fake;
    fake.scripts[TemplateId::ner].push_back("[]");
    HetGraph empty = build_graph({}, {}, {});
    CHECK_THROWS_WITH_AS(
        run_query("count things", empty, TableSet{}, CliConfig{}, fake, QueryMode::table),
        doctest::Contains("table mode found no tables"), Error);
}

TEST_CASE("an extracted table that collides with a structured name is discarded") {
    FakeGateway fake;
    fake.scripts[TemplateId::ner].push_back("[]");
    fake.scripts[TemplateId::table_extract].push_back(
        R"({"Quarter":"Q9","Sales Metrics":"Sales","Change Percentage":1})" "\n");
    fake.scripts[TemplateId::plan_synthesis].push_back("Scan(extracted)");
    const BuiltIndex& index = demo_index();
    auto res = run_query("Compare Products A and B", index.graph, one_table("extracted"),
                         CliConfig{}, fake, QueryMode::table);
    REQUIRE(res.status == QueryResult::Status::ok);
    bool collision = false;
    for (const auto& w : res.warnings) {
        collision = collision || w.find("collides with a structured table") != std::string::npos;
    }
    CHECK(collision);
    REQUIRE(res.table.has_value());
    // the structured single-row table won, not the generated one
    REQUIRE(res.table->rows.size() == 1);
    CHECK(value_equal(res.table->rows[0][0], Value{std::string("Q1")}));
}

TEST_CASE("table mode can run a plan over rows extracted from context") {
    FakeGateway fake;
    fake.scripts[TemplateId::ner].push_back("[]");
    fake.scripts[TemplateId::table_extract].push_back(
        "{\"Quarter\":\"Q2\",\"Sales Metrics\":\"Sales\",\"Change Percentage\":20}\n"
        "{\"Quarter\":\"Q1\",\"Sales Metrics\":\"Sales\",\"Change Percentage\":5}\n"
        "bad line\n");
    fake.scripts[TemplateId::plan_synthesis].push_back(
        "Filter(pred=(`Change Percentage` > 10%), input=Scan(extracted))");
    const BuiltIndex& index = demo_index();
    auto res = run_query("Compare Products A and B", index.graph, TableSet{}, CliConfig{}, fake,
                         QueryMode::table);
    REQUIRE(res.status == QueryResult::Status::ok);
    REQUIRE(res.table.has_value());
    REQUIRE(res.table->rows.size() == 1);
    CHECK(value_equal(res.table->rows[0][0], Value{std::string("Q2")}));
    bool dropped = false;
    for (const auto& w : res.warnings) {
        dropped = dropped || w.find("dropped 1 nonconforming row") != std::string::npos;
    }
    CHECK(dropped);
}

TEST_CASE("run_ask flags a three-way ambiguous answer set") {
    auto gateway = make_mock_gateway();
    const BuiltIndex& index = demo_index();
    auto out = run_ask("Can I be sued for taking a photo?", index.graph, CliConfig{}, *gateway);
    CHECK(out.anchors.anchors.empty()); // sampling runs even with no context
    CHECK(out.report.samples.size() == 5);
    CHECK(out.report.clusters.size() == 3);
    CHECK(std::abs(out.report.entropy_bits - 1.521928) <= 1e-6);
    CHECK(out.report.flag == ReviewFlag::review);
}

TEST_CASE("run_ask is unanimous on a grounded factual question") {
    auto gateway = make_mock_gateway();
    const BuiltIndex& index = demo_index();
    auto out = run_ask("Tell me about Product A", index.graph, CliConfig{}, *gateway);
    CHECK(!out.anchors.anchors.empty());
    CHECK(out.report.clusters.size() == 1);
    CHECK(out.report.entropy_bits == 0.0);
    CHECK(out.report.flag == ReviewFlag::ok);
    CHECK(out.report.best_answer == out.report.samples[0].text);
}

TEST_CASE("run_ask honors the configured sample count") {
    auto gateway = make_mock_gateway();
    CliConfig cfg;
    cfg.entropy.samples = 7;
    auto out = run_ask("Can I be sued for taking a photo?", demo_index().graph, cfg, *gateway);
    CHECK(out.report.samples.size() == 7);
}
