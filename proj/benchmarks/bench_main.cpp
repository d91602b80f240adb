// Microbenchmarks for the hot paths: chunking, BFS expansion, plan
// execution, and answer clustering. All fixtures are deterministic.

#include "hetq/entropy.hpp"
#include "hetq/exec.hpp"
#include "hetq/gateway.hpp"
#include "hetq/graph.hpp"
#include "hetq/ingest.hpp"
#include "hetq/plan.hpp"
#include "hetq/retrieval.hpp"
#include "hetq/validate.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

namespace {

// -------------------------------------------------------------- chunking

hetq::SourceDocument big_document(std::size_t chars) {
    hetq::SourceDocument doc;
    doc.doc_id = "bench";
    doc.path = "bench.txt";
    std::mt19937_64 rng(1);
    const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
    while (doc.content.size() < chars) {
        doc.content += words[rng() % 6];
        doc.content += (rng() % 12 == 0) ? ". " : " ";
    }
    return doc;
}

void bm_chunk_document(benchmark::State& state) {
    const hetq::SourceDocument doc = big_document(static_cast<std::size_t>(state.range(0)));
    const hetq::ChunkingPolicy policy;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hetq::chunk_document(doc, policy));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(doc.content.size()));
}
BENCHMARK(bm_chunk_document)->Arg(10'000)->Arg(100'000);

// ------------------------------------------------------- bfs expansion

struct GraphFixture {
    hetq::HetGraph graph;
    std::vector<std::string> anchors;
};

// ring of chunks with per-chunk entities plus random relation chords
GraphFixture ring_graph(std::size_t n_chunks) {
    std::mt19937_64 rng(2);
    std::vector<hetq::TextChunk> chunks;
    std::vector<hetq::MentionInput> mentions;
    std::vector<hetq::RelationEdge> relations;
    std::vector<std::string> entity_ids;
    for (std::size_t i = 0; i < n_chunks; ++i) {
        hetq::TextChunk chunk;
        chunk.doc_id = "d" + std::to_string(i / 8);
        char ord[8];
        std::snprintf(ord, sizeof(ord), "%06zu", i);
        chunk.chunk_id = chunk.doc_id + ":" + ord;
        chunk.ordinal = i;
        chunk.text.assign(64, 'x');
        chunk.end = chunk.text.size();
        chunks.push_back(chunk);

        const std::string name = "entity " + std::to_string(i);
        mentions.push_back({chunk.chunk_id, name, "other", {0, 8}});
        entity_ids.push_back(hetq::entity_id_for(name, "other"));
    }
    for (std::size_t i = 0; i < n_chunks; ++i) {
        hetq::RelationEdge edge;
        edge.src_entity = entity_ids[i];
        edge.dst_entity = entity_ids[(i + 1) % n_chunks];
        edge.predicate = "next";
        edge.provenance_chunk = chunks[i].chunk_id;
        relations.push_back(edge);
        if (rng() % 4 == 0) {
            hetq::RelationEdge chord;
            chord.src_entity = entity_ids[i];
            chord.dst_entity = entity_ids[rng() % n_chunks];
            if (chord.src_entity != chord.dst_entity) {
                chord.predicate = "sees";
                chord.provenance_chunk = chunks[i].chunk_id;
                relations.push_back(chord);
            }
        }
    }
    GraphFixture fx;
    fx.graph = hetq::build_graph(std::move(chunks), mentions, std::move(relations));
    fx.anchors = {entity_ids[0], entity_ids[n_chunks / 2]};
    return fx;
}

void bm_bfs_expand(benchmark::State& state) {
    const GraphFixture fx = ring_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hetq::bfs_expand(fx.graph, fx.anchors, 4, 256));
    }
}
BENCHMARK(bm_bfs_expand)->Arg(100)->Arg(1000);

// ----------------------------------------------------------- execution

struct ExecFixture {
    hetq::TableSet tables;
    hetq::Catalog catalog;
    std::optional<hetq::ValidatedPlan> plan;
};

ExecFixture exec_fixture(std::size_t rows) {
    std::mt19937_64 rng(3);
    hetq::Table t;
    t.schema.name = "m";
    t.schema.columns = {{"quarter", hetq::ColumnType::text, true, hetq::Unit::none},
                        {"sales", hetq::ColumnType::number, true, hetq::Unit::none},
                        {"region", hetq::ColumnType::text, true, hetq::Unit::none}};
    const char* quarters[] = {"Q1", "Q2", "Q3", "Q4"};
    const char* regions[] = {"north", "south", "east", "west"};
    for (std::size_t i = 0; i < rows; ++i) {
        t.rows.push_back({std::string(quarters[rng() % 4]),
                          static_cast<double>(rng() % 500),
                          std::string(regions[rng() % 4])});
    }
    ExecFixture fx;
    fx.catalog.tables.emplace("m", t.schema);
    fx.tables.emplace("m", std::move(t));
    const hetq::PlanPtr plan = hetq::parse_plan(
        "Aggregate(group=[region], aggs=[SUM(sales) AS total], "
        "input=Filter(pred=(quarter = \"Q3\"), input=Scan(m)))");
    auto vr = hetq::validate_plan(plan, fx.catalog);
    fx.plan = std::move(vr.plan);
    return fx;
}

void bm_execute_filter_aggregate(benchmark::State& state) {
    const ExecFixture fx = exec_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hetq::execute(*fx.plan, fx.tables));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(bm_execute_filter_aggregate)->Arg(1'000)->Arg(10'000);

// ----------------------------------------------------------- clustering

void bm_cluster_answers(benchmark::State& state) {
    auto gateway = hetq::make_mock_gateway();
    const char* variants[] = {"It depends on jurisdiction.", "Yes, if copyrighted.",
                              "No, unless consent is violated.", "it DEPENDS on jurisdiction"};
    std::vector<hetq::AnswerSample> samples;
    std::mt19937_64 rng(4);
    for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) {
        samples.push_back({i, variants[rng() % 4]});
    }
    const hetq::EquivalenceOracle oracle{};
    for (auto _ : state) {
        benchmark::DoNotOptimize(hetq::cluster_answers(samples, oracle, *gateway));
    }
}
BENCHMARK(bm_cluster_answers)->Arg(16)->Arg(64);

} // namespace

BENCHMARK_MAIN();
