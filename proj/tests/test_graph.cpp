#include "hetq/error.hpp"
#include "hetq/graph.hpp"

#include "support/random_graphs.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

using namespace hetq;

namespace {

// independent id recomputation: FNV-1a over "<canonical>\x1f<tag>"
std::string reference_entity_id(const std::string& canonical, const std::string& tag) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    mix(canonical);
    h ^= 0x1f;
    h *= 1099511628211ull;
    mix(tag);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TextChunk make_chunk(const std::string& id, const std::string& text) {
    TextChunk c;
    c.chunk_id = id;
    c.doc_id = id.substr(0, id.find(':'));
    c.begin = 0;
    c.end = text.size();
    c.text = text;
    return c;
}

} // namespace

TEST_CASE("entity ids hash canonical name and tag") {
    CHECK(entity_id_for("product a", "other") == reference_entity_id("product a", "other"));
    CHECK(entity_id_for("drug y", "product") == reference_entity_id("drug y", "product"));
    CHECK(entity_id_for("x", "person") != entity_id_for("x", "org"));
}

TEST_CASE("node id strings order chunks before entities") {
    CHECK(chunk_node_id("abc:000000") == "c:abc:000000");
    CHECK(entity_node_id("ff00") == "e:ff00");
    CHECK(chunk_node_id("zzz") < entity_node_id("000")); // 'c' < 'e'
}

TEST_CASE("build_graph dedupes entities by canonical name and tag") {
    auto chunks = std::vector<TextChunk>{make_chunk("d:000000", "Product A and product  a.")};
    std::vector<MentionInput> mentions = {
        {"d:000000", "Product A", "other", {0, 9}},
        {"d:000000", "product  a", "other", {14, 24}},
    };
    HetGraph g = build_graph(chunks, mentions, {});
    REQUIRE(g.entities().size() == 1);
    CHECK(g.entities()[0].canonical_name == "product a");
    REQUIRE(g.entities()[0].aliases.size() == 2);
    CHECK(g.mentions().size() == 2);
    CHECK(verify(g).empty());
}

TEST_CASE("duplicate mentions collapse, parallel distinct spans stay") {
    auto chunks = std::vector<TextChunk>{make_chunk("d:000000", "aaa bbb aaa")};
    std::vector<MentionInput> mentions = {
        {"d:000000", "aaa", "other", {0, 3}},
        {"d:000000", "aaa", "other", {0, 3}},  // exact duplicate
        {"d:000000", "aaa", "other", {8, 11}}, // second occurrence
    };
    HetGraph g = build_graph(chunks, mentions, {});
    CHECK(g.mentions().size() == 2);
    const std::size_t entity_node = g.chunks().size();
    CHECK(g.degree(entity_node) == 2);         // parallel edges both count
    CHECK(g.neighbors(entity_node).size() == 1); // deduped adjacency
}

TEST_CASE("relation dedup keeps the highest confidence") {
    auto chunks = std::vector<TextChunk>{make_chunk("d:000000", "x y")};
    std::vector<MentionInput> mentions = {
        {"d:000000", "x", "other", {0, 1}},
        {"d:000000", "y", "other", {2, 3}},
    };
    const std::string xid = entity_id_for("x", "other");
    const std::string yid = entity_id_for("y", "other");
    std::vector<RelationEdge> rels = {
        {xid, "links", yid, "d:000000", 0.4},
        {xid, "links", yid, "d:000000", 0.9},
        {xid, "links", yid, "d:000000", 0.6},
    };
    HetGraph g = build_graph(chunks, mentions, rels);
    REQUIRE(g.relations().size() == 1);
    CHECK(g.relations()[0].confidence == 0.9);
}

TEST_CASE("build_graph rejects dangling and malformed parts") {
    auto chunks = std::vector<TextChunk>{make_chunk("d:000000", "short")};

    SUBCASE("mention to a missing chunk") {
        std::vector<MentionInput> mentions = {{"missing:000000", "x", "other", {0, 1}}};
        CHECK_THROWS_AS(build_graph(chunks, mentions, {}), GraphError);
    }
    SUBCASE("span outside the chunk") {
        std::vector<MentionInput> mentions = {{"d:000000", "x", "other", {3, 99}}};
        CHECK_THROWS_WITH_AS(build_graph(chunks, mentions, {}),
                             doctest::Contains("span"), GraphError);
    }
    SUBCASE("unknown type tag") {
        std::vector<MentionInput> mentions = {{"d:000000", "x", "widget", {0, 1}}};
        CHECK_THROWS_AS(build_graph(chunks, mentions, {}), GraphError);
    }
    SUBCASE("self-loop relation") {
        std::vector<MentionInput> mentions = {{"d:000000", "x", "other", {0, 1}}};
        const std::string xid = entity_id_for("x", "other");
        std::vector<RelationEdge> rels = {{xid, "loops", xid, "d:000000", 1.0}};
        CHECK_THROWS_AS(build_graph(chunks, mentions, rels), GraphError);
    }
    SUBCASE("confidence out of range") {
        std::vector<MentionInput> mentions = {
            {"d:000000", "x", "other", {0, 1}}, {"d:000000", "y", "other", {2, 3}}};
        std::vector<RelationEdge> rels = {{entity_id_for("x", "other"), "links",
                                           entity_id_for("y", "other"), "d:000000", 1.5}};
        CHECK_THROWS_AS(build_graph(chunks, mentions, rels), GraphError);
    }
    SUBCASE("relation between unknown entities floats") {
        std::vector<RelationEdge> rels = {
            {entity_id_for("ghost", "other"), "links", entity_id_for("spirit", "other"),
             "d:000000", 0.5}};
        CHECK_THROWS_AS(build_graph(chunks, {}, rels), GraphError);
    }
}

TEST_CASE("degree centrality closed forms") {
    SUBCASE("star: one entity mentioned in k chunks") {
        const std::size_t k = 4;
        std::vector<TextChunk> chunks;
        std::vector<MentionInput> mentions;
        for (std::size_t i = 0; i < k; ++i) {
            std::string id = "d:" + std::string(5, '0') + std::to_string(i);
            chunks.push_back(make_chunk(id, "hub here"));
            mentions.push_back({id, "hub", "other", {0, 3}});
        }
        HetGraph g = build_graph(chunks, mentions, {});
        auto cent = degree_centrality(g);
        const double n_minus_1 = static_cast<double>(k + 1 - 1);
        CHECK(cent.at(entity_node_id(entity_id_for("hub", "other"))) ==
              doctest::Approx(k / n_minus_1));
        for (const auto& c : g.chunks()) {
            CHECK(cent.at(chunk_node_id(c.chunk_id)) == doctest::Approx(1.0 / n_minus_1));
        }
    }
    SUBCASE("path a - chunk - b via mentions") {
        auto chunks = std::vector<TextChunk>{make_chunk("d:000000", "a b")};
        std::vector<MentionInput> mentions = {
            {"d:000000", "a", "other", {0, 1}},
            {"d:000000", "b", "other", {2, 3}},
        };
        HetGraph g = build_graph(chunks, mentions, {});
        auto cent = degree_centrality(g); // 3 nodes, chunk degree 2, entities 1
        CHECK(cent.at(chunk_node_id("d:000000")) == doctest::Approx(1.0));
        CHECK(cent.at(entity_node_id(entity_id_for("a", "other"))) == doctest::Approx(0.5));
    }
    SUBCASE("single node graph has centrality zero") {
        HetGraph g = build_graph({make_chunk("d:000000", "x")}, {}, {});
        auto cent = degree_centrality(g);
        CHECK(cent.at(chunk_node_id("d:000000")) == 0.0);
    }
}

TEST_CASE("degree sum equals twice the edge count on random graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        HetGraph g = testsupport::random_graph(rng);
        std::size_t total = 0;
        for (std::size_t n = 0; n < g.node_count(); ++n) total += g.degree(n);
        CHECK(total == 2 * (g.mentions().size() + g.relations().size()));
        CHECK(verify(g).empty());
    }
}

TEST_CASE("verify reports violations without throwing") {
    auto chunks = std::vector<TextChunk>{make_chunk("d:000000", "x y")};
    std::vector<MentionInput> mentions = {
        {"d:000000", "x", "other", {0, 1}},
        {"d:000000", "y", "other", {2, 3}},
    };
    HetGraph g = build_graph(chunks, mentions, {});
    CHECK(verify(g).empty());
}

TEST_CASE("graph equality is structural") {
    std::mt19937_64 rng(3);
    auto parts = testsupport::random_graph_parts(rng);
    HetGraph a = build_graph(parts.chunks, parts.mentions, parts.relations);
    // shuffle input order: construction is permutation-invariant
    std::reverse(parts.mentions.begin(), parts.mentions.end());
    std::reverse(parts.relations.begin(), parts.relations.end());
    HetGraph b = build_graph(parts.chunks, parts.mentions, parts.relations);
    CHECK(a == b);
}

TEST_CASE("mention_chunks_of lists each mentioning chunk once") {
    std::vector<TextChunk> chunks = {make_chunk("d:000000", "x x"),
                                     make_chunk("d:000001", "x again")};
    std::vector<MentionInput> mentions = {
        {"d:000000", "x", "other", {0, 1}},
        {"d:000000", "x", "other", {2, 3}},
        {"d:000001", "x", "other", {0, 1}},
    };
    HetGraph g = build_graph(chunks, mentions, {});
    const std::size_t entity_node = g.index_of_entity(entity_id_for("x", "other"));
    REQUIRE(entity_node != knpos);
    CHECK(g.mention_chunks_of(entity_node).size() == 2);
}
