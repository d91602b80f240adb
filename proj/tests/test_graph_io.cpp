#include "hetq/error.hpp"
#include "hetq/graph_io.hpp"

#include "support/random_graphs.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hetq;
namespace fs = std::filesystem;

namespace {

fs::path fresh_path(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("hetq_graph_io_" + name);
    fs::remove(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("random graphs survive save/load round-trips") {
    std::mt19937_64 rng(202);
    const fs::path path = fresh_path("roundtrip.ldj");
    for (int trial = 0; trial < 100; ++trial) {
        HetGraph g = testsupport::random_graph(rng);
        save_graph(g, path);
        HetGraph back = load_graph(path);
        REQUIRE(back == g);
        CHECK(verify(back).empty());
    }
    fs::remove(path);
}

TEST_CASE("empty graph round-trips") {
    const fs::path path = fresh_path("empty.ldj");
    save_graph(HetGraph{}, path);
    HetGraph back = load_graph(path);
    CHECK(back.node_count() == 0);
    CHECK(back == HetGraph{});
    fs::remove(path);
}

TEST_CASE("saved file is line-delimited json with a counting header") {
    std::mt19937_64 rng(7);
    HetGraph g = testsupport::random_graph(rng);
    const fs::path path = fresh_path("shape.ldj");
    save_graph(g, path);
    auto lines = lines_of(slurp(path));
    REQUIRE(lines.size() ==
            1 + g.chunks().size() + g.entities().size() + g.mentions().size() +
                g.relations().size());
    CHECK(lines[0].find("\"format\":\"hetgraph\"") != std::string::npos);
    CHECK(lines[0].find("\"version\":1") != std::string::npos);
    fs::remove(path);
}

TEST_CASE("save is byte-deterministic") {
    std::mt19937_64 rng(9);
    HetGraph g = testsupport::random_graph(rng);
    const fs::path a = fresh_path("det_a.ldj");
    const fs::path b = fresh_path("det_b.ldj");
    save_graph(g, a);
    save_graph(g, b);
    CHECK(slurp(a) == slurp(b));
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("load rejects broken files") {
    std::mt19937_64 rng(31);
    HetGraph g;
    do {
        g = testsupport::random_graph(rng);
    } while (g.mentions().empty());
    const fs::path path = fresh_path("broken.ldj");
    save_graph(g, path);
    const std::string full = slurp(path);
    auto lines = lines_of(full);
    REQUIRE(lines.size() >= 3);

    auto rewrite = [&](const std::string& content) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
    };

    SUBCASE("missing file") {
        fs::remove(path);
        CHECK_THROWS_AS(load_graph(path), IoError);
    }
    SUBCASE("empty file") {
        rewrite("");
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("missing header"), GraphError);
    }
    SUBCASE("truncated after the header") {
        std::string content;
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) content += lines[i] + "\n";
        rewrite(content);
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("truncated"), GraphError);
    }
    SUBCASE("not a graph file") {
        rewrite("{\"format\":\"csv\"}\n");
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("not a hetgraph"), GraphError);
    }
    SUBCASE("wrong version") {
        std::string header = lines[0];
        auto pos = header.find("\"version\":1");
        REQUIRE(pos != std::string::npos);
        header.replace(pos, 11, "\"version\":9");
        std::string content = header + "\n";
        for (std::size_t i = 1; i < lines.size(); ++i) content += lines[i] + "\n";
        rewrite(content);
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("version mismatch"), GraphError);
    }
    SUBCASE("unknown record kind") {
        // swap one record for an unknown kind; counts no longer matter
        // because the bad kind trips first
        std::string content = lines[0] + "\n{\"kind\":\"widget\"}\n";
        for (std::size_t i = 2; i < lines.size(); ++i) content += lines[i] + "\n";
        rewrite(content);
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("unknown record kind"),
                             GraphError);
    }
    SUBCASE("malformed json line reports its line number") {
        std::string content = lines[0] + "\n{nope\n";
        for (std::size_t i = 2; i < lines.size(); ++i) content += lines[i] + "\n";
        rewrite(content);
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("line 2"), ParseError);
    }
    SUBCASE("missing field reports the field") {
        std::string content = lines[0] + "\n{\"kind\":\"chunk\"}\n";
        for (std::size_t i = 2; i < lines.size(); ++i) content += lines[i] + "\n";
        rewrite(content);
        CHECK_THROWS_AS(load_graph(path), ParseError);
    }
    fs::remove(path);
}

TEST_CASE("load re-verifies integrity") {
    // hand-build a file whose counts agree but whose mention dangles
    const fs::path path = fresh_path("dangling.ldj");
    std::ofstream out(path, std::ios::binary);
    out << R"({"format":"hetgraph","version":1,"counts":{"chunks":1,"entities":1,"mentions":1,"relations":0}})"
        << "\n";
    out << R"({"kind":"chunk","chunk_id":"d:000000","doc_id":"d","ordinal":0,"begin":0,"end":3,"text":"abc"})"
        << "\n";
    const std::string id = entity_id_for("abc", "other");
    out << R"({"kind":"entity","entity_id":")" << id
        << R"(","canonical_name":"abc","type_tag":"other","aliases":["abc"]})" << "\n";
    out << R"({"kind":"mention","chunk_id":"ghost:000000","entity_id":")" << id
        << R"(","span":[0,3]})" << "\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("missing chunk"), GraphError);
    fs::remove(path);
}
