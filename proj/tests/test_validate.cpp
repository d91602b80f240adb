#include "hetq/validate.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace hetq;

namespace {

Catalog demo_catalog() {
    TableSchema products;
    products.name = "products";
    products.columns = {
        {"product_id", ColumnType::text, false, Unit::none},
        {"product", ColumnType::text, true, Unit::none},
        {"rating", ColumnType::number, true, Unit::none},
        {"active", ColumnType::boolean, true, Unit::none},
        {"launched", ColumnType::date, true, Unit::none},
    };
    TableSchema sales;
    sales.name = "sales";
    sales.columns = {
        {"product_id", ColumnType::text, false, Unit::none},
        {"quarter", ColumnType::text, true, Unit::none},
        {"sales", ColumnType::number, true, Unit::none},
        {"change", ColumnType::number, true, Unit::percent},
    };
    Catalog c;
    c.tables[products.name] = products;
    c.tables[sales.name] = sales;
    return c;
}

ValidationResult check(const std::string& text) {
    return validate_plan(parse_plan(text), demo_catalog());
}

bool has_violation(const ValidationResult& r, const std::string& needle) {
    for (const std::string& v : r.violations) {
        if (v.find(needle) != std::string::npos) return true;
    }
    return false;
}

} // namespace

TEST_CASE("valid plans yield a proof token with the output schema") {
    auto r = check("Aggregate(group=[], aggs=[SUM(sales) AS total], "
                   "input=Filter(pred=(quarter = \"Q3\"), input=Scan(sales)))");
    REQUIRE(r.ok());
    REQUIRE(r.plan.has_value());
    const TableSchema& out = r.plan->output_schema();
    REQUIRE(out.columns.size() == 1);
    CHECK(out.columns[0].name == "total");
    CHECK(out.columns[0].type == ColumnType::number);
}

TEST_CASE("scan of a missing table") {
    auto r = check("Scan(nope)");
    REQUIRE(!r.ok());
    CHECK(!r.plan.has_value());
    CHECK(has_violation(r, "unknown table nope"));
    CHECK(r.violations.size() == 1); // poisoned branch does not cascade
}

TEST_CASE("unknown filter column names the context") {
    auto r = check("Filter(pred=(widget = 1), input=Scan(sales))");
    REQUIRE(!r.ok());
    CHECK(has_violation(r, "unknown column widget"));
    CHECK(has_violation(r, "sales"));
}

TEST_CASE("literal type mismatches are flagged") {
    SUBCASE("number against text column") {
        auto r = check("Filter(pred=(quarter = 3), input=Scan(sales))");
        CHECK(has_violation(r, "type mismatch"));
        CHECK(has_violation(r, "quarter"));
    }
    SUBCASE("string against number column") {
        auto r = check("Filter(pred=(sales = \"lots\"), input=Scan(sales))");
        CHECK(has_violation(r, "type mismatch"));
    }
    SUBCASE("bool against number column") {
        auto r = check("Filter(pred=(sales = true), input=Scan(sales))");
        CHECK(has_violation(r, "type mismatch"));
    }
    SUBCASE("null compares against anything") {
        CHECK(check("Filter(pred=(sales = null), input=Scan(sales))").ok());
        CHECK(check("Filter(pred=(quarter != null), input=Scan(sales))").ok());
    }
    SUBCASE("date columns accept text literals") {
        CHECK(check("Filter(pred=(launched = \"2024-01-01\"), input=Scan(products))").ok());
    }
}

TEST_CASE("percent literals require percent columns") {
    CHECK(check("Filter(pred=(change > 10%), input=Scan(sales))").ok());
    auto r = check("Filter(pred=(sales > 10%), input=Scan(sales))");
    REQUIRE(!r.ok());
    CHECK(has_violation(r, "percent literal"));
    // plain numbers against percent columns stay legal
    CHECK(check("Filter(pred=(change > 10), input=Scan(sales))").ok());
}

TEST_CASE("column-to-column comparisons demand comparable types") {
    CHECK(check("Filter(pred=(sales > change), input=Scan(sales))").ok());
    auto r = check("Filter(pred=(product = rating), input=Scan(products))");
    REQUIRE(!r.ok());
    CHECK(has_violation(r, "incomparable column types"));
    // text and date interoperate
    CHECK(check("Filter(pred=(product = launched), input=Scan(products))").ok());
}

TEST_CASE("projection scoping") {
    SUBCASE("projected-away columns disappear") {
        auto r = check("Filter(pred=(sales > 1), "
                       "input=Project(cols=[quarter], input=Scan(sales)))");
        REQUIRE(!r.ok());
        CHECK(has_violation(r, "unknown column sales"));
    }
    SUBCASE("duplicate projection") {
        auto r = check("Project(cols=[quarter, quarter], input=Scan(sales))");
        CHECK(has_violation(r, "duplicate column quarter"));
    }
    SUBCASE("empty projection") {
        auto r = check("Project(cols=[], input=Scan(sales))");
        CHECK(has_violation(r, "projection lists no columns"));
    }
    SUBCASE("output schema follows the projection") {
        auto r = check("Project(cols=[quarter, sales], input=Scan(sales))");
        REQUIRE(r.ok());
        REQUIRE(r.plan->output_schema().columns.size() == 2);
        CHECK(r.plan->output_schema().columns[0].name == "quarter");
    }
}

TEST_CASE("join checks keys on both sides") {
    SUBCASE("good join drops the right key and keeps the rest") {
        auto r = check("Join(left=Scan(products), right=Scan(sales), key=product_id)");
        REQUIRE(r.ok());
        const TableSchema& out = r.plan->output_schema();
        CHECK(out.columns.size() == 5 + 4 - 1);
        CHECK(out.find_column("product_id") == 0); // left copy survives
        CHECK(out.find_column("change") >= 0);
    }
    SUBCASE("missing key on one side") {
        auto r = check("Join(left=Scan(products), right=Scan(sales), key=rating)");
        REQUIRE(!r.ok());
        CHECK(has_violation(r, "unknown column rating in"));
        CHECK(has_violation(r, "join right side"));
    }
    SUBCASE("key missing on both sides reports both") {
        auto r = check("Join(left=Scan(products), right=Scan(sales), key=widget)");
        CHECK(r.violations.size() == 2);
    }
}

TEST_CASE("aggregate rules") {
    SUBCASE("sum over text column") {
        auto r = check("Aggregate(group=[], aggs=[SUM(quarter) AS s], input=Scan(sales))");
        REQUIRE(!r.ok());
        CHECK(has_violation(r, "SUM over non-numeric column quarter"));
    }
    SUBCASE("count over any column is fine") {
        CHECK(check("Aggregate(group=[], aggs=[COUNT(quarter) AS c], input=Scan(sales))").ok());
    }
    SUBCASE("group column must resolve") {
        auto r = check("Aggregate(group=[widget], aggs=[COUNT(*) AS c], input=Scan(sales))");
        CHECK(has_violation(r, "unknown column widget"));
    }
    SUBCASE("duplicate outputs collide") {
        auto r = check("Aggregate(group=[quarter], aggs=[COUNT(*) AS quarter], "
                       "input=Scan(sales))");
        CHECK(has_violation(r, "duplicate output column quarter"));
    }
    SUBCASE("empty aggregate") {
        auto r = check("Aggregate(group=[], aggs=[], input=Scan(sales))");
        CHECK(has_violation(r, "neither group columns nor aggregates"));
    }
    SUBCASE("averages of percent columns keep the unit") {
        auto r = check("Aggregate(group=[], aggs=[AVG(change) AS avg_change], "
                       "input=Scan(sales))");
        REQUIRE(r.ok());
        CHECK(r.plan->output_schema().columns[0].unit == Unit::percent);
    }
    SUBCASE("counts drop the unit") {
        auto r = check("Aggregate(group=[], aggs=[COUNT(change) AS n], input=Scan(sales))");
        REQUIRE(r.ok());
        CHECK(r.plan->output_schema().columns[0].unit == Unit::none);
    }
}

TEST_CASE("sort and limit validate their inputs") {
    CHECK(check("Limit(n=2, input=Sort(by=sales, dir=desc, input=Scan(sales)))").ok());
    auto r = check("Sort(by=widget, dir=asc, input=Scan(sales))");
    CHECK(has_violation(r, "unknown column widget"));
}

TEST_CASE("every violation in a broken plan is collected") {
    // unknown group column, SUM over text, unknown filter column: all three
    auto r = check("Aggregate(group=[widget], aggs=[SUM(product) AS s], "
                   "input=Filter(pred=(gadget = 1), input=Scan(products)))");
    REQUIRE(!r.ok());
    CHECK(r.violations.size() == 3);
    CHECK(has_violation(r, "widget"));
    CHECK(has_violation(r, "SUM over non-numeric column product"));
    CHECK(has_violation(r, "gadget"));
}

TEST_CASE("empty plan is rejected") {
    auto r = validate_plan(nullptr, demo_catalog());
    REQUIRE(!r.ok());
    CHECK(has_violation(r, "plan is empty"));
}

TEST_CASE("column resolution is case-insensitive") {
    CHECK(check("Filter(pred=(QUARTER = \"Q1\"), input=Scan(sales))").ok());
}
