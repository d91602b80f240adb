#pragma once

#include "hetq/table.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hetq {

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view compare_op_text(CompareOp op);

struct PlanLiteral {
    Value value;          // null, number, boolean or string
    bool percent = false; // written with a trailing % sign

    bool operator==(const PlanLiteral&) const = default;
};

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

struct Comparison {
    std::string column;
    CompareOp op = CompareOp::eq;
    bool rhs_is_column = false;
    std::string rhs_column; // when rhs_is_column
    PlanLiteral literal;    // otherwise

    bool operator==(const Comparison&) const = default;
};

// Immutable boolean tree over comparisons.
struct Predicate {
    enum class Kind { comparison, logical_and, logical_or, logical_not };

    Kind kind = Kind::comparison;
    Comparison comparison;  // Kind::comparison
    PredicatePtr lhs, rhs;  // and/or both, not uses lhs only
};

bool equal(const PredicatePtr& a, const PredicatePtr& b);

PredicatePtr make_comparison(Comparison c);
PredicatePtr make_and(PredicatePtr lhs, PredicatePtr rhs);
PredicatePtr make_or(PredicatePtr lhs, PredicatePtr rhs);
PredicatePtr make_not(PredicatePtr inner);

enum class AggFn { sum, avg, count, min, max };

std::string_view agg_fn_name(AggFn fn);

struct AggSpec {
    AggFn fn = AggFn::count;
    bool star = false;   // COUNT(*)
    std::string column;  // unless star
    std::string output;  // result column name

    bool operator==(const AggSpec&) const = default;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

// One relational operator. Scan sits at leaves; Join is binary (input
// is the left side); everything else is unary over `input`.
struct PlanNode {
    enum class Kind { scan, filter, project, join, aggregate, sort, limit };

    Kind kind = Kind::scan;
    std::string table;                // scan
    PredicatePtr predicate;           // filter
    std::vector<std::string> columns; // project columns / aggregate group
    PlanPtr input;                    // unary input, join left
    PlanPtr right;                    // join right
    std::string key;                  // join key column
    std::vector<AggSpec> aggs;        // aggregate
    std::string sort_by;              // sort
    bool descending = false;          // sort direction
    std::size_t limit = 0;            // limit
};

bool equal(const PlanPtr& a, const PlanPtr& b);

PlanPtr make_scan(std::string table);
PlanPtr make_filter(PredicatePtr predicate, PlanPtr input);
PlanPtr make_project(std::vector<std::string> columns, PlanPtr input);
PlanPtr make_join(PlanPtr left, PlanPtr right, std::string key);
PlanPtr make_aggregate(std::vector<std::string> group, std::vector<AggSpec> aggs, PlanPtr input);
PlanPtr make_sort(std::string by, bool descending, PlanPtr input);
PlanPtr make_limit(std::size_t n, PlanPtr input);

// Canonical textual form, the model-exchange format, e.g.
//   Aggregate(group=[], aggs=[SUM(sales) AS total],
//             input=Filter(pred=(quarter = "Q3"), input=Scan(sales)))
// Identifiers needing spaces or punctuation are backtick-quoted.
std::string serialize_plan(const PlanPtr& plan);
std::string serialize_predicate(const PredicatePtr& predicate);

// Recursive-descent parse of the canonical form; case-insensitive
// keywords, canonical output guaranteed to round-trip. Throws
// ParseError carrying the byte offset of the failure.
PlanPtr parse_plan(std::string_view text);

} // namespace hetq
