#pragma once

#include "hetq/validate.hpp"

#include <map>
#include <string>
#include <vector>

namespace hetq {

struct ProvenanceRef {
    std::string table;
    std::size_t row = 0;

    auto operator<=>(const ProvenanceRef&) const = default;
};

// A table plus, for every output row, the multiset of input rows that
// produced it.
struct ResultTable {
    TableSchema schema;
    std::vector<std::vector<Value>> rows;
    std::vector<std::vector<ProvenanceRef>> provenance; // parallel to rows, each sorted
};

using TableSet = std::map<std::string, Table>;

// Total order over cells used for canonical sorting and group keys:
// null first, then numbers, booleans, text.
bool value_less(const Value& a, const Value& b);
bool value_equal(const Value& a, const Value& b);

// Bottom-up deterministic evaluation. Name/type soundness is
// guaranteed by the ValidatedPlan token; a table set diverging from
// the validated catalog throws Error.
ResultTable execute(const ValidatedPlan& plan, const TableSet& tables);

// The deliberately naive evaluator (nested loops, no indexes, own
// helpers) kept in a separate translation unit as the equivalence
// oracle for execute.
ResultTable oracle_execute(const PlanPtr& plan, const TableSet& tables);

// Multiset equality of (row, provenance) pairs plus column name/type
// agreement; row order is ignored.
bool results_equivalent(const ResultTable& a, const ResultTable& b);

} // namespace hetq
