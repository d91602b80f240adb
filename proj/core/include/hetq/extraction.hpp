#pragma once

#include "hetq/gateway.hpp"
#include "hetq/ingest.hpp"
#include "hetq/plan.hpp"
#include "hetq/table.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hetq {

struct SchemaHint {
    std::optional<TableSchema> schema; // absent: the default quarterly schema
    std::vector<std::string> column_notes;
};

// Quarter:text, Sales Metrics:text, Change Percentage:number(percent)
TableSchema default_extraction_schema();

struct GeneratedTable {
    Table table;
    std::size_t dropped_rows = 0; // backend rows failing re-validation
    std::vector<std::string> warnings;
};

// Prompts the backend (template table_extract) for rows in the hinted
// or default schema and re-validates every cell; nonconforming or
// all-null rows are dropped and counted. Zero valid rows is a warning,
// not an error: the table comes back empty with its schema intact.
GeneratedTable generate_table(const std::vector<TextChunk>& chunks, const SchemaHint& hint,
                              ModelGateway& gateway);

// One line per table, "name(col:type[:percent], ...)", names
// backtick-quoted when not bare identifiers. Shared by prompts and
// the plan synthesis rulebook.
std::string render_catalog_for_prompt(const Catalog& catalog);
std::string render_schema_for_prompt(const TableSchema& schema);

struct SynthesizedPlan {
    PlanPtr plan;
    std::string plan_text; // canonical serialization
    bool retried = false;  // first output failed to parse
};

// Asks the backend (template plan_synthesis) for a plan in the
// canonical grammar. A parse failure is retried once with the parse
// error appended to the prompt; a second failure throws
// SynthesisError carrying both raw outputs.
SynthesizedPlan synthesize_plan(const std::string& question, const Catalog& catalog,
                                ModelGateway& gateway,
                                const std::string& reference_quarter = "Q4");

} // namespace hetq
