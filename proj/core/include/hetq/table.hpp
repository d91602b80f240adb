#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hetq {

// A cell: null, number, boolean, or text. Dates are stored as text
// under a date-typed column; nothing in the engine parses calendars.
using Value = std::variant<std::monostate, double, bool, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

enum class ColumnType { text, number, boolean, date };

std::string_view column_type_name(ColumnType t);
std::optional<ColumnType> column_type_from_name(std::string_view name);

enum class Unit { none, percent };

struct Column {
    std::string name;
    ColumnType type = ColumnType::text;
    bool nullable = true;
    Unit unit = Unit::none;
};

struct TableSchema {
    std::string name;
    std::vector<Column> columns;

    // Case-insensitive lookup; -1 when absent.
    int find_column(std::string_view column_name) const;

    // Nonempty name, case-insensitively unique column names.
    // Returns human-readable violations; empty means valid.
    std::vector<std::string> check() const;
};

struct Table {
    TableSchema schema;
    std::vector<std::vector<Value>> rows;

    // Row arity and per-cell type conformance.
    std::vector<std::string> check() const;
};

// Schemas visible to plan synthesis and validation.
struct Catalog {
    std::map<std::string, TableSchema> tables;

    bool contains(const std::string& name) const { return tables.count(name) != 0; }
    const TableSchema* find(const std::string& name) const;
};

Catalog catalog_of(const std::vector<Table>& tables);

// Does `v` conform to a column of type `t` (or is it null)?
bool value_conforms(const Value& v, ColumnType t);

// Cell typing for raw text, applied in order: null literal, number
// (optional sign, optional trailing '%'), boolean, text.
struct InferredCell {
    Value value;
    ColumnType type = ColumnType::text;
    bool percent = false;
};

InferredCell infer_cell(std::string_view raw);

// Deterministic rendering used by CSV output, plan literals and the
// aligned printer: integral doubles print without a fraction, others
// with the shortest round-trip form.
std::string format_number(double v);
std::string value_to_text(const Value& v);

std::string to_aligned_text(const Table& table);
std::string to_csv(const Table& table);

} // namespace hetq
