#include "hetq/table.hpp"

#include "hetq/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace hetq {

std::string_view column_type_name(ColumnType t) {
    switch (t) {
    case ColumnType::text: return "text";
    case ColumnType::number: return "number";
    case ColumnType::boolean: return "boolean";
    case ColumnType::date: return "date";
    }
    return "text";
}

std::optional<ColumnType> column_type_from_name(std::string_view name) {
    if (name == "text") return ColumnType::text;
    if (name == "number") return ColumnType::number;
    if (name == "boolean") return ColumnType::boolean;
    if (name == "date") return ColumnType::date;
    return std::nullopt;
}

int TableSchema::find_column(std::string_view column_name) const {
    const std::string folded = casefold(column_name);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (casefold(columns[i].name) == folded) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::vector<std::string> TableSchema::check() const {
    std::vector<std::string> violations;
    if (name.empty()) {
        violations.push_back("table name is empty");
    }
    std::set<std::string> seen;
    for (const Column& c : columns) {
        if (c.name.empty()) {
            violations.push_back("column with empty name in table " + name);
            continue;
        }
        if (!seen.insert(casefold(c.name)).second) {
            violations.push_back("duplicate column name " + c.name + " in table " + name);
        }
    }
    return violations;
}

std::vector<std::string> Table::check() const {
    std::vector<std::string> violations = schema.check();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != schema.columns.size()) {
            violations.push_back("row " + std::to_string(r) + " arity " +
                                 std::to_string(rows[r].size()) + " != column count " +
                                 std::to_string(schema.columns.size()));
            continue;
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (!value_conforms(rows[r][c], schema.columns[c].type)) {
                violations.push_back("row " + std::to_string(r) + " column " +
                                     schema.columns[c].name + " does not conform to type " +
                                     std::string(column_type_name(schema.columns[c].type)));
            }
        }
    }
    return violations;
}

const TableSchema* Catalog::find(const std::string& name) const {
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
}

Catalog catalog_of(const std::vector<Table>& tables) {
    Catalog cat;
    for (const Table& t : tables) {
        cat.tables[t.schema.name] = t.schema;
    }
    return cat;
}

bool value_conforms(const Value& v, ColumnType t) {
    if (is_null(v)) {
        return true;
    }
    switch (t) {
    case ColumnType::number: return std::holds_alternative<double>(v);
    case ColumnType::boolean: return std::holds_alternative<bool>(v);
    case ColumnType::text:
    case ColumnType::date: return std::holds_alternative<std::string>(v);
    }
    return false;
}

InferredCell infer_cell(std::string_view raw) {
    InferredCell cell;
    const std::string folded = casefold(collapse_whitespace(raw));
    if (folded.empty() || folded == "null") {
        cell.value = std::monostate{};
        cell.type = ColumnType::text;
        return cell;
    }

    // number with exact decimal parsing, optional trailing '%'
    std::string_view num = folded;
    bool percent = false;
    if (num.ends_with('%')) {
        percent = true;
        num.remove_suffix(1);
    }
    if (!num.empty()) {
        const char* first = num.data();
        const char* last = num.data() + num.size();
        if (*first == '+') ++first; // from_chars rejects leading '+'
        double parsed = 0;
        auto [ptr, ec] = std::from_chars(first, last, parsed);
        // nan/inf spellings stay text: non-finite cells would break
        // grouping and comparison semantics downstream
        if (ec == std::errc() && ptr == last && first != last && std::isfinite(parsed)) {
            cell.value = parsed;
            cell.type = ColumnType::number;
            cell.percent = percent;
            return cell;
        }
    }

    if (folded == "true" || folded == "false") {
        cell.value = (folded == "true");
        cell.type = ColumnType::boolean;
        return cell;
    }

    cell.value = std::string(collapse_whitespace(raw));
    cell.type = ColumnType::text;
    return cell;
}

std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buf, ptr);
}

std::string value_to_text(const Value& v) {
    if (is_null(v)) {
        return "null";
    }
    if (const double* d = std::get_if<double>(&v)) {
        return format_number(*d);
    }
    if (const bool* b = std::get_if<bool>(&v)) {
        return *b ? "true" : "false";
    }
    return std::get<std::string>(v);
}

std::string to_aligned_text(const Table& table) {
    const std::size_t ncols = table.schema.columns.size();
    std::vector<std::size_t> widths(ncols);
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < ncols; ++c) {
        widths[c] = table.schema.columns[c].name.size();
    }
    for (const auto& row : table.rows) {
        std::vector<std::string> line;
        for (std::size_t c = 0; c < ncols && c < row.size(); ++c) {
            std::string s = value_to_text(row[c]);
            widths[c] = std::max(widths[c], s.size());
            line.push_back(std::move(s));
        }
        cells.push_back(std::move(line));
    }
    std::ostringstream out;
    auto emit_row = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c) out << "  ";
            out << line[c];
            for (std::size_t pad = line[c].size(); pad < widths[c]; ++pad) out << ' ';
        }
        out << '\n';
    };
    std::vector<std::string> header;
    std::vector<std::string> rule;
    for (std::size_t c = 0; c < ncols; ++c) {
        header.push_back(table.schema.columns[c].name);
        rule.push_back(std::string(widths[c], '-'));
    }
    emit_row(header);
    emit_row(rule);
    for (const auto& line : cells) {
        emit_row(line);
    }
    out << "(" << table.rows.size() << (table.rows.size() == 1 ? " row)" : " rows)") << '\n';
    return out.str();
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.schema.columns.size(); ++c) {
        if (c) out << ',';
        out << csv_escape(table.schema.columns[c].name);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            if (!is_null(row[c])) {
                out << csv_escape(value_to_text(row[c]));
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace hetq
