#include "hetq/extraction.hpp"

#include "hetq/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

using json = nlohmann::json;

namespace hetq {

namespace {

std::string quoted_name(const std::string& name) {
    bool bare = !name.empty() &&
                (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
    for (unsigned char c : name) {
        bare = bare && (std::isalnum(c) || c == '_');
    }
    return bare ? name : "`" + name + "`";
}

Value cell_from_json(const json& j) {
    if (j.is_null()) return Value{};
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    return Value{}; // arrays/objects have no cell form; conformance will reject
}

} // namespace

TableSchema default_extraction_schema() {
    TableSchema schema;
    schema.name = "extracted";
    schema.columns = {
        {"Quarter", ColumnType::text, true, Unit::none},
        {"Sales Metrics", ColumnType::text, true, Unit::none},
        {"Change Percentage", ColumnType::number, true, Unit::percent},
    };
    return schema;
}

std::string render_schema_for_prompt(const TableSchema& schema) {
    std::string out;
    for (const Column& col : schema.columns) {
        if (!out.empty()) {
            out += ", ";
        }
        out += quoted_name(col.name);
        out += ':';
        out += column_type_name(col.type);
        if (col.unit == Unit::percent) {
            out += ":percent";
        }
    }
    return out;
}

std::string render_catalog_for_prompt(const Catalog& catalog) {
    std::string out;
    for (const auto& [name, schema] : catalog.tables) {
        out += name;
        out += '(';
        out += render_schema_for_prompt(schema);
        out += ")\n";
    }
    return out;
}

GeneratedTable generate_table(const std::vector<TextChunk>& chunks, const SchemaHint& hint,
                              ModelGateway& gateway) {
    if (chunks.empty()) {
        throw Error("generate_table requires at least one chunk");
    }
    GeneratedTable out;
    out.table.schema = hint.schema ? *hint.schema : default_extraction_schema();
    {
        auto schema_problems = out.table.schema.check();
        if (!schema_problems.empty()) {
            throw Error("schema hint is invalid: " + schema_problems.front());
        }
    }

    std::string joined;
    for (const TextChunk& c : chunks) {
        if (!joined.empty()) {
            joined += '\n';
        }
        joined += c.text;
    }

    PromptRequest req;
    req.template_id = TemplateId::table_extract;
    req.variables["schema"] = render_schema_for_prompt(out.table.schema);
    req.variables["chunks"] = joined;
    const Completion completion = gateway.complete(req);

    std::istringstream lines{completion.text};
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line, nullptr, false);
        if (!rec.is_object()) {
            ++out.dropped_rows;
            continue;
        }
        std::vector<Value> row(out.table.schema.columns.size());
        bool conforming = true;
        bool any_value = false;
        for (std::size_t c = 0; c < out.table.schema.columns.size(); ++c) {
            const Column& col = out.table.schema.columns[c];
            const json* cell = nullptr;
            for (auto it = rec.begin(); it != rec.end(); ++it) {
                if (out.table.schema.find_column(it.key()) == static_cast<int>(c)) {
                    cell = &it.value();
                    break;
                }
            }
            if (cell == nullptr) continue;
            if (cell->is_array() || cell->is_object()) {
                conforming = false;
                break;
            }
            row[c] = cell_from_json(*cell);
            if (!value_conforms(row[c], col.type)) {
                conforming = false;
                break;
            }
            any_value = any_value || !is_null(row[c]);
        }
        if (!conforming || !any_value) {
            ++out.dropped_rows;
            continue;
        }
        out.table.rows.push_back(std::move(row));
    }

    if (out.table.rows.empty()) {
        out.warnings.push_back("no rows conformed to schema " + out.table.schema.name +
                               " (dropped " + std::to_string(out.dropped_rows) + ")");
    }
    return out;
}

SynthesizedPlan synthesize_plan(const std::string& question, const Catalog& catalog,
                                ModelGateway& gateway, const std::string& reference_quarter) {
    if (catalog.tables.empty()) {
        throw Error("plan synthesis requires a nonempty catalog");
    }

    PromptRequest req;
    req.template_id = TemplateId::plan_synthesis;
    req.variables["catalog"] = render_catalog_for_prompt(catalog);
    req.variables["question"] = question;
    req.variables["reference_quarter"] = reference_quarter;
    req.variables["error"] = "";

    const Completion first = gateway.complete(req);
    std::string first_error;
    try {
        SynthesizedPlan out;
        out.plan = parse_plan(first.text);
        out.plan_text = serialize_plan(out.plan);
        return out;
    } catch (const ParseError& e) {
        first_error = e.what();
    }

    req.variables["error"] =
        "The previous reply was not a valid plan (" + first_error + "). Reply again with only "
        "a plan in the documented grammar.";
    const Completion second = gateway.complete(req);
    try {
        SynthesizedPlan out;
        out.plan = parse_plan(second.text);
        out.plan_text = serialize_plan(out.plan);
        out.retried = true;
        return out;
    } catch (const ParseError& e) {
        throw SynthesisError("plan synthesis failed twice for question: " + question +
                                 " (last error: " + e.what() + ")",
                             first.text, second.text);
    }
}

} // namespace hetq
