#include "hetq/ingest.hpp"

#include "hetq/error.hpp"
#include "hetq/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace hetq {

std::string_view doc_format_name(DocFormat f) {
    switch (f) {
    case DocFormat::text: return "text";
    case DocFormat::csv: return "csv";
    case DocFormat::json: return "json";
    }
    return "text";
}

std::string doc_id_for_path(std::string_view corpus_relative_path) {
    return hex16(fnv1a64(corpus_relative_path));
}

namespace {

std::optional<DocFormat> classify_extension(const fs::path& p) {
    std::string ext = casefold(p.extension().string());
    if (ext == ".txt") return DocFormat::text;
    if (ext == ".csv") return DocFormat::csv;
    if (ext == ".json") return DocFormat::json;
    return std::nullopt;
}

} // namespace

CorpusManifest load_corpus(const fs::path& root) {
    std::error_code ec;
    if (!fs::exists(root, ec) || ec) {
        throw IoError("corpus root does not exist: " + root.string());
    }
    if (!fs::is_directory(root, ec) || ec) {
        throw IoError("corpus root is not a directory: " + root.string());
    }

    CorpusManifest manifest;
    manifest.root = root.generic_string();

    std::vector<std::pair<std::string, fs::path>> files; // (relative, absolute)
    for (auto it = fs::recursive_directory_iterator(root, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            throw IoError("corpus root is not readable: " + root.string() + ": " + ec.message());
        }
        if (!it->is_regular_file(ec) || ec) {
            ec.clear();
            continue;
        }
        std::string rel = fs::relative(it->path(), root).generic_string();
        files.emplace_back(std::move(rel), it->path());
    }
    if (ec) {
        throw IoError("corpus root is not readable: " + root.string() + ": " + ec.message());
    }
    std::sort(files.begin(), files.end());

    for (auto& [rel, abs] : files) {
        auto format = classify_extension(abs);
        if (!format) {
            manifest.skipped.push_back(rel);
            continue;
        }
        std::ifstream in(abs, std::ios::binary);
        if (!in) {
            manifest.errors.push_back({rel, "file is not readable"});
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        if (in.bad()) {
            manifest.errors.push_back({rel, "read failed"});
            continue;
        }

        SourceDocument doc;
        doc.doc_id = doc_id_for_path(rel);
        doc.path = rel;
        doc.format = *format;
        doc.content = buf.str();
        doc.metadata["filename"] = abs.filename().generic_string();
        manifest.documents.push_back(std::move(doc));
        switch (*format) {
        case DocFormat::text: ++manifest.text_count; break;
        case DocFormat::csv: ++manifest.csv_count; break;
        case DocFormat::json: ++manifest.json_count; break;
        }
    }
    return manifest;
}

std::string manifest_to_jsonl(const CorpusManifest& manifest) {
    std::ostringstream out;
    for (const SourceDocument& doc : manifest.documents) {
        json rec{{"doc_id", doc.doc_id},
                 {"path", doc.path},
                 {"format", std::string(doc_format_name(doc.format))},
                 {"chars", doc.content.size()}};
        out << rec.dump() << '\n';
    }
    for (const std::string& path : manifest.skipped) {
        out << json{{"skipped", path}}.dump() << '\n';
    }
    for (const ManifestError& err : manifest.errors) {
        out << json{{"error", err.message}, {"path", err.path}}.dump() << '\n';
    }
    return out.str();
}

std::vector<TextChunk> chunk_document(const SourceDocument& doc, const ChunkingPolicy& policy) {
    if (policy.max_chars == 0 || policy.overlap_chars >= policy.max_chars) {
        throw Error("chunking policy requires 0 <= overlap_chars < max_chars");
    }
    std::vector<TextChunk> chunks;
    const std::size_t len = doc.content.size();
    if (len == 0) {
        return chunks;
    }
    const std::size_t stride = policy.max_chars - policy.overlap_chars;
    for (std::size_t i = 0;; ++i) {
        const std::size_t begin = i * stride;
        const std::size_t end = std::min(begin + policy.max_chars, len);
        TextChunk chunk;
        chunk.doc_id = doc.doc_id;
        chunk.ordinal = i;
        chunk.begin = begin;
        chunk.end = end;
        chunk.text = doc.content.substr(begin, end - begin);
        char ordinal_buf[8];
        std::snprintf(ordinal_buf, sizeof(ordinal_buf), "%06zu", i);
        chunk.chunk_id = doc.doc_id + ":" + ordinal_buf;
        chunks.push_back(std::move(chunk));
        if (end >= len) {
            break;
        }
    }
    return chunks;
}

namespace {

struct CsvCell {
    std::string text;
    std::size_t line = 0;
};

// RFC-4180-ish: quoted fields with "" escapes, CRLF or LF rows.
std::vector<std::vector<CsvCell>> parse_csv_rows(const std::string& content) {
    std::vector<std::vector<CsvCell>> rows;
    std::vector<CsvCell> row;
    std::string field;
    std::size_t line = 1;
    std::size_t field_line = 1;
    bool in_quotes = false;
    bool field_started = false;

    auto push_field = [&] {
        row.push_back({field, field_line});
        field.clear();
        field_started = false;
        field_line = line;
    };
    auto push_row = [&] {
        push_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field.empty() && !field_started) {
                in_quotes = true;
                field_started = true;
            } else {
                throw ParseError("malformed CSV: stray quote at line " + std::to_string(line), i);
            }
            break;
        case ',':
            push_field();
            break;
        case '\r':
            if (i + 1 < content.size() && content[i + 1] == '\n') {
                break; // consumed by the '\n' branch
            }
            push_row();
            ++line;
            break;
        case '\n':
            push_row();
            ++line;
            break;
        default:
            field_started = true;
            field.push_back(c);
            break;
        }
    }
    if (in_quotes) {
        throw ParseError("malformed CSV: unterminated quoted field starting at line " +
                             std::to_string(field_line),
                         content.size());
    }
    if (!field.empty() || field_started || !row.empty()) {
        push_row();
    }
    // a trailing newline leaves a phantom empty row; drop fully empty rows
    std::vector<std::vector<CsvCell>> cleaned;
    for (auto& r : rows) {
        bool empty = r.size() == 1 && r[0].text.empty();
        if (!empty) {
            cleaned.push_back(std::move(r));
        }
    }
    return cleaned;
}

Table table_from_csv(const SourceDocument& doc) {
    auto rows = parse_csv_rows(doc.content);
    if (rows.empty()) {
        throw ParseError("malformed CSV in " + doc.path + ": missing header row", 0);
    }
    const std::vector<CsvCell>& header = rows.front();
    const std::size_t ncols = header.size();

    std::vector<std::size_t> ragged;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != ncols) {
            ragged.push_back(r + 1); // 1-based data row number incl. header
        }
    }
    if (!ragged.empty()) {
        std::ostringstream msg;
        msg << "ragged CSV rows in " << doc.path << " (expected " << ncols << " fields): rows";
        for (std::size_t r : ragged) msg << ' ' << r;
        throw ParseError(msg.str());
    }

    // infer every cell, then settle column types
    std::vector<std::vector<InferredCell>> cells(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        for (const CsvCell& cell : rows[r]) {
            cells[r - 1].push_back(infer_cell(cell.text));
        }
    }

    Table table;
    table.schema.name = table_name_for_path(doc.path);
    for (std::size_t c = 0; c < ncols; ++c) {
        Column col;
        col.name = collapse_whitespace(header[c].text);
        if (col.name.empty()) {
            col.name = "column_" + std::to_string(c + 1);
        }
        bool any = false;
        bool all_number = true;
        bool all_boolean = true;
        bool all_percent = true;
        bool any_percent = false;
        for (const auto& row : cells) {
            const InferredCell& cell = row[c];
            if (is_null(cell.value)) continue;
            any = true;
            all_number = all_number && cell.type == ColumnType::number;
            all_boolean = all_boolean && cell.type == ColumnType::boolean;
            all_percent = all_percent && cell.percent;
            any_percent = any_percent || cell.percent;
        }
        if (any && all_number) {
            col.type = ColumnType::number;
            if (any_percent && all_percent) {
                col.unit = Unit::percent;
            }
        } else if (any && all_boolean) {
            col.type = ColumnType::boolean;
        } else {
            col.type = ColumnType::text;
        }
        table.schema.columns.push_back(std::move(col));
    }

    for (std::size_t r = 0; r < cells.size(); ++r) {
        std::vector<Value> out;
        for (std::size_t c = 0; c < ncols; ++c) {
            const InferredCell& cell = cells[r][c];
            if (is_null(cell.value)) {
                out.emplace_back(std::monostate{});
            } else if (table.schema.columns[c].type == ColumnType::number ||
                       table.schema.columns[c].type == ColumnType::boolean) {
                out.push_back(cell.value);
            } else {
                // mixed column degrades to text; keep the raw cell
                out.emplace_back(collapse_whitespace(rows[r + 1][c].text));
            }
        }
        table.rows.push_back(std::move(out));
    }
    return table;
}

Value value_from_json_scalar(const ordered_json& v) {
    if (v.is_null()) return std::monostate{};
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    return v.dump(); // arrays / deep objects stored as serialized text
}

// one level of dotted flattening; deeper structures keep their JSON text
void flatten_object(const ordered_json& obj, std::map<std::string, Value>& out,
                    std::vector<std::string>& key_order) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (it.value().is_object()) {
            for (auto inner = it.value().begin(); inner != it.value().end(); ++inner) {
                std::string key = it.key() + "." + inner.key();
                if (!out.count(key)) key_order.push_back(key);
                out[key] = inner.value().is_object() ? Value(inner.value().dump())
                                                     : value_from_json_scalar(inner.value());
            }
        } else {
            if (!out.count(it.key())) key_order.push_back(it.key());
            out[it.key()] = value_from_json_scalar(it.value());
        }
    }
}

Table table_from_json(const SourceDocument& doc) {
    ordered_json parsed;
    try {
        parsed = ordered_json::parse(doc.content);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON in " + doc.path + ": " + e.what(), e.byte);
    }

    std::vector<ordered_json> objects;
    if (parsed.is_object()) {
        objects.push_back(parsed);
    } else if (parsed.is_array()) {
        for (const auto& elem : parsed) {
            if (!elem.is_object()) {
                throw ParseError("JSON in " + doc.path +
                                 " must be an object or an array of objects");
            }
            objects.push_back(elem);
        }
    } else {
        throw ParseError("JSON in " + doc.path + " has a scalar top level");
    }

    // union-of-keys columns in first-seen order
    std::vector<std::string> key_order;
    std::vector<std::map<std::string, Value>> flat(objects.size());
    for (std::size_t i = 0; i < objects.size(); ++i) {
        std::map<std::string, Value> row;
        std::vector<std::string> order_probe = key_order;
        flatten_object(objects[i], row, order_probe);
        for (const std::string& k : order_probe) {
            if (std::find(key_order.begin(), key_order.end(), k) == key_order.end()) {
                key_order.push_back(k);
            }
        }
        flat[i] = std::move(row);
    }

    Table table;
    table.schema.name = table_name_for_path(doc.path);
    for (const std::string& key : key_order) {
        Column col;
        col.name = key;
        bool any = false;
        bool all_number = true;
        bool all_boolean = true;
        bool all_text = true;
        for (const auto& row : flat) {
            auto it = row.find(key);
            if (it == row.end() || is_null(it->second)) continue;
            any = true;
            all_number = all_number && std::holds_alternative<double>(it->second);
            all_boolean = all_boolean && std::holds_alternative<bool>(it->second);
            all_text = all_text && std::holds_alternative<std::string>(it->second);
        }
        if (any && all_number) col.type = ColumnType::number;
        else if (any && all_boolean) col.type = ColumnType::boolean;
        else col.type = ColumnType::text;
        (void)all_text;
        table.schema.columns.push_back(std::move(col));
    }

    for (auto& row : flat) {
        std::vector<Value> out;
        for (std::size_t c = 0; c < key_order.size(); ++c) {
            auto it = row.find(key_order[c]);
            if (it == row.end() || is_null(it->second)) {
                out.emplace_back(std::monostate{});
                continue;
            }
            if (table.schema.columns[c].type == ColumnType::text &&
                !std::holds_alternative<std::string>(it->second)) {
                out.emplace_back(value_to_text(it->second)); // mixed column degrades to text
            } else {
                out.push_back(std::move(it->second));
            }
        }
        table.rows.push_back(std::move(out));
    }
    return table;
}

} // namespace

Table parse_structured(const SourceDocument& doc) {
    switch (doc.format) {
    case DocFormat::csv: return table_from_csv(doc);
    case DocFormat::json: return table_from_json(doc);
    case DocFormat::text: break;
    }
    throw Error("parse_structured requires a csv or json document, got text: " + doc.path);
}

std::string table_name_for_path(std::string_view corpus_relative_path) {
    fs::path p{std::string(corpus_relative_path)};
    std::string stem = casefold(p.stem().string());
    std::string out;
    for (unsigned char c : stem) {
        out.push_back(std::isalnum(c) ? static_cast<char>(c) : '_');
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
        out = "t_" + out;
    }
    return out;
}

} // namespace hetq
