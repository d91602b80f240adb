#pragma once

#include "hetq/table.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hetq {

enum class DocFormat { text, csv, json };

std::string_view doc_format_name(DocFormat f);

struct SourceDocument {
    std::string doc_id;  // hex of the stable 64-bit hash of `path`
    std::string path;    // corpus-relative, '/'-separated
    DocFormat format = DocFormat::text;
    std::string content;
    std::map<std::string, std::string> metadata;
};

struct ChunkingPolicy {
    std::size_t max_chars = 1000;
    std::size_t overlap_chars = 200; // must stay < max_chars
};

struct TextChunk {
    std::string chunk_id; // "<doc_id>:<6-digit ordinal>"
    std::string doc_id;
    std::size_t ordinal = 0;
    std::size_t begin = 0; // [begin, end) into the source document
    std::size_t end = 0;
    std::string text;

    bool operator==(const TextChunk&) const = default;
};

struct ManifestError {
    std::string path;
    std::string message;
};

struct CorpusManifest {
    std::string root;
    std::vector<SourceDocument> documents; // sorted by path
    std::vector<std::string> skipped;      // unrecognized extensions, sorted
    std::vector<ManifestError> errors;     // unreadable files, manifest still returned
    std::size_t text_count = 0;
    std::size_t csv_count = 0;
    std::size_t json_count = 0;
};

std::string doc_id_for_path(std::string_view corpus_relative_path);

// Walks `root` recursively. Recognized extensions: .txt .csv .json.
// Throws IoError when root is missing or unreadable; per-file read
// failures become manifest error entries.
CorpusManifest load_corpus(const std::filesystem::path& root);

// One JSON record per document, then one per skipped path.
std::string manifest_to_jsonl(const CorpusManifest& manifest);

// Sliding-window segmentation over characters. Chunk i spans
// [i*(max-overlap), min(i*(max-overlap)+max, len)); generation stops
// once a chunk reaches the document end.
std::vector<TextChunk> chunk_document(const SourceDocument& doc, const ChunkingPolicy& policy);

// CSV (header row + typed cells) or JSON (array of flat objects,
// union-of-keys columns, one level of dotted flattening). Throws
// ParseError with line/byte positions on malformed input.
Table parse_structured(const SourceDocument& doc);

// Lowercased file stem with non-alphanumerics mapped to '_';
// the table name a structured document parses into.
std::string table_name_for_path(std::string_view corpus_relative_path);

} // namespace hetq
