#pragma once

#include "hetq/graph.hpp"

#include <filesystem>

namespace hetq {

inline constexpr int kGraphFormatVersion = 1;

// Line-delimited JSON: a header record carrying format, version and
// record counts, followed by one record per line tagged with "kind"
// (chunk|entity|mention|relation). The counts let load_graph reject a
// file truncated on a line boundary.
void save_graph(const HetGraph& graph, const std::filesystem::path& path);

// Throws IoError (unreadable), ParseError (malformed line, with line
// number), GraphError (version mismatch, unknown kind, truncation,
// integrity violations). Never returns a partial graph.
HetGraph load_graph(const std::filesystem::path& path);

} // namespace hetq
