#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hetq {

// FNV-1a, the stable 64-bit hash used for doc/entity identifiers.
// Must never change: ids are persisted in graph files.
std::uint64_t fnv1a64(std::string_view s);

// 16-char lowercase hex rendering of a 64-bit hash.
std::string hex16(std::uint64_t v);

// ASCII lowercase.
std::string casefold(std::string_view s);

// Trim and collapse whitespace runs to a single space.
std::string collapse_whitespace(std::string_view s);

// Case-fold + whitespace collapse: the entity canonicalization rule.
std::string canonical_name(std::string_view s);

// Case-fold, replace non-alphanumerics with spaces, collapse.
// Used by the exact-normalized answer equivalence oracle.
std::string normalize_for_equality(std::string_view s);

struct Token {
    std::string text;      // verbatim slice of the source
    std::size_t begin = 0; // [begin, end) in source coordinates
    std::size_t end = 0;
};

// Splits on non-alphanumerics; '%' '+' '-' '.' are kept when part of a
// numeric literal ("20%", "-5", "4.2"). Everything else separates.
std::vector<Token> tokenize(std::string_view s);

// Lowercased alphanumeric tokens only, for term-level matching.
std::vector<std::string> content_terms(std::string_view s);

struct SentenceSpan {
    std::size_t begin = 0;
    std::size_t end = 0; // [begin, end) in source coordinates
};

// Sentence boundaries at '.', '!', '?', and newlines.
std::vector<SentenceSpan> split_sentences(std::string_view s);

bool is_stopword(std::string_view lowercased);

// "products" -> "product"; words that do not look plural come back
// unchanged. Purely suffix-based, no dictionary.
std::string strip_plural(std::string_view lowercased);

} // namespace hetq
