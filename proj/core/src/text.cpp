#include "hetq/text.hpp"

#include <array>
#include <cctype>

namespace hetq {

namespace {

bool is_alnum(unsigned char c) {
    return std::isalnum(c) != 0;
}

bool is_digit(unsigned char c) {
    return std::isdigit(c) != 0;
}

const std::array<std::string_view, 42> kStopwords = {
    "a",    "an",   "the",  "of",   "in",   "on",    "at",   "by",    "for",  "with", "from",
    "to",   "and",  "or",   "not",  "is",   "are",   "was",  "were",  "be",   "been", "that",
    "this", "it",   "as",   "all",  "any",  "what",  "which", "who",  "how",  "do",   "does",
    "did",  "had",  "have", "has",  "their", "than",  "into", "over", "per",
};

} // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string casefold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true; // leading spaces dropped
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) {
                out.push_back(' ');
            }
            in_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string canonical_name(std::string_view s) {
    return collapse_whitespace(casefold(s));
}

std::string normalize_for_equality(std::string_view s) {
    std::string mapped;
    mapped.reserve(s.size());
    for (unsigned char c : s) {
        mapped.push_back(is_alnum(c) ? static_cast<char>(std::tolower(c)) : ' ');
    }
    return collapse_whitespace(mapped);
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        // numeric literal: [+-]?digits[.digits][%]
        if (is_digit(c) ||
            ((c == '+' || c == '-') && i + 1 < n && is_digit(static_cast<unsigned char>(s[i + 1])) &&
             (i == 0 || !is_alnum(static_cast<unsigned char>(s[i - 1]))))) {
            std::size_t j = i;
            if (s[j] == '+' || s[j] == '-') ++j;
            while (j < n && is_digit(static_cast<unsigned char>(s[j]))) ++j;
            if (j < n && s[j] == '.' && j + 1 < n && is_digit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < n && is_digit(static_cast<unsigned char>(s[j]))) ++j;
            }
            // alphanumeric tail makes it a word token ("4th", "Q2" handled below)
            if (j < n && std::isalpha(static_cast<unsigned char>(s[j]))) {
                while (j < n && is_alnum(static_cast<unsigned char>(s[j]))) ++j;
            } else if (j < n && s[j] == '%') {
                ++j;
            }
            tokens.push_back({std::string(s.substr(i, j - i)), i, j});
            i = j;
            continue;
        }
        if (is_alnum(c)) {
            std::size_t j = i;
            while (j < n && is_alnum(static_cast<unsigned char>(s[j]))) ++j;
            tokens.push_back({std::string(s.substr(i, j - i)), i, j});
            i = j;
            continue;
        }
        ++i;
    }
    return tokens;
}

std::vector<std::string> content_terms(std::string_view s) {
    std::vector<std::string> terms;
    for (const Token& t : tokenize(s)) {
        std::string low = casefold(t.text);
        if (!is_stopword(low)) {
            terms.push_back(std::move(low));
        }
    }
    return terms;
}

std::vector<SentenceSpan> split_sentences(std::string_view s) {
    std::vector<SentenceSpan> spans;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            if (i + 1 > begin) {
                // keep the terminator inside the sentence span
                std::size_t end = (c == '\n') ? i : i + 1;
                if (end > begin) {
                    spans.push_back({begin, end});
                }
            }
            begin = i + 1;
        }
    }
    if (begin < s.size()) {
        spans.push_back({begin, s.size()});
    }
    // drop blank sentences
    std::vector<SentenceSpan> out;
    for (const auto& sp : spans) {
        bool blank = true;
        for (std::size_t i = sp.begin; i < sp.end; ++i) {
            if (!std::isspace(static_cast<unsigned char>(s[i]))) {
                blank = false;
                break;
            }
        }
        if (!blank) {
            out.push_back(sp);
        }
    }
    return out;
}

bool is_stopword(std::string_view lowercased) {
    for (std::string_view w : kStopwords) {
        if (w == lowercased) {
            return true;
        }
    }
    return false;
}

std::string strip_plural(std::string_view lowercased) {
    std::string s(lowercased);
    if (s.size() > 3 && s.ends_with("ies")) {
        return s.substr(0, s.size() - 3) + "y";
    }
    if (s.size() > 2 && s.ends_with("s") && !s.ends_with("ss")) {
        return s.substr(0, s.size() - 1);
    }
    return s;
}

} // namespace hetq
