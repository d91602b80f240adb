#include "hetq/error.hpp"
#include "hetq/gateway.hpp"
#include "hetq/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <sstream>

using json = nlohmann::json;

namespace hetq {

namespace {

// ---------------------------------------------------------------------------
// Rulebook helpers
// ---------------------------------------------------------------------------

const std::array<std::string_view, 4> kMetricLexicon = {"sales", "revenue", "rating", "symptoms"};

bool in_metric_lexicon(std::string_view folded) {
    for (auto w : kMetricLexicon) {
        if (folded == w || strip_plural(folded) == w) {
            return true;
        }
    }
    return false;
}

bool is_quarter_token(std::string_view t) {
    return t.size() == 2 && (t[0] == 'Q' || t[0] == 'q') && t[1] >= '1' && t[1] <= '4';
}

bool is_numeric_literal(std::string_view t) {
    if (t.empty()) return false;
    std::size_t i = 0;
    if (t[i] == '+' || t[i] == '-') ++i;
    bool digits = false;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
        ++i;
        digits = true;
    }
    if (i < t.size() && t[i] == '.') {
        ++i;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
            ++i;
            digits = true;
        }
    }
    if (i < t.size() && t[i] == '%') ++i;
    return digits && i == t.size();
}

bool is_capitalized_word(std::string_view t) {
    return !t.empty() && std::isupper(static_cast<unsigned char>(t[0])) != 0;
}

const std::array<std::string_view, 8> kPrepositions = {"on", "in", "at", "by",
                                                       "for", "with", "from", "to"};

bool is_preposition(std::string_view folded) {
    return std::find(kPrepositions.begin(), kPrepositions.end(), folded) != kPrepositions.end();
}

bool is_filler(std::string_view folded) {
    return is_preposition(folded) || folded == "and" || folded == "or" || folded == "the" ||
           folded == "a" || folded == "an" || folded == "of";
}

// Lowercase alphabetic opener and at least one non-filler token.
bool is_verb_phrase(std::string_view between) {
    auto tokens = tokenize(between);
    if (tokens.empty()) return false;
    const std::string& first = tokens.front().text;
    for (unsigned char c : first) {
        if (!std::islower(c)) return false;
    }
    for (const Token& t : tokens) {
        if (!is_filler(casefold(t.text))) return true;
    }
    return false;
}

struct MockMention {
    std::string surface;
    std::string type;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// The deterministic stand-in for SLM tagging: quarter tokens, a small
// metric lexicon, numeric/percent literals, and maximal capitalized
// sequences. A standalone capitalized word that opens a sentence is
// skipped so ordinary sentence starts do not become entities.
std::vector<MockMention> mock_ner(const std::string& text) {
    const auto tokens = tokenize(text);
    const auto sentences = split_sentences(text);

    std::vector<bool> claimed(tokens.size(), false);
    std::vector<bool> sentence_initial(tokens.size(), false);
    {
        std::size_t t = 0;
        for (const SentenceSpan& s : sentences) {
            while (t < tokens.size() && tokens[t].begin < s.begin) ++t;
            if (t < tokens.size() && tokens[t].end <= s.end) {
                sentence_initial[t] = true;
            }
        }
    }

    std::vector<MockMention> mentions;
    auto claim = [&](std::size_t i, const std::string& type) {
        mentions.push_back({tokens[i].text, type, tokens[i].begin, tokens[i].end});
        claimed[i] = true;
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (is_quarter_token(tokens[i].text)) claim(i, "time");
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!claimed[i] && in_metric_lexicon(casefold(tokens[i].text))) claim(i, "metric");
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!claimed[i] && is_numeric_literal(tokens[i].text)) claim(i, "metric");
    }

    // maximal runs of capitalized tokens separated by plain spaces
    for (std::size_t i = 0; i < tokens.size();) {
        if (claimed[i] || !is_capitalized_word(tokens[i].text)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < tokens.size() && !claimed[j + 1] && is_capitalized_word(tokens[j + 1].text)) {
            bool spaces_only = true;
            for (std::size_t k = tokens[j].end; k < tokens[j + 1].begin; ++k) {
                if (text[k] != ' ') {
                    spaces_only = false;
                    break;
                }
            }
            if (!spaces_only) break;
            ++j;
        }
        if (i == j && sentence_initial[i]) {
            ++i;
            continue;
        }
        MockMention m;
        m.begin = tokens[i].begin;
        m.end = tokens[j].end;
        m.surface = text.substr(m.begin, m.end - m.begin);
        m.type = "other";
        mentions.push_back(std::move(m));
        for (std::size_t k = i; k <= j; ++k) claimed[k] = true;
        i = j + 1;
    }

    std::sort(mentions.begin(), mentions.end(),
              [](const MockMention& a, const MockMention& b) { return a.begin < b.begin; });
    return mentions;
}

std::string ner_to_json(const std::vector<MockMention>& mentions) {
    json arr = json::array();
    for (const MockMention& m : mentions) {
        arr.push_back({{"surface", m.surface},
                       {"type", m.type},
                       {"start", m.begin},
                       {"end", m.end}});
    }
    return arr.dump();
}

std::vector<MockMention> mentions_from_json(const std::string& text) {
    std::vector<MockMention> out;
    json arr = json::parse(text, nullptr, false);
    if (!arr.is_array()) return out;
    for (const auto& m : arr) {
        if (!m.is_object()) continue;
        MockMention mm;
        mm.surface = m.value("surface", "");
        mm.type = m.value("type", "other");
        mm.begin = m.value("start", std::size_t{0});
        mm.end = m.value("end", std::size_t{0});
        out.push_back(std::move(mm));
    }
    return out;
}

// Relation rule: within one sentence, subject and object are adjacent
// mentions joined by a verb phrase; a trailing prepositional phrase
// that itself contains mentions is folded into the predicate and its
// mentions are consumed.
std::string mock_relations(const std::string& text, const std::vector<MockMention>& mentions) {
    std::ostringstream out;
    for (const SentenceSpan& sentence : split_sentences(text)) {
        std::vector<MockMention> ms;
        for (const MockMention& m : mentions) {
            if (m.begin >= sentence.begin && m.end <= sentence.end) {
                ms.push_back(m);
            }
        }
        std::sort(ms.begin(), ms.end(),
                  [](const MockMention& a, const MockMention& b) { return a.begin < b.begin; });

        std::size_t i = 0;
        while (i + 1 < ms.size()) {
            const std::string between =
                text.substr(ms[i].end, ms[i + 1].begin - ms[i].end);
            if (!is_verb_phrase(between)) {
                ++i;
                continue;
            }
            std::string predicate = collapse_whitespace(between);
            std::size_t next = i + 2;

            std::size_t tail_begin = ms[i + 1].end;
            std::size_t tail_end = sentence.end;
            while (tail_end > tail_begin &&
                   (std::ispunct(static_cast<unsigned char>(text[tail_end - 1])) ||
                    std::isspace(static_cast<unsigned char>(text[tail_end - 1])))) {
                --tail_end;
            }
            if (tail_end > tail_begin) {
                std::string tail = text.substr(tail_begin, tail_end - tail_begin);
                auto tail_tokens = tokenize(tail);
                bool tail_has_mention = false;
                std::size_t last_consumed = next - 1;
                for (std::size_t k = next; k < ms.size() && ms[k].end <= tail_end; ++k) {
                    tail_has_mention = true;
                    last_consumed = k;
                }
                if (!tail_tokens.empty() && is_preposition(casefold(tail_tokens.front().text)) &&
                    tail_has_mention) {
                    predicate += " " + collapse_whitespace(tail);
                    next = last_consumed + 1;
                }
            }

            json rec{{"src", ms[i].surface},
                     {"predicate", predicate},
                     {"dst", ms[i + 1].surface},
                     {"confidence", 1.0}};
            out << rec.dump() << '\n';
            i = next;
        }
    }
    return out.str();
}

// Row pattern: quarter ... metric ... increased/decreased/was/were ...
// numeric literal, all within one sentence, emitted against the fixed
// (Quarter, Sales Metrics, Change Percentage) shape.
std::string mock_table_rows(const std::string& text) {
    std::ostringstream out;
    for (const SentenceSpan& sentence : split_sentences(text)) {
        auto tokens = tokenize(std::string_view(text).substr(sentence.begin, sentence.end - sentence.begin));

        std::optional<std::string> quarter;
        std::optional<std::string> metric;
        int sign = 0;
        bool keep_sign = false;
        std::optional<double> value;

        for (const Token& t : tokens) {
            const std::string folded = casefold(t.text);
            if (!quarter) {
                if (is_quarter_token(t.text)) {
                    quarter = "Q" + t.text.substr(1);
                }
                continue;
            }
            if (!metric) {
                if (in_metric_lexicon(folded)) {
                    std::string m = strip_plural(folded);
                    if (m == "sale") m = "sales"; // lexicon word, not a true plural
                    m[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(m[0])));
                    metric = m;
                }
                continue;
            }
            if (sign == 0 && !keep_sign) {
                if (folded == "increased") sign = 1;
                else if (folded == "decreased") sign = -1;
                else if (folded == "was" || folded == "were") keep_sign = true;
                continue;
            }
            if (!value && is_numeric_literal(t.text)) {
                std::string num = t.text;
                if (!num.empty() && num.back() == '%') num.pop_back();
                value = std::stod(num);
                break;
            }
        }

        if (quarter && metric && value && (sign != 0 || keep_sign)) {
            double v = *value * (sign == -1 ? -1.0 : 1.0);
            json rec{{"Quarter", *quarter}, {"Sales Metrics", *metric}, {"Change Percentage", v}};
            out << rec.dump() << '\n';
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Plan synthesis keyword grammar
// ---------------------------------------------------------------------------

struct CatalogColumn {
    std::string name;
    std::string type;
    bool percent = false;
};

struct CatalogTable {
    std::string name;
    std::vector<CatalogColumn> columns;

    const CatalogColumn* find(std::string_view folded_name) const {
        for (const auto& c : columns) {
            if (casefold(c.name) == folded_name) return &c;
        }
        return nullptr;
    }
};

// Parses the prompt rendering "name(col:type[:percent], ...)", one
// table per line.
std::vector<CatalogTable> parse_catalog_render(const std::string& rendered) {
    std::vector<CatalogTable> tables;
    std::istringstream in(rendered);
    std::string line;
    while (std::getline(in, line)) {
        auto open = line.find('(');
        auto close = line.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open) continue;
        CatalogTable table;
        table.name = collapse_whitespace(line.substr(0, open));
        std::string body = line.substr(open + 1, close - open - 1);
        std::size_t pos = 0;
        while (pos <= body.size()) {
            auto comma = body.find(',', pos);
            std::string item = body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
            pos = comma == std::string::npos ? body.size() + 1 : comma + 1;
            item = collapse_whitespace(item);
            if (item.empty()) continue;
            CatalogColumn col;
            std::size_t name_end;
            if (item.front() == '`') {
                auto closing = item.find('`', 1);
                if (closing == std::string::npos) continue;
                col.name = item.substr(1, closing - 1);
                name_end = closing + 1;
            } else {
                name_end = item.find(':');
                if (name_end == std::string::npos) name_end = item.size();
                col.name = item.substr(0, name_end);
            }
            std::string rest = item.substr(std::min(name_end, item.size()));
            if (!rest.empty() && rest.front() == ':') rest = rest.substr(1);
            auto colon = rest.find(':');
            col.type = colon == std::string::npos ? rest : rest.substr(0, colon);
            col.percent = colon != std::string::npos && rest.substr(colon + 1) == "percent";
            table.columns.push_back(std::move(col));
        }
        if (!table.name.empty()) tables.push_back(std::move(table));
    }
    return tables;
}

std::string quote_ident(const std::string& name) {
    bool bare = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
    for (unsigned char c : name) {
        bare = bare && (std::isalnum(c) || c == '_' || c == '.');
    }
    return bare ? name : "`" + name + "`";
}

struct SynthFilter {
    std::string column;
    std::string op;
    std::string literal; // already rendered (quoted string or number)
    std::string owner;   // table that owns the column, may be empty
};

std::string mock_plan(const std::string& question, const std::string& catalog_render,
                      const std::string& reference_quarter) {
    const auto catalog = parse_catalog_render(catalog_render);
    const auto tokens = tokenize(casefold(question));

    auto resolve_column = [&](std::string_view word)
        -> std::optional<std::pair<std::string, std::string>> { // (column, owning table)
        const std::string folded(word);
        const std::string singular = strip_plural(folded);
        for (const auto& t : catalog) {
            if (const auto* c = t.find(folded)) return std::make_pair(c->name, t.name);
        }
        for (const auto& t : catalog) {
            if (const auto* c = t.find(singular)) return std::make_pair(c->name, t.name);
        }
        return std::nullopt;
    };
    auto resolve_table = [&](std::string_view word) -> std::optional<std::string> {
        const std::string folded(word);
        const std::string singular = strip_plural(folded);
        for (const auto& t : catalog) {
            if (casefold(t.name) == folded || casefold(t.name) == singular ||
                strip_plural(casefold(t.name)) == folded) {
                return t.name;
            }
        }
        return std::nullopt;
    };

    std::vector<std::string> referenced_tables;
    auto reference = [&](const std::string& table) {
        if (!table.empty() &&
            std::find(referenced_tables.begin(), referenced_tables.end(), table) ==
                referenced_tables.end()) {
            referenced_tables.push_back(table);
        }
    };

    // aggregate detection
    std::string agg_fn;
    std::string agg_col;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& w = tokens[i].text;
        std::string fn;
        if (w == "total" || w == "sum") fn = "SUM";
        else if (w == "average" || w == "avg" || w == "mean") fn = "AVG";
        else if (w == "count") fn = "COUNT";
        else if (w == "highest" || w == "maximum" || w == "max") fn = "MAX";
        else if (w == "lowest" || w == "minimum" || w == "min") fn = "MIN";
        if (fn.empty()) continue;
        agg_fn = fn;
        for (std::size_t j = i + 1; j < tokens.size() && j <= i + 6; ++j) {
            if (is_stopword(tokens[j].text)) continue;
            if (auto hit = resolve_column(tokens[j].text)) {
                agg_col = hit->first;
                reference(hit->second);
                break;
            }
        }
        if (!agg_col.empty() || agg_fn == "COUNT") break;
        agg_fn.clear(); // only COUNT may run without a column; keep scanning
    }

    // group-by detection: "different X" / "by X" / "per X" / "each X"
    std::vector<std::string> group_by;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        const std::string& w = tokens[i].text;
        if (w != "different" && w != "by" && w != "per" && w != "each") continue;
        if (auto hit = resolve_column(tokens[i + 1].text)) {
            if (std::find(group_by.begin(), group_by.end(), hit->first) == group_by.end()) {
                group_by.push_back(hit->first);
                reference(hit->second);
            }
        }
    }

    // plain table references by name; "all <table>" is universal
    // quantification, not a reference that would force a join
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && tokens[i - 1].text == "all") continue;
        if (auto table = resolve_table(tokens[i].text)) {
            reference(*table);
        }
    }

    // filter columns bind to already-referenced tables first so that an
    // incidental column-name collision elsewhere in the catalog cannot
    // drag an unrelated table into the plan
    auto resolve_filter_column = [&](std::string_view word)
        -> std::optional<std::pair<std::string, std::string>> {
        const std::string folded(word);
        for (const auto& name : referenced_tables) {
            for (const auto& t : catalog) {
                if (t.name != name) continue;
                if (const auto* c = t.find(folded)) return std::make_pair(c->name, t.name);
            }
        }
        return resolve_column(folded);
    };

    std::vector<SynthFilter> filters;
    auto quarter_column = [&]() -> std::optional<std::pair<std::string, std::string>> {
        return resolve_filter_column("quarter");
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& w = tokens[i].text;
        if (is_quarter_token(w)) {
            if (auto qc = quarter_column()) {
                std::string lit = "\"Q" + w.substr(1) + "\"";
                filters.push_back({qc->first, "=", lit, qc->second});
                reference(qc->second);
            }
        }
        if (w == "last" && i + 1 < tokens.size() && tokens[i + 1].text == "quarter") {
            if (auto qc = quarter_column()) {
                filters.push_back({qc->first, "=", "\"" + reference_quarter + "\"", qc->second});
                reference(qc->second);
            }
        }
        if ((w == "more" || w == "less") && i + 2 < tokens.size() &&
            tokens[i + 1].text == "than" && is_numeric_literal(tokens[i + 2].text)) {
            std::string lit = tokens[i + 2].text;
            if (lit.empty() || lit.back() != '%') continue; // only percent comparisons
            // percent filters target the percent-unit column: referenced
            // tables beat unreferenced ones, change/increase names beat
            // other names within each group
            std::string col;
            std::string owner;
            int best = -1; // 2·referenced + preferred-name
            for (const auto& t : catalog) {
                bool ref = std::find(referenced_tables.begin(), referenced_tables.end(),
                                     t.name) != referenced_tables.end();
                for (const auto& c : t.columns) {
                    if (!c.percent) continue;
                    const std::string folded = casefold(c.name);
                    bool preferred = folded.find("increase") != std::string::npos ||
                                     folded.find("change") != std::string::npos;
                    int rank = 2 * (ref ? 1 : 0) + (preferred ? 1 : 0);
                    if (rank > best) {
                        best = rank;
                        col = c.name;
                        owner = t.name;
                    }
                }
            }
            if (col.empty()) continue;
            filters.push_back({col, w == "more" ? ">" : "<", lit, owner});
            reference(owner);
        }
    }

    if (referenced_tables.empty() && !catalog.empty()) {
        // fall back to a sales-shaped table, else the first one
        std::string pick = catalog.front().name;
        for (const auto& t : catalog) {
            if (casefold(t.name).find("sales") != std::string::npos) {
                pick = t.name;
                break;
            }
        }
        referenced_tables.push_back(pick);
    }
    std::sort(referenced_tables.begin(), referenced_tables.end());

    // assemble: per-table Scan + Filters, optional Join, optional Aggregate
    auto filters_for = [&](const std::string& table, bool orphans) {
        std::vector<SynthFilter> mine;
        for (const auto& f : filters) {
            if ((orphans && f.owner.empty()) || (!orphans && f.owner == table)) {
                mine.push_back(f);
            }
        }
        return mine;
    };
    auto wrap_filters = [&](std::string input, const std::vector<SynthFilter>& fs) {
        if (fs.empty()) return input;
        std::string pred;
        for (const auto& f : fs) {
            std::string cmp = "(" + quote_ident(f.column) + " " + f.op + " " + f.literal + ")";
            pred = pred.empty() ? cmp : "(" + pred + " AND " + cmp + ")";
        }
        return "Filter(pred=" + pred + ", input=" + input + ")";
    };

    std::string plan;
    if (referenced_tables.size() >= 2) {
        const std::string& left = referenced_tables[0];
        const std::string& right = referenced_tables[1];
        const CatalogTable* lt = nullptr;
        const CatalogTable* rt = nullptr;
        for (const auto& t : catalog) {
            if (t.name == left) lt = &t;
            if (t.name == right) rt = &t;
        }
        std::string key;
        if (lt && rt) {
            std::vector<std::string> shared;
            for (const auto& lc : lt->columns) {
                if (rt->find(casefold(lc.name))) shared.push_back(lc.name);
            }
            std::sort(shared.begin(), shared.end());
            if (!shared.empty()) key = shared.front();
        }
        if (key.empty()) {
            plan = wrap_filters("Scan(" + left + ")", filters_for(left, false));
        } else {
            std::string l = wrap_filters("Scan(" + left + ")", filters_for(left, false));
            std::string r = wrap_filters("Scan(" + right + ")", filters_for(right, false));
            plan = "Join(left=" + l + ", right=" + r + ", key=" + quote_ident(key) + ")";
        }
    } else if (!referenced_tables.empty()) {
        plan = wrap_filters("Scan(" + referenced_tables[0] + ")",
                            filters_for(referenced_tables[0], false));
    } else {
        return ""; // empty catalog: nothing to scan, let the parser report it
    }
    plan = wrap_filters(plan, filters_for("", true));

    if (!agg_fn.empty() || !group_by.empty()) {
        std::string groups;
        for (const auto& g : group_by) {
            if (!groups.empty()) groups += ", ";
            groups += quote_ident(g);
        }
        std::string aggs;
        if (!agg_fn.empty()) {
            std::string target = agg_col.empty() ? "*" : quote_ident(agg_col);
            std::string out_name;
            if (agg_col.empty()) {
                out_name = "count";
            } else {
                out_name = casefold(agg_fn) + "_";
                for (unsigned char c : agg_col) {
                    out_name.push_back(std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_');
                }
            }
            aggs = agg_fn + "(" + target + ") AS " + out_name;
        } else {
            aggs = "COUNT(*) AS count";
        }
        plan = "Aggregate(group=[" + groups + "], aggs=[" + aggs + "], input=" + plan + ")";
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Canned answers
// ---------------------------------------------------------------------------

struct CannedEntry {
    std::vector<std::string_view> keywords; // all must appear in the question
    std::vector<std::string_view> variants;
};

const std::array<CannedEntry, 2> kCannedAnswers = {{
    {{"sued", "photo"},
     {"Yes, if copyrighted", "No, unless consent is violated", "It depends on jurisdiction"}},
    {{"influenza", "symptoms"},
     {"Fever, cough, fatigue", "Symptoms include sore throat and body aches"}},
}};

const CannedEntry* find_canned(const std::string& question) {
    const std::string folded = casefold(question);
    for (const auto& entry : kCannedAnswers) {
        bool all = true;
        for (auto kw : entry.keywords) {
            if (folded.find(kw) == std::string::npos) {
                all = false;
                break;
            }
        }
        if (all) return &entry;
    }
    return nullptr;
}

std::string first_sentence(const std::string& text) {
    auto spans = split_sentences(text);
    if (spans.empty()) return "";
    return collapse_whitespace(text.substr(spans[0].begin, spans[0].end - spans[0].begin));
}

// ---------------------------------------------------------------------------
// The gateway
// ---------------------------------------------------------------------------

class MockGateway final : public ModelGateway {
public:
    explicit MockGateway(BackendConfig cfg) : cfg_(std::move(cfg)) {}

    Completion complete(const PromptRequest& req) override {
        render_template(req); // binding check, output unused
        std::string text;
        switch (req.template_id) {
        case TemplateId::ner:
            text = ner_to_json(mock_ner(req.variables.at("text")));
            break;
        case TemplateId::relation:
            text = mock_relations(req.variables.at("text"),
                                  mentions_from_json(req.variables.at("mentions")));
            break;
        case TemplateId::table_extract:
            text = mock_table_rows(req.variables.at("chunks"));
            break;
        case TemplateId::plan_synthesis: {
            auto ref = req.variables.find("reference_quarter");
            text = mock_plan(req.variables.at("question"), req.variables.at("catalog"),
                             ref == req.variables.end() ? "Q4" : ref->second);
            break;
        }
        case TemplateId::answer: {
            const std::string& question = req.variables.at("question");
            if (const CannedEntry* canned = find_canned(question)) {
                std::size_t idx = req.params.temperature > 0
                                      ? req.params.seed % canned->variants.size()
                                      : 0;
                text = std::string(canned->variants[idx]);
            } else {
                text = first_sentence(req.variables.at("context"));
                if (text.empty()) {
                    text = "No relevant context found.";
                }
            }
            break;
        }
        case TemplateId::paraphrase: {
            const std::string& question = req.variables.at("question");
            if (const CannedEntry* canned = find_canned(question)) {
                std::size_t idx = req.params.temperature > 0
                                      ? req.params.seed % canned->variants.size()
                                      : 0;
                text = std::string(canned->variants[idx]);
            } else {
                text = question;
            }
            break;
        }
        }
        if (text.size() > req.params.max_output_chars) {
            text.resize(req.params.max_output_chars);
        }
        return {std::move(text), BackendKind::mock, 0.0};
    }

    EmbeddingVector embed(std::string_view text) override {
        std::vector<double> buckets(cfg_.embedding_dim, 0.0);
        std::string token;
        bool any = false;
        auto flush = [&] {
            if (!token.empty()) {
                buckets[fnv1a64(token) % cfg_.embedding_dim] += 1.0;
                token.clear();
                any = true;
            }
        };
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                token.push_back(static_cast<char>(std::tolower(c)));
            } else {
                flush();
            }
        }
        flush();
        if (!any) {
            return {std::vector<double>(cfg_.embedding_dim, 0.0)};
        }
        return {fit_and_normalize(std::move(buckets), cfg_.embedding_dim)};
    }

    std::vector<Completion> sample_answers(const PromptRequest& req, int n) override {
        if (n < 1) {
            throw Error("sample_answers requires n >= 1");
        }
        std::vector<Completion> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            PromptRequest sample = req;
            if (req.params.temperature > 0) {
                sample.params.seed = req.params.seed + static_cast<std::uint64_t>(i);
            }
            out.push_back(complete(sample));
        }
        return out;
    }

    BackendKind kind() const override { return BackendKind::mock; }

private:
    BackendConfig cfg_;
};

} // namespace

std::shared_ptr<ModelGateway> make_mock_gateway(const BackendConfig& cfg) {
    BackendConfig local = cfg;
    local.mode = BackendKind::mock;
    local.validate();
    return std::make_shared<MockGateway>(local);
}

} // namespace hetq
