#include "hetq/plan.hpp"

#include "hetq/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace hetq {

namespace {

bool ident_is_bare(const std::string& name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

void write_ident(std::string& out, const std::string& name) {
    if (ident_is_bare(name)) {
        out += name;
    } else {
        out += '`';
        out += name;
        out += '`';
    }
}

void write_literal(std::string& out, const PlanLiteral& lit) {
    if (is_null(lit.value)) {
        out += "null";
    } else if (const bool* b = std::get_if<bool>(&lit.value)) {
        out += *b ? "true" : "false";
    } else if (const double* d = std::get_if<double>(&lit.value)) {
        out += format_number(*d);
        if (lit.percent) out += '%';
    } else {
        out += '"';
        for (char c : std::get<std::string>(lit.value)) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
            }
        }
        out += '"';
    }
}

void write_predicate(std::string& out, const PredicatePtr& p) {
    switch (p->kind) {
    case Predicate::Kind::comparison: {
        const Comparison& c = p->comparison;
        out += '(';
        write_ident(out, c.column);
        out += ' ';
        out += compare_op_text(c.op);
        out += ' ';
        if (c.rhs_is_column) {
            write_ident(out, c.rhs_column);
        } else {
            write_literal(out, c.literal);
        }
        out += ')';
        break;
    }
    case Predicate::Kind::logical_not:
        out += "(NOT ";
        write_predicate(out, p->lhs);
        out += ')';
        break;
    case Predicate::Kind::logical_and:
    case Predicate::Kind::logical_or:
        out += '(';
        write_predicate(out, p->lhs);
        out += p->kind == Predicate::Kind::logical_and ? " AND " : " OR ";
        write_predicate(out, p->rhs);
        out += ')';
        break;
    }
}

void write_plan(std::string& out, const PlanPtr& n) {
    switch (n->kind) {
    case PlanNode::Kind::scan:
        out += "Scan(";
        write_ident(out, n->table);
        out += ')';
        break;
    case PlanNode::Kind::filter:
        out += "Filter(pred=";
        write_predicate(out, n->predicate);
        out += ", input=";
        write_plan(out, n->input);
        out += ')';
        break;
    case PlanNode::Kind::project: {
        out += "Project(cols=[";
        bool first = true;
        for (const std::string& c : n->columns) {
            if (!first) out += ", ";
            first = false;
            write_ident(out, c);
        }
        out += "], input=";
        write_plan(out, n->input);
        out += ')';
        break;
    }
    case PlanNode::Kind::join:
        out += "Join(left=";
        write_plan(out, n->input);
        out += ", right=";
        write_plan(out, n->right);
        out += ", key=";
        write_ident(out, n->key);
        out += ')';
        break;
    case PlanNode::Kind::aggregate: {
        out += "Aggregate(group=[";
        bool first = true;
        for (const std::string& c : n->columns) {
            if (!first) out += ", ";
            first = false;
            write_ident(out, c);
        }
        out += "], aggs=[";
        first = true;
        for (const AggSpec& a : n->aggs) {
            if (!first) out += ", ";
            first = false;
            out += agg_fn_name(a.fn);
            out += '(';
            if (a.star) {
                out += '*';
            } else {
                write_ident(out, a.column);
            }
            out += ") AS ";
            write_ident(out, a.output);
        }
        out += "], input=";
        write_plan(out, n->input);
        out += ')';
        break;
    }
    case PlanNode::Kind::sort:
        out += "Sort(by=";
        write_ident(out, n->sort_by);
        out += ", dir=";
        out += n->descending ? "desc" : "asc";
        out += ", input=";
        write_plan(out, n->input);
        out += ')';
        break;
    case PlanNode::Kind::limit:
        out += "Limit(n=";
        out += std::to_string(n->limit);
        out += ", input=";
        write_plan(out, n->input);
        out += ')';
        break;
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    std::size_t pos() const { return pos_; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* where) {
        if (!eat(c)) {
            fail(std::string("expected '") + c + "' " + where);
        }
    }

    // case-insensitive whole-word keyword
    bool eat_keyword(std::string_view kw) {
        skip_ws();
        if (pos_ + kw.size() > text_.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(text_[pos_ + i])) !=
                std::tolower(static_cast<unsigned char>(kw[i]))) {
                return false;
            }
        }
        const std::size_t after = pos_ + kw.size();
        if (after < text_.size()) {
            const unsigned char next = static_cast<unsigned char>(text_[after]);
            if (std::isalnum(next) || next == '_') return false;
        }
        pos_ = after;
        return true;
    }

    std::string parse_ident(const char* what) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '`') {
            const std::size_t close = text_.find('`', pos_ + 1);
            if (close == std::string_view::npos) {
                fail("unterminated backtick identifier");
            }
            std::string name(text_.substr(pos_ + 1, close - pos_ - 1));
            if (name.empty()) {
                fail("empty backtick identifier");
            }
            pos_ = close + 1;
            return name;
        }
        std::size_t start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                                    text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_')) {
                ++pos_;
            }
        }
        if (pos_ == start) {
            fail(std::string("expected ") + what);
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void expect_arg(std::string_view name) {
        if (!eat_keyword(name)) {
            fail("expected argument '" + std::string(name) + "='");
        }
        expect('=', ("after '" + std::string(name) + "'").c_str());
    }

    std::string parse_string() {
        // leading quote already consumed
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_++];
            if (c == '"') {
                return out;
            }
            if (c == '\\') {
                if (pos_ >= text_.size()) break;
                char e = text_[pos_++];
                switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: fail(std::string("unsupported escape '\\") + e + "' in string literal");
                }
            } else {
                out += c;
            }
        }
        fail("unterminated string literal");
    }

    double parse_number() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
            ++pos_;
        }
        double out = 0.0;
        auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), out);
        if (ec != std::errc{} || end == text_.data() + pos_) {
            pos_ = start;
            fail("expected a number");
        }
        if (text_[start] == '-') out = -out;
        pos_ = static_cast<std::size_t>(end - text_.data());
        return out;
    }

    std::size_t parse_count(const char* what) {
        skip_ws();
        std::size_t start = pos_;
        std::size_t out = 0;
        auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), out);
        if (ec != std::errc{} || end == text_.data() + pos_) {
            pos_ = start;
            fail(std::string("expected ") + what);
        }
        pos_ = static_cast<std::size_t>(end - text_.data());
        return out;
    }

    [[noreturn]] void fail(const std::string& message) {
        throw ParseError("plan parse error at offset " + std::to_string(pos_) + ": " + message,
                         pos_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

PlanLiteral parse_literal(Cursor& cur) {
    PlanLiteral lit;
    const char c = cur.peek();
    if (c == '"') {
        cur.eat('"');
        lit.value = cur.parse_string();
        return lit;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.') {
        lit.value = cur.parse_number();
        if (cur.eat('%')) {
            lit.percent = true;
        }
        return lit;
    }
    if (cur.eat_keyword("true")) {
        lit.value = true;
        return lit;
    }
    if (cur.eat_keyword("false")) {
        lit.value = false;
        return lit;
    }
    if (cur.eat_keyword("null")) {
        return lit;
    }
    cur.fail("expected a literal");
}

CompareOp parse_compare_op(Cursor& cur) {
    if (cur.eat('!')) {
        cur.expect('=', "after '!'");
        return CompareOp::ne;
    }
    if (cur.eat('<')) {
        return cur.eat('=') ? CompareOp::le : CompareOp::lt;
    }
    if (cur.eat('>')) {
        return cur.eat('=') ? CompareOp::ge : CompareOp::gt;
    }
    if (cur.eat('=')) {
        cur.eat('='); // tolerate ==
        return CompareOp::eq;
    }
    cur.fail("expected a comparison operator");
}

PredicatePtr parse_predicate(Cursor& cur);

PredicatePtr parse_predicate_primary(Cursor& cur) {
    if (cur.eat_keyword("NOT")) {
        return make_not(parse_predicate_primary(cur));
    }
    if (cur.eat('(')) {
        PredicatePtr inner = parse_predicate(cur);
        cur.expect(')', "to close predicate group");
        return inner;
    }
    Comparison cmp;
    cmp.column = cur.parse_ident("a column name");
    cmp.op = parse_compare_op(cur);
    const char c = cur.peek();
    const bool rhs_literal = c == '"' || std::isdigit(static_cast<unsigned char>(c)) || c == '+' ||
                             c == '-' || c == '.';
    if (!rhs_literal && (c == '`' || std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
        // keywords are literals, anything else is a column reference
        Cursor probe = cur;
        if (probe.eat_keyword("true") || probe.eat_keyword("false") || probe.eat_keyword("null")) {
            cmp.literal = parse_literal(cur);
        } else {
            cmp.rhs_is_column = true;
            cmp.rhs_column = cur.parse_ident("a column name");
        }
    } else {
        cmp.literal = parse_literal(cur);
    }
    return make_comparison(std::move(cmp));
}

PredicatePtr parse_predicate_and(Cursor& cur) {
    PredicatePtr lhs = parse_predicate_primary(cur);
    while (cur.eat_keyword("AND")) {
        lhs = make_and(std::move(lhs), parse_predicate_primary(cur));
    }
    return lhs;
}

PredicatePtr parse_predicate(Cursor& cur) {
    PredicatePtr lhs = parse_predicate_and(cur);
    while (cur.eat_keyword("OR")) {
        lhs = make_or(std::move(lhs), parse_predicate_and(cur));
    }
    return lhs;
}

std::vector<std::string> parse_ident_list(Cursor& cur) {
    std::vector<std::string> out;
    cur.expect('[', "to open the column list");
    if (cur.eat(']')) {
        return out;
    }
    do {
        out.push_back(cur.parse_ident("a column name"));
    } while (cur.eat(','));
    cur.expect(']', "to close the column list");
    return out;
}

AggSpec parse_agg_spec(Cursor& cur) {
    AggSpec spec;
    if (cur.eat_keyword("SUM")) {
        spec.fn = AggFn::sum;
    } else if (cur.eat_keyword("AVG")) {
        spec.fn = AggFn::avg;
    } else if (cur.eat_keyword("COUNT")) {
        spec.fn = AggFn::count;
    } else if (cur.eat_keyword("MIN")) {
        spec.fn = AggFn::min;
    } else if (cur.eat_keyword("MAX")) {
        spec.fn = AggFn::max;
    } else {
        cur.fail("expected an aggregate function (SUM, AVG, COUNT, MIN, MAX)");
    }
    cur.expect('(', "after the aggregate function");
    if (cur.eat('*')) {
        if (spec.fn != AggFn::count) {
            cur.fail("'*' is only valid inside COUNT");
        }
        spec.star = true;
    } else {
        spec.column = cur.parse_ident("a column name");
    }
    cur.expect(')', "to close the aggregate");
    if (!cur.eat_keyword("AS")) {
        cur.fail("expected 'AS' and an output name");
    }
    spec.output = cur.parse_ident("an output name");
    return spec;
}

PlanPtr parse_node(Cursor& cur) {
    const std::size_t at = cur.pos();
    const std::string name = cur.parse_ident("an operator name");
    std::string lowered = name;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    cur.expect('(', ("after operator '" + name + "'").c_str());
    PlanPtr out;
    if (lowered == "scan") {
        out = make_scan(cur.parse_ident("a table name"));
    } else if (lowered == "filter") {
        cur.expect_arg("pred");
        PredicatePtr pred = parse_predicate(cur);
        cur.expect(',', "between arguments");
        cur.expect_arg("input");
        out = make_filter(std::move(pred), parse_node(cur));
    } else if (lowered == "project") {
        cur.expect_arg("cols");
        auto cols = parse_ident_list(cur);
        cur.expect(',', "between arguments");
        cur.expect_arg("input");
        out = make_project(std::move(cols), parse_node(cur));
    } else if (lowered == "join") {
        cur.expect_arg("left");
        PlanPtr left = parse_node(cur);
        cur.expect(',', "between arguments");
        cur.expect_arg("right");
        PlanPtr right = parse_node(cur);
        cur.expect(',', "between arguments");
        cur.expect_arg("key");
        out = make_join(std::move(left), std::move(right), cur.parse_ident("a key column"));
    } else if (lowered == "aggregate") {
        cur.expect_arg("group");
        auto group = parse_ident_list(cur);
        cur.expect(',', "between arguments");
        cur.expect_arg("aggs");
        std::vector<AggSpec> aggs;
        cur.expect('[', "to open the aggregate list");
        if (!cur.eat(']')) {
            do {
                aggs.push_back(parse_agg_spec(cur));
            } while (cur.eat(','));
            cur.expect(']', "to close the aggregate list");
        }
        cur.expect(',', "between arguments");
        cur.expect_arg("input");
        out = make_aggregate(std::move(group), std::move(aggs), parse_node(cur));
    } else if (lowered == "sort") {
        cur.expect_arg("by");
        std::string by = cur.parse_ident("a column name");
        cur.expect(',', "between arguments");
        cur.expect_arg("dir");
        bool descending;
        if (cur.eat_keyword("asc")) {
            descending = false;
        } else if (cur.eat_keyword("desc")) {
            descending = true;
        } else {
            cur.fail("expected sort direction asc or desc");
        }
        cur.expect(',', "between arguments");
        cur.expect_arg("input");
        out = make_sort(std::move(by), descending, parse_node(cur));
    } else if (lowered == "limit") {
        cur.expect_arg("n");
        const std::size_t n = cur.parse_count("a row count");
        cur.expect(',', "between arguments");
        cur.expect_arg("input");
        out = make_limit(n, parse_node(cur));
    } else {
        throw ParseError("plan parse error at offset " + std::to_string(at) +
                             ": unknown operator '" + name + "'",
                         at);
    }
    cur.expect(')', ("to close " + name).c_str());
    return out;
}

} // namespace

std::string_view compare_op_text(CompareOp op) {
    switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    }
    return "?";
}

std::string_view agg_fn_name(AggFn fn) {
    switch (fn) {
    case AggFn::sum: return "SUM";
    case AggFn::avg: return "AVG";
    case AggFn::count: return "COUNT";
    case AggFn::min: return "MIN";
    case AggFn::max: return "MAX";
    }
    return "?";
}

PredicatePtr make_comparison(Comparison c) {
    auto p = std::make_shared<Predicate>();
    p->kind = Predicate::Kind::comparison;
    p->comparison = std::move(c);
    return p;
}

PredicatePtr make_and(PredicatePtr lhs, PredicatePtr rhs) {
    auto p = std::make_shared<Predicate>();
    p->kind = Predicate::Kind::logical_and;
    p->lhs = std::move(lhs);
    p->rhs = std::move(rhs);
    return p;
}

PredicatePtr make_or(PredicatePtr lhs, PredicatePtr rhs) {
    auto p = std::make_shared<Predicate>();
    p->kind = Predicate::Kind::logical_or;
    p->lhs = std::move(lhs);
    p->rhs = std::move(rhs);
    return p;
}

PredicatePtr make_not(PredicatePtr inner) {
    auto p = std::make_shared<Predicate>();
    p->kind = Predicate::Kind::logical_not;
    p->lhs = std::move(inner);
    return p;
}

bool equal(const PredicatePtr& a, const PredicatePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == Predicate::Kind::comparison) {
        return a->comparison == b->comparison;
    }
    return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

PlanPtr make_scan(std::string table) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::scan;
    n->table = std::move(table);
    return n;
}

PlanPtr make_filter(PredicatePtr predicate, PlanPtr input) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::filter;
    n->predicate = std::move(predicate);
    n->input = std::move(input);
    return n;
}

PlanPtr make_project(std::vector<std::string> columns, PlanPtr input) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::project;
    n->columns = std::move(columns);
    n->input = std::move(input);
    return n;
}

PlanPtr make_join(PlanPtr left, PlanPtr right, std::string key) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::join;
    n->input = std::move(left);
    n->right = std::move(right);
    n->key = std::move(key);
    return n;
}

PlanPtr make_aggregate(std::vector<std::string> group, std::vector<AggSpec> aggs, PlanPtr input) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::aggregate;
    n->columns = std::move(group);
    n->aggs = std::move(aggs);
    n->input = std::move(input);
    return n;
}

PlanPtr make_sort(std::string by, bool descending, PlanPtr input) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::sort;
    n->sort_by = std::move(by);
    n->descending = descending;
    n->input = std::move(input);
    return n;
}

PlanPtr make_limit(std::size_t limit, PlanPtr input) {
    auto n = std::make_shared<PlanNode>();
    n->kind = PlanNode::Kind::limit;
    n->limit = limit;
    n->input = std::move(input);
    return n;
}

bool equal(const PlanPtr& a, const PlanPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->kind == b->kind && a->table == b->table && equal(a->predicate, b->predicate) &&
           a->columns == b->columns && equal(a->input, b->input) && equal(a->right, b->right) &&
           a->key == b->key && a->aggs == b->aggs && a->sort_by == b->sort_by &&
           a->descending == b->descending && a->limit == b->limit;
}

std::string serialize_plan(const PlanPtr& plan) {
    std::string out;
    if (plan) {
        write_plan(out, plan);
    }
    return out;
}

std::string serialize_predicate(const PredicatePtr& predicate) {
    std::string out;
    if (predicate) {
        write_predicate(out, predicate);
    }
    return out;
}

PlanPtr parse_plan(std::string_view text) {
    Cursor cur(text);
    if (cur.at_end()) {
        throw ParseError("plan parse error: empty input", 0);
    }
    PlanPtr plan = parse_node(cur);
    if (!cur.at_end()) {
        cur.fail("unexpected trailing characters after the plan");
    }
    return plan;
}

} // namespace hetq
