#include "hetq/validate.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace hetq {

namespace {

bool is_numeric(ColumnType t) {
    return t == ColumnType::number;
}

bool comparable(ColumnType a, ColumnType b) {
    if (a == b) return true;
    // dates are stored as text, so the two compare freely
    return (a == ColumnType::text && b == ColumnType::date) ||
           (a == ColumnType::date && b == ColumnType::text);
}

class Checker {
public:
    explicit Checker(const Catalog& catalog) : catalog_(catalog) {}

    std::vector<std::string> violations;

    // Returns the operator's output schema; nullopt poisons the branch
    // after an unknown table so one mistake is not reported many times.
    std::optional<TableSchema> infer(const PlanPtr& node) {
        if (!node) {
            flag("plan is empty");
            return std::nullopt;
        }
        switch (node->kind) {
        case PlanNode::Kind::scan: return infer_scan(*node);
        case PlanNode::Kind::filter: return infer_filter(*node);
        case PlanNode::Kind::project: return infer_project(*node);
        case PlanNode::Kind::join: return infer_join(*node);
        case PlanNode::Kind::aggregate: return infer_aggregate(*node);
        case PlanNode::Kind::sort: return infer_sort(*node);
        case PlanNode::Kind::limit: return infer(node->input);
        }
        return std::nullopt;
    }

private:
    void flag(std::string message) { violations.push_back(std::move(message)); }

    const Column* resolve(const std::optional<TableSchema>& schema, const std::string& column,
                          const char* context) {
        if (!schema) return nullptr; // already poisoned
        const int idx = schema->find_column(column);
        if (idx < 0) {
            flag("unknown column " + column + " in " + context_name(*schema, context));
            return nullptr;
        }
        return &schema->columns[static_cast<std::size_t>(idx)];
    }

    static std::string context_name(const TableSchema& schema, const char* context) {
        if (!schema.name.empty()) {
            return std::string("table ") + schema.name + " (" + context + ")";
        }
        return std::string("the input of ") + context;
    }

    std::optional<TableSchema> infer_scan(const PlanNode& node) {
        const TableSchema* schema = catalog_.find(node.table);
        if (schema == nullptr) {
            flag("unknown table " + node.table);
            return std::nullopt;
        }
        return *schema;
    }

    std::optional<TableSchema> infer_filter(const PlanNode& node) {
        auto input = infer(node.input);
        check_predicate(node.predicate, input);
        return input;
    }

    void check_predicate(const PredicatePtr& p, const std::optional<TableSchema>& schema) {
        if (!p) {
            flag("filter has an empty predicate");
            return;
        }
        switch (p->kind) {
        case Predicate::Kind::comparison: check_comparison(p->comparison, schema); break;
        case Predicate::Kind::logical_not: check_predicate(p->lhs, schema); break;
        case Predicate::Kind::logical_and:
        case Predicate::Kind::logical_or:
            check_predicate(p->lhs, schema);
            check_predicate(p->rhs, schema);
            break;
        }
    }

    void check_comparison(const Comparison& c, const std::optional<TableSchema>& schema) {
        const Column* lhs = resolve(schema, c.column, "filter");
        if (c.rhs_is_column) {
            const Column* rhs = resolve(schema, c.rhs_column, "filter");
            if (lhs && rhs && !comparable(lhs->type, rhs->type)) {
                flag("incomparable column types in filter: " + c.column + " is " +
                     std::string(column_type_name(lhs->type)) + ", " + c.rhs_column + " is " +
                     std::string(column_type_name(rhs->type)));
            }
            return;
        }
        if (lhs == nullptr || is_null(c.literal.value)) {
            return; // null compares (to false) against any column
        }
        const char* wanted = nullptr;
        if (std::holds_alternative<double>(c.literal.value)) {
            if (!is_numeric(lhs->type)) wanted = "number";
            if (c.literal.percent && lhs->unit != Unit::percent) {
                flag("percent literal compared against non-percent column " + c.column);
            }
        } else if (std::holds_alternative<bool>(c.literal.value)) {
            if (lhs->type != ColumnType::boolean) wanted = "boolean";
        } else if (lhs->type != ColumnType::text && lhs->type != ColumnType::date) {
            wanted = "text";
        }
        if (wanted != nullptr) {
            flag("type mismatch in filter: column " + c.column + " is " +
                 std::string(column_type_name(lhs->type)) + " but the literal is " + wanted);
        }
    }

    std::optional<TableSchema> infer_project(const PlanNode& node) {
        auto input = infer(node.input);
        if (!input) return std::nullopt;
        TableSchema out;
        std::set<std::string> seen;
        for (const std::string& name : node.columns) {
            const Column* col = resolve(input, name, "projection");
            if (col == nullptr) continue;
            if (!seen.insert(casefold_name(col->name)).second) {
                flag("duplicate column " + name + " in projection");
                continue;
            }
            out.columns.push_back(*col);
        }
        if (node.columns.empty()) {
            flag("projection lists no columns");
        }
        return out;
    }

    std::optional<TableSchema> infer_join(const PlanNode& node) {
        auto left = infer(node.input);
        auto right = infer(node.right);
        const Column* lkey = resolve(left, node.key, "join left side");
        const Column* rkey = resolve(right, node.key, "join right side");
        if (lkey && rkey && !comparable(lkey->type, rkey->type)) {
            flag("join key " + node.key + " has incomparable types: " +
                 std::string(column_type_name(lkey->type)) + " vs " +
                 std::string(column_type_name(rkey->type)));
        }
        if (!left || !right) return std::nullopt;

        TableSchema out;
        out.columns = left->columns;
        for (const Column& col : right->columns) {
            if (rkey != nullptr && &col == rkey) continue; // right key is dropped
            if (out.find_column(col.name) >= 0) {
                flag("ambiguous column " + col.name + " appears on both sides of the join");
                continue;
            }
            out.columns.push_back(col);
        }
        return out;
    }

    std::optional<TableSchema> infer_aggregate(const PlanNode& node) {
        auto input = infer(node.input);
        TableSchema out;
        std::set<std::string> seen;
        for (const std::string& name : node.columns) {
            const Column* col = resolve(input, name, "group-by");
            if (col == nullptr) continue;
            if (!seen.insert(casefold_name(col->name)).second) {
                flag("duplicate group-by column " + name);
                continue;
            }
            out.columns.push_back(*col);
        }
        for (const AggSpec& agg : node.aggs) {
            Column result;
            result.name = agg.output;
            result.type = ColumnType::number;
            if (!agg.star) {
                const Column* col = resolve(input, agg.column, "aggregate");
                if (col != nullptr) {
                    if (agg.fn != AggFn::count && !is_numeric(col->type)) {
                        flag(std::string(agg_fn_name(agg.fn)) + " over non-numeric column " +
                             agg.column + " (" + std::string(column_type_name(col->type)) + ")");
                    }
                    if (agg.fn != AggFn::count) {
                        result.unit = col->unit; // averages of percents stay percents
                    }
                }
            }
            if (!seen.insert(casefold_name(result.name)).second) {
                flag("duplicate output column " + result.name + " in aggregate");
                continue;
            }
            out.columns.push_back(std::move(result));
        }
        if (node.aggs.empty() && node.columns.empty()) {
            flag("aggregate lists neither group columns nor aggregates");
        }
        return input ? std::optional<TableSchema>(std::move(out)) : std::nullopt;
    }

    std::optional<TableSchema> infer_sort(const PlanNode& node) {
        auto input = infer(node.input);
        resolve(input, node.sort_by, "sort");
        return input;
    }

    static std::string casefold_name(const std::string& name) {
        std::string out = name;
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    const Catalog& catalog_;
};

} // namespace

ValidationResult validate_plan(const PlanPtr& plan, const Catalog& catalog) {
    Checker checker(catalog);
    auto schema = checker.infer(plan);
    if (!checker.violations.empty() || !schema) {
        ValidationResult r;
        r.violations = std::move(checker.violations);
        if (r.violations.empty()) {
            r.violations.push_back("plan schema could not be inferred");
        }
        return r;
    }
    return ValidationResult::accept(plan, std::move(*schema));
}

} // namespace hetq
