// The brute-force reference evaluator. Everything here is written
// independently of exec.cpp on purpose: own column lookup, own
// comparison logic, own grouping and sorting, no shared helpers, no
// shortcuts. Keep it naive; its only job is to disagree with execute
// when execute is wrong.

#include "hetq/error.hpp"
#include "hetq/exec.hpp"

#include <cctype>

namespace hetq {

namespace {

struct NaiveRows {
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;
    std::vector<std::vector<ProvenanceRef>> origins;
};

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::size_t find_col(const NaiveRows& t, const std::string& name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (lower(t.columns[i].name) == lower(name)) {
            return i;
        }
    }
    throw Error("oracle: no such column: " + name);
}

bool cells_equal(const Value& a, const Value& b) {
    if (is_null(a) && is_null(b)) return true;
    if (is_null(a) || is_null(b)) return false;
    if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
        return std::get<double>(a) == std::get<double>(b);
    }
    if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
        return std::get<bool>(a) == std::get<bool>(b);
    }
    if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
        return std::get<std::string>(a) == std::get<std::string>(b);
    }
    return false;
}

// -1 / 0 / +1, or -2 when the pair is not comparable
int cells_order(const Value& a, const Value& b) {
    if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
        const double x = std::get<double>(a);
        const double y = std::get<double>(b);
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
        const std::string& x = std::get<std::string>(a);
        const std::string& y = std::get<std::string>(b);
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
        const int x = std::get<bool>(a) ? 1 : 0;
        const int y = std::get<bool>(b) ? 1 : 0;
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    return -2;
}

bool predicate_holds(const Predicate& p, const NaiveRows& t, const std::vector<Value>& row) {
    if (p.kind == Predicate::Kind::logical_not) {
        return !predicate_holds(*p.lhs, t, row);
    }
    if (p.kind == Predicate::Kind::logical_and) {
        return predicate_holds(*p.lhs, t, row) && predicate_holds(*p.rhs, t, row);
    }
    if (p.kind == Predicate::Kind::logical_or) {
        return predicate_holds(*p.lhs, t, row) || predicate_holds(*p.rhs, t, row);
    }

    const Comparison& c = p.comparison;
    const Value& left = row[find_col(t, c.column)];
    const Value right = c.rhs_is_column ? row[find_col(t, c.rhs_column)] : c.literal.value;
    if (is_null(left) || is_null(right)) {
        return false;
    }
    const int order = cells_order(left, right);
    if (order == -2) {
        return false;
    }
    switch (c.op) {
    case CompareOp::eq: return order == 0;
    case CompareOp::ne: return order != 0;
    case CompareOp::lt: return order == -1;
    case CompareOp::le: return order != 1;
    case CompareOp::gt: return order == 1;
    case CompareOp::ge: return order != -1;
    }
    return false;
}

std::vector<ProvenanceRef> sorted_origin(std::vector<ProvenanceRef> refs) {
    // insertion sort, matching the "no shortcuts" rule
    for (std::size_t i = 1; i < refs.size(); ++i) {
        ProvenanceRef item = refs[i];
        std::size_t j = i;
        while (j > 0 && item < refs[j - 1]) {
            refs[j] = refs[j - 1];
            --j;
        }
        refs[j] = item;
    }
    return refs;
}

NaiveRows run(const PlanNode& node, const TableSet& tables);

NaiveRows run_scan(const PlanNode& node, const TableSet& tables) {
    auto it = tables.find(node.table);
    if (it == tables.end()) {
        throw Error("oracle: no such table: " + node.table);
    }
    NaiveRows out;
    out.columns = it->second.schema.columns;
    for (std::size_t i = 0; i < it->second.rows.size(); ++i) {
        out.rows.push_back(it->second.rows[i]);
        out.origins.push_back({ProvenanceRef{node.table, i}});
    }
    return out;
}

NaiveRows run_join(const PlanNode& node, const TableSet& tables) {
    const NaiveRows left = run(*node.input, tables);
    const NaiveRows right = run(*node.right, tables);
    const std::size_t lk = find_col(left, node.key);
    const std::size_t rk = find_col(right, node.key);

    NaiveRows out;
    out.columns = left.columns;
    for (std::size_t c = 0; c < right.columns.size(); ++c) {
        if (c != rk) {
            out.columns.push_back(right.columns[c]);
        }
    }
    for (std::size_t i = 0; i < left.rows.size(); ++i) {
        for (std::size_t j = 0; j < right.rows.size(); ++j) {
            const Value& a = left.rows[i][lk];
            const Value& b = right.rows[j][rk];
            if (is_null(a) || is_null(b) || !cells_equal(a, b)) {
                continue;
            }
            std::vector<Value> row = left.rows[i];
            for (std::size_t c = 0; c < right.rows[j].size(); ++c) {
                if (c != rk) {
                    row.push_back(right.rows[j][c]);
                }
            }
            std::vector<ProvenanceRef> origin = left.origins[i];
            for (const ProvenanceRef& ref : right.origins[j]) {
                origin.push_back(ref);
            }
            out.rows.push_back(row);
            out.origins.push_back(sorted_origin(origin));
        }
    }
    return out;
}

NaiveRows run_aggregate(const PlanNode& node, const TableSet& tables) {
    const NaiveRows in = run(*node.input, tables);

    NaiveRows out;
    for (const std::string& g : node.columns) {
        out.columns.push_back(in.columns[find_col(in, g)]);
    }
    for (const AggSpec& spec : node.aggs) {
        Column col;
        col.name = spec.output;
        col.type = ColumnType::number;
        out.columns.push_back(col);
    }

    // discover groups by scanning previously seen keys
    std::vector<std::vector<Value>> group_keys;
    std::vector<std::vector<std::size_t>> group_rows;
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
        std::vector<Value> key;
        for (const std::string& g : node.columns) {
            key.push_back(in.rows[i][find_col(in, g)]);
        }
        std::size_t found = group_keys.size();
        for (std::size_t k = 0; k < group_keys.size(); ++k) {
            bool same = true;
            for (std::size_t c = 0; c < key.size(); ++c) {
                if (!cells_equal(key[c], group_keys[k][c])) {
                    same = false;
                    break;
                }
            }
            if (same) {
                found = k;
                break;
            }
        }
        if (found == group_keys.size()) {
            group_keys.push_back(key);
            group_rows.push_back({});
        }
        group_rows[found].push_back(i);
    }

    for (std::size_t k = 0; k < group_keys.size(); ++k) {
        std::vector<Value> row = group_keys[k];
        std::vector<ProvenanceRef> origin;
        for (std::size_t i : group_rows[k]) {
            for (const ProvenanceRef& ref : in.origins[i]) {
                origin.push_back(ref);
            }
        }
        for (const AggSpec& spec : node.aggs) {
            if (spec.fn == AggFn::count) {
                double count = 0;
                if (spec.star) {
                    count = static_cast<double>(group_rows[k].size());
                } else {
                    const std::size_t col = find_col(in, spec.column);
                    for (std::size_t i : group_rows[k]) {
                        if (!is_null(in.rows[i][col])) {
                            count += 1;
                        }
                    }
                }
                row.push_back(count);
                continue;
            }
            const std::size_t col = find_col(in, spec.column);
            double total = 0;
            double smallest = 0;
            double largest = 0;
            double seen = 0;
            for (std::size_t i : group_rows[k]) {
                if (!std::holds_alternative<double>(in.rows[i][col])) {
                    continue;
                }
                const double v = std::get<double>(in.rows[i][col]);
                total = total + v;
                if (seen == 0 || v < smallest) smallest = v;
                if (seen == 0 || v > largest) largest = v;
                seen += 1;
            }
            if (seen == 0) {
                row.push_back(Value{});
            } else if (spec.fn == AggFn::sum) {
                row.push_back(total);
            } else if (spec.fn == AggFn::avg) {
                row.push_back(total / seen);
            } else if (spec.fn == AggFn::min) {
                row.push_back(smallest);
            } else {
                row.push_back(largest);
            }
        }
        out.rows.push_back(row);
        out.origins.push_back(sorted_origin(origin));
    }
    return out;
}

NaiveRows run(const PlanNode& node, const TableSet& tables) {
    switch (node.kind) {
    case PlanNode::Kind::scan:
        return run_scan(node, tables);
    case PlanNode::Kind::filter: {
        const NaiveRows in = run(*node.input, tables);
        NaiveRows out;
        out.columns = in.columns;
        for (std::size_t i = 0; i < in.rows.size(); ++i) {
            if (predicate_holds(*node.predicate, in, in.rows[i])) {
                out.rows.push_back(in.rows[i]);
                out.origins.push_back(in.origins[i]);
            }
        }
        return out;
    }
    case PlanNode::Kind::project: {
        const NaiveRows in = run(*node.input, tables);
        NaiveRows out;
        for (const std::string& name : node.columns) {
            out.columns.push_back(in.columns[find_col(in, name)]);
        }
        for (std::size_t i = 0; i < in.rows.size(); ++i) {
            std::vector<Value> row;
            for (const std::string& name : node.columns) {
                row.push_back(in.rows[i][find_col(in, name)]);
            }
            out.rows.push_back(row);
            out.origins.push_back(in.origins[i]);
        }
        return out;
    }
    case PlanNode::Kind::join:
        return run_join(node, tables);
    case PlanNode::Kind::aggregate:
        return run_aggregate(node, tables);
    case PlanNode::Kind::sort: {
        const NaiveRows in = run(*node.input, tables);
        const std::size_t col = find_col(in, node.sort_by);
        // stable insertion sort; a row moves up only when strictly
        // before its neighbor, nulls always last
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < in.rows.size(); ++i) {
            order.push_back(i);
        }
        auto before = [&](std::size_t a, std::size_t b) {
            const Value& va = in.rows[a][col];
            const Value& vb = in.rows[b][col];
            if (is_null(va)) return false;
            if (is_null(vb)) return true;
            const int ord = cells_order(va, vb);
            if (ord == -2 || ord == 0) return false;
            return node.descending ? ord == 1 : ord == -1;
        };
        for (std::size_t i = 1; i < order.size(); ++i) {
            const std::size_t item = order[i];
            std::size_t j = i;
            while (j > 0 && before(item, order[j - 1])) {
                order[j] = order[j - 1];
                --j;
            }
            order[j] = item;
        }
        NaiveRows out;
        out.columns = in.columns;
        for (std::size_t i : order) {
            out.rows.push_back(in.rows[i]);
            out.origins.push_back(in.origins[i]);
        }
        return out;
    }
    case PlanNode::Kind::limit: {
        const NaiveRows in = run(*node.input, tables);
        NaiveRows out;
        out.columns = in.columns;
        for (std::size_t i = 0; i < in.rows.size() && i < node.limit; ++i) {
            out.rows.push_back(in.rows[i]);
            out.origins.push_back(in.origins[i]);
        }
        return out;
    }
    }
    throw Error("oracle: unknown plan node");
}

} // namespace

ResultTable oracle_execute(const PlanPtr& plan, const TableSet& tables) {
    if (!plan) {
        throw Error("oracle: empty plan");
    }
    const NaiveRows result = run(*plan, tables);
    ResultTable out;
    out.schema.columns = result.columns;
    out.rows = result.rows;
    out.provenance = result.origins;
    return out;
}

} // namespace hetq
