#include "hetq/exec.hpp"

#include "hetq/error.hpp"

#include <algorithm>
#include <functional>

namespace hetq {

namespace {

struct Frame {
    TableSchema schema;
    std::vector<std::vector<Value>> rows;
    std::vector<std::vector<ProvenanceRef>> prov;
};

int column_index(const TableSchema& schema, const std::string& name) {
    const int idx = schema.find_column(name);
    if (idx < 0) {
        throw Error("column vanished between validation and execution: " + name);
    }
    return idx;
}

bool compare_cells(const Value& a, CompareOp op, const Value& b) {
    if (is_null(a) || is_null(b)) {
        return false; // null never satisfies a comparison
    }
    int order;
    if (const double* x = std::get_if<double>(&a)) {
        const double* y = std::get_if<double>(&b);
        if (y == nullptr) return false;
        order = *x < *y ? -1 : (*x > *y ? 1 : 0);
    } else if (const std::string* s = std::get_if<std::string>(&a)) {
        const std::string* t = std::get_if<std::string>(&b);
        if (t == nullptr) return false;
        order = s->compare(*t);
        order = order < 0 ? -1 : (order > 0 ? 1 : 0);
    } else {
        const bool* p = std::get_if<bool>(&a);
        const bool* q = std::get_if<bool>(&b);
        if (p == nullptr || q == nullptr) return false;
        order = static_cast<int>(*p) - static_cast<int>(*q);
    }
    switch (op) {
    case CompareOp::eq: return order == 0;
    case CompareOp::ne: return order != 0;
    case CompareOp::lt: return order < 0;
    case CompareOp::le: return order <= 0;
    case CompareOp::gt: return order > 0;
    case CompareOp::ge: return order >= 0;
    }
    return false;
}

using RowTest = std::function<bool(const std::vector<Value>&)>;

RowTest compile_predicate(const PredicatePtr& p, const TableSchema& schema) {
    switch (p->kind) {
    case Predicate::Kind::comparison: {
        const Comparison& c = p->comparison;
        const int lhs = column_index(schema, c.column);
        if (c.rhs_is_column) {
            const int rhs = column_index(schema, c.rhs_column);
            const CompareOp op = c.op;
            return [lhs, rhs, op](const std::vector<Value>& row) {
                return compare_cells(row[static_cast<std::size_t>(lhs)], op,
                                     row[static_cast<std::size_t>(rhs)]);
            };
        }
        const Value literal = c.literal.value;
        const CompareOp op = c.op;
        return [lhs, op, literal](const std::vector<Value>& row) {
            return compare_cells(row[static_cast<std::size_t>(lhs)], op, literal);
        };
    }
    case Predicate::Kind::logical_not: {
        RowTest inner = compile_predicate(p->lhs, schema);
        return [inner](const std::vector<Value>& row) { return !inner(row); };
    }
    case Predicate::Kind::logical_and: {
        RowTest lhs = compile_predicate(p->lhs, schema);
        RowTest rhs = compile_predicate(p->rhs, schema);
        return [lhs, rhs](const std::vector<Value>& row) { return lhs(row) && rhs(row); };
    }
    case Predicate::Kind::logical_or: {
        RowTest lhs = compile_predicate(p->lhs, schema);
        RowTest rhs = compile_predicate(p->rhs, schema);
        return [lhs, rhs](const std::vector<Value>& row) { return lhs(row) || rhs(row); };
    }
    }
    throw Error("unreachable predicate kind");
}

std::vector<ProvenanceRef> merge_prov(const std::vector<ProvenanceRef>& a,
                                      const std::vector<ProvenanceRef>& b) {
    std::vector<ProvenanceRef> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

struct KahanSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double v) {
        const double y = v - compensation;
        const double t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
};

Frame eval(const PlanPtr& node, const TableSet& tables);

Frame eval_scan(const PlanNode& node, const TableSet& tables) {
    auto it = tables.find(node.table);
    if (it == tables.end()) {
        throw Error("table not present at execution time: " + node.table);
    }
    Frame f;
    f.schema = it->second.schema;
    f.rows = it->second.rows;
    f.prov.reserve(f.rows.size());
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        f.prov.push_back({{node.table, i}});
    }
    return f;
}

Frame eval_filter(const PlanNode& node, const TableSet& tables) {
    Frame in = eval(node.input, tables);
    const RowTest test = compile_predicate(node.predicate, in.schema);
    Frame out;
    out.schema = in.schema;
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
        if (test(in.rows[i])) {
            out.rows.push_back(std::move(in.rows[i]));
            out.prov.push_back(std::move(in.prov[i]));
        }
    }
    return out;
}

Frame eval_project(const PlanNode& node, const TableSet& tables) {
    Frame in = eval(node.input, tables);
    std::vector<std::size_t> picks;
    Frame out;
    for (const std::string& name : node.columns) {
        const std::size_t idx = static_cast<std::size_t>(column_index(in.schema, name));
        picks.push_back(idx);
        out.schema.columns.push_back(in.schema.columns[idx]);
    }
    out.rows.reserve(in.rows.size());
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
        std::vector<Value> row;
        row.reserve(picks.size());
        for (std::size_t idx : picks) {
            row.push_back(in.rows[i][idx]);
        }
        out.rows.push_back(std::move(row));
        out.prov.push_back(std::move(in.prov[i]));
    }
    return out;
}

Frame eval_join(const PlanNode& node, const TableSet& tables) {
    Frame left = eval(node.input, tables);
    Frame right = eval(node.right, tables);
    const std::size_t lkey = static_cast<std::size_t>(column_index(left.schema, node.key));
    const std::size_t rkey = static_cast<std::size_t>(column_index(right.schema, node.key));

    Frame out;
    out.schema.columns = left.schema.columns;
    for (std::size_t c = 0; c < right.schema.columns.size(); ++c) {
        if (c != rkey) {
            out.schema.columns.push_back(right.schema.columns[c]);
        }
    }

    // hash-ish join: right rows bucketed by key under the canonical order
    std::map<Value, std::vector<std::size_t>, decltype(&value_less)> buckets(&value_less);
    for (std::size_t r = 0; r < right.rows.size(); ++r) {
        const Value& key = right.rows[r][rkey];
        if (is_null(key)) continue; // null keys never match
        buckets[key].push_back(r);
    }
    for (std::size_t l = 0; l < left.rows.size(); ++l) {
        const Value& key = left.rows[l][lkey];
        if (is_null(key)) continue;
        auto it = buckets.find(key);
        if (it == buckets.end()) continue;
        for (std::size_t r : it->second) {
            std::vector<Value> row = left.rows[l];
            for (std::size_t c = 0; c < right.rows[r].size(); ++c) {
                if (c != rkey) {
                    row.push_back(right.rows[r][c]);
                }
            }
            out.rows.push_back(std::move(row));
            out.prov.push_back(merge_prov(left.prov[l], right.prov[r]));
        }
    }
    return out;
}

Frame eval_aggregate(const PlanNode& node, const TableSet& tables) {
    Frame in = eval(node.input, tables);

    std::vector<std::size_t> group_idx;
    Frame out;
    for (const std::string& name : node.columns) {
        const std::size_t idx = static_cast<std::size_t>(column_index(in.schema, name));
        group_idx.push_back(idx);
        out.schema.columns.push_back(in.schema.columns[idx]);
    }
    std::vector<std::size_t> agg_idx(node.aggs.size(), 0);
    for (std::size_t a = 0; a < node.aggs.size(); ++a) {
        const AggSpec& spec = node.aggs[a];
        Column col;
        col.name = spec.output;
        col.type = ColumnType::number;
        if (!spec.star) {
            agg_idx[a] = static_cast<std::size_t>(column_index(in.schema, spec.column));
            if (spec.fn != AggFn::count) {
                col.unit = in.schema.columns[agg_idx[a]].unit;
            }
        }
        out.schema.columns.push_back(std::move(col));
    }

    // groups in first-appearance order; the map only finds them
    auto key_less = [](const std::vector<Value>& a, const std::vector<Value>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
    };
    std::map<std::vector<Value>, std::size_t, decltype(key_less)> group_of(key_less);
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::vector<Value>> keys;
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
        std::vector<Value> key;
        key.reserve(group_idx.size());
        for (std::size_t idx : group_idx) {
            key.push_back(in.rows[i][idx]);
        }
        auto [it, inserted] = group_of.try_emplace(key, members.size());
        if (inserted) {
            members.emplace_back();
            keys.push_back(std::move(key));
        }
        members[it->second].push_back(i);
    }
    // a global aggregate over empty input yields an empty result, so
    // every output row keeps nonempty provenance

    for (std::size_t g = 0; g < members.size(); ++g) {
        std::vector<Value> row = keys[g];
        std::vector<ProvenanceRef> prov;
        for (std::size_t i : members[g]) {
            prov = merge_prov(prov, in.prov[i]);
        }
        for (std::size_t a = 0; a < node.aggs.size(); ++a) {
            const AggSpec& spec = node.aggs[a];
            if (spec.fn == AggFn::count && spec.star) {
                row.push_back(static_cast<double>(members[g].size()));
                continue;
            }
            if (spec.fn == AggFn::count) {
                std::size_t non_null = 0;
                for (std::size_t i : members[g]) {
                    if (!is_null(in.rows[i][agg_idx[a]])) {
                        ++non_null;
                    }
                }
                row.push_back(static_cast<double>(non_null));
                continue;
            }
            KahanSum sum;
            std::size_t count = 0;
            double low = 0.0;
            double high = 0.0;
            for (std::size_t i : members[g]) {
                const Value& cell = in.rows[i][agg_idx[a]];
                if (const double* v = std::get_if<double>(&cell)) {
                    sum.add(*v);
                    if (count == 0 || *v < low) low = *v;
                    if (count == 0 || *v > high) high = *v;
                    ++count;
                }
            }
            if (count == 0) {
                row.emplace_back(); // SUM/AVG/MIN/MAX of nothing is null
            } else if (spec.fn == AggFn::sum) {
                row.push_back(sum.sum);
            } else if (spec.fn == AggFn::avg) {
                row.push_back(sum.sum / static_cast<double>(count));
            } else if (spec.fn == AggFn::min) {
                row.push_back(low);
            } else {
                row.push_back(high);
            }
        }
        out.rows.push_back(std::move(row));
        out.prov.push_back(std::move(prov));
    }
    return out;
}

Frame eval_sort(const PlanNode& node, const TableSet& tables) {
    Frame in = eval(node.input, tables);
    const std::size_t by = static_cast<std::size_t>(column_index(in.schema, node.sort_by));

    std::vector<std::size_t> order(in.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    const bool desc = node.descending;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Value& va = in.rows[a][by];
        const Value& vb = in.rows[b][by];
        if (is_null(va) || is_null(vb)) {
            return !is_null(va) && is_null(vb); // nulls sort last either way
        }
        return desc ? value_less(vb, va) : value_less(va, vb);
    });

    Frame out;
    out.schema = std::move(in.schema);
    out.rows.reserve(order.size());
    for (std::size_t i : order) {
        out.rows.push_back(std::move(in.rows[i]));
        out.prov.push_back(std::move(in.prov[i]));
    }
    return out;
}

Frame eval(const PlanPtr& node, const TableSet& tables) {
    switch (node->kind) {
    case PlanNode::Kind::scan: return eval_scan(*node, tables);
    case PlanNode::Kind::filter: return eval_filter(*node, tables);
    case PlanNode::Kind::project: return eval_project(*node, tables);
    case PlanNode::Kind::join: return eval_join(*node, tables);
    case PlanNode::Kind::aggregate: return eval_aggregate(*node, tables);
    case PlanNode::Kind::sort: return eval_sort(*node, tables);
    case PlanNode::Kind::limit: {
        Frame in = eval(node->input, tables);
        if (in.rows.size() > node->limit) {
            in.rows.resize(node->limit);
            in.prov.resize(node->limit);
        }
        return in;
    }
    }
    throw Error("unreachable plan kind");
}

} // namespace

bool value_less(const Value& a, const Value& b) {
    if (a.index() != b.index()) {
        return a.index() < b.index();
    }
    if (const double* x = std::get_if<double>(&a)) {
        return *x < *std::get_if<double>(&b);
    }
    if (const std::string* s = std::get_if<std::string>(&a)) {
        return *s < *std::get_if<std::string>(&b);
    }
    if (const bool* p = std::get_if<bool>(&a)) {
        return static_cast<int>(*p) < static_cast<int>(*std::get_if<bool>(&b));
    }
    return false; // both null
}

bool value_equal(const Value& a, const Value& b) {
    return !value_less(a, b) && !value_less(b, a);
}

ResultTable execute(const ValidatedPlan& plan, const TableSet& tables) {
    Frame f = eval(plan.plan(), tables);
    ResultTable out;
    out.schema = plan.output_schema();
    out.rows = std::move(f.rows);
    out.provenance = std::move(f.prov);
    return out;
}

bool results_equivalent(const ResultTable& a, const ResultTable& b) {
    if (a.schema.columns.size() != b.schema.columns.size() || a.rows.size() != b.rows.size()) {
        return false;
    }
    for (std::size_t c = 0; c < a.schema.columns.size(); ++c) {
        if (a.schema.columns[c].name != b.schema.columns[c].name ||
            a.schema.columns[c].type != b.schema.columns[c].type) {
            return false;
        }
    }

    using Entry = std::pair<std::vector<Value>, std::vector<ProvenanceRef>>;
    auto canonical = [](const ResultTable& t) {
        std::vector<Entry> entries;
        entries.reserve(t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            entries.emplace_back(t.rows[i], t.provenance[i]);
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
            const bool less = std::lexicographical_compare(x.first.begin(), x.first.end(),
                                                           y.first.begin(), y.first.end(),
                                                           value_less);
            if (less) return true;
            const bool greater = std::lexicographical_compare(y.first.begin(), y.first.end(),
                                                              x.first.begin(), x.first.end(),
                                                              value_less);
            if (greater) return false;
            return x.second < y.second;
        });
        return entries;
    };
    const auto ca = canonical(a);
    const auto cb = canonical(b);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (ca[i].second != cb[i].second) return false;
        if (ca[i].first.size() != cb[i].first.size()) return false;
        for (std::size_t c = 0; c < ca[i].first.size(); ++c) {
            if (!value_equal(ca[i].first[c], cb[i].first[c])) return false;
        }
    }
    return true;
}

} // namespace hetq
