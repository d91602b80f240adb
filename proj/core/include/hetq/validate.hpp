#pragma once

#include "hetq/plan.hpp"
#include "hetq/table.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hetq {

// Proof token that a plan passed validation against a catalog; the
// only way to obtain one is validate_plan, so execute can assume
// name/type soundness.
class ValidatedPlan {
public:
    const PlanPtr& plan() const { return plan_; }
    const TableSchema& output_schema() const { return output_schema_; }

private:
    friend struct ValidationResult;
    ValidatedPlan(PlanPtr plan, TableSchema output_schema)
        : plan_(std::move(plan)), output_schema_(std::move(output_schema)) {}

    PlanPtr plan_;
    TableSchema output_schema_;
};

struct ValidationResult {
    std::optional<ValidatedPlan> plan;    // engaged iff violations is empty
    std::vector<std::string> violations;  // all of them, not just the first

    bool ok() const { return violations.empty(); }

    static ValidationResult accept(PlanPtr p, TableSchema schema) {
        ValidationResult r;
        r.plan.emplace(ValidatedPlan(std::move(p), std::move(schema)));
        return r;
    }
};

// Checks, over the whole tree: scanned tables exist; every column
// reference resolves through operator scoping; predicate literal types
// match column types (percent literals only against percent columns);
// SUM/AVG/MIN/MAX inputs are numeric; join keys exist on both sides
// with comparable types and no ambiguous output names; group columns
// resolve in their input.
ValidationResult validate_plan(const PlanPtr& plan, const Catalog& catalog);

} // namespace hetq
