#ifndef DEEPLCP_SEMANTIC_HPP
#define DEEPLCP_SEMANTIC_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "deeplcp/matrix.hpp"
#include "deeplcp/records.hpp"
#include "deeplcp/rules.hpp"
#include "deeplcp/schema.hpp"

namespace deeplcp {

inline constexpr std::size_t kRawRows = kAttributeCount;
inline constexpr std::size_t kReducedRows = kGroupCount;

enum class MatrixForm { raw, reduced };

// Origin of one reduced-matrix cell in the raw matrix.
struct CellSource {
    std::size_t row = 0;        // reduced row (group)
    std::size_t col = 0;        // reduced column
    std::size_t attribute = 0;  // raw row
    std::size_t slot = 0;       // raw column

    friend bool operator==(const CellSource&, const CellSource&) = default;
};

struct SemanticMatrix {
    MatrixForm form = MatrixForm::raw;
    Matrix values;
    // Reduced form only: one entry per nonzero cell, in row-major order.
    std::vector<CellSource> provenance;

    friend bool operator==(const SemanticMatrix&, const SemanticMatrix&) = default;
};

struct Placement {
    std::size_t attribute = 0;
    std::size_t offset = 0;  // first column in the group row
    std::size_t width = 0;   // slots reserved (the rule's emitted length)

    friend bool operator==(const Placement&, const Placement&) = default;
};

// Where each attribute's weights land in the reduced matrix. Offsets come from
// rule widths, never from record values, so the layout is record-independent.
struct GroupingPlan {
    std::vector<std::vector<Placement>> groups;  // 18 groups, members in schema order

    friend bool operator==(const GroupingPlan&, const GroupingPlan&) = default;
};

// Consecutive offsets in schema order. Throws PlanOverflow when a group's
// widths add up to more than 13.
GroupingPlan make_plan(const Schema& schema, const RuleSet& rules);

// Throws PlanOverflow / ShapeError if the plan does not cover every attribute
// exactly once in its schema group with non-overlapping in-range spans at
// least as wide as the attribute's rule.
void validate_plan(const GroupingPlan& plan, const Schema& schema, const RuleSet& rules);

// Plan text: one line per group, "<group>: <attribute>@<offset>+<width> ...".
std::string format_plan(const GroupingPlan& plan, const Schema& schema);
GroupingPlan parse_plan(std::string_view text, const Schema& schema, const std::string& source = "<plan>");

SemanticMatrix build_raw_matrix(const PersonRecord& record, const RuleSet& rules, const Schema& schema);

// Concatenates each group's member rows at the plan offsets. Throws ShapeError
// for a non-raw input, PlanOverflow if a raw row has weights beyond its
// placement width (they would be lost).
SemanticMatrix reduce(const SemanticMatrix& raw, const GroupingPlan& plan);

// Rebuilds the raw matrix from a reduced matrix's provenance.
SemanticMatrix unreduce(const SemanticMatrix& reduced);

SemanticMatrix transform(const PersonRecord& record, const RuleSet& rules, const Schema& schema,
                         const GroupingPlan& plan);
std::vector<SemanticMatrix> transform_batch(std::span<const PersonRecord> records, const RuleSet& rules,
                                            const Schema& schema, const GroupingPlan& plan);

// Schema, rules and plan bundled for repeated transforms.
struct SemanticContext {
    Schema schema;
    RuleSet rules;
    GroupingPlan plan;

    static SemanticContext make(Schema schema, RuleSet rules);
    static SemanticContext defaults();

    SemanticMatrix transform(const PersonRecord& record) const {
        return deeplcp::transform(record, rules, schema, plan);
    }
};

// Text grid: one row per line, space-separated, 6 fractional digits.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in, const std::string& source = "<matrix>");

}  // namespace deeplcp

#endif  // DEEPLCP_SEMANTIC_HPP
