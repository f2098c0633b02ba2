#include "deeplcp/semantic.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "deeplcp/error.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

GroupingPlan make_plan(const Schema& schema, const RuleSet& rules) {
    if (rules.size() != schema.attributes().size()) {
        throw ShapeError("rule set does not cover the schema");
    }
    GroupingPlan plan;
    plan.groups.resize(schema.groups().size());
    for (std::size_t g = 0; g < schema.groups().size(); ++g) {
        std::size_t offset = 0;
        for (std::size_t attr : schema.groups()[g].members) {
            const std::size_t width = rules.for_attribute(attr).width();
            plan.groups[g].push_back({attr, offset, width});
            offset += width;
        }
        if (offset > kWordSlots) {
            throw PlanOverflow("group '" + schema.groups()[g].name + "' needs " + std::to_string(offset) +
                               " word slots, only " + std::to_string(kWordSlots) + " available");
        }
    }
    return plan;
}

void validate_plan(const GroupingPlan& plan, const Schema& schema, const RuleSet& rules) {
    if (plan.groups.size() != schema.groups().size()) {
        throw ShapeError("plan has " + std::to_string(plan.groups.size()) + " groups, schema has " +
                         std::to_string(schema.groups().size()));
    }
    std::vector<bool> seen(schema.attributes().size(), false);
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        std::vector<bool> used(kWordSlots, false);
        for (const auto& p : plan.groups[g]) {
            if (p.attribute >= seen.size() || schema.attribute(p.attribute).group != g) {
                throw ShapeError("plan places attribute " + std::to_string(p.attribute) + " outside its schema group");
            }
            if (seen[p.attribute]) throw ShapeError("plan places attribute '" + schema.attribute(p.attribute).name + "' twice");
            seen[p.attribute] = true;
            if (p.width < rules.for_attribute(p.attribute).width()) {
                throw PlanOverflow("plan reserves " + std::to_string(p.width) + " slots for '" +
                                   schema.attribute(p.attribute).name + "', its rule emits " +
                                   std::to_string(rules.for_attribute(p.attribute).width()));
            }
            if (p.offset + p.width > kWordSlots) {
                throw PlanOverflow("placement of '" + schema.attribute(p.attribute).name + "' runs past column " +
                                   std::to_string(kWordSlots));
            }
            for (std::size_t c = p.offset; c < p.offset + p.width; ++c) {
                if (used[c]) throw ShapeError("overlapping placements in group " + std::to_string(g));
                used[c] = true;
            }
        }
    }
    for (std::size_t a = 0; a < seen.size(); ++a) {
        if (!seen[a]) throw ShapeError("plan omits attribute '" + schema.attribute(a).name + "'");
    }
}

std::string format_plan(const GroupingPlan& plan, const Schema& schema) {
    std::ostringstream os;
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        os << schema.groups().at(g).name << ':';
        for (const auto& p : plan.groups[g]) {
            os << ' ' << schema.attribute(p.attribute).name << '@' << p.offset << '+' << p.width;
        }
        os << '\n';
    }
    return os.str();
}

GroupingPlan parse_plan(std::string_view text, const Schema& schema, const std::string& source) {
    GroupingPlan plan;
    plan.groups.resize(schema.groups().size());
    std::vector<bool> group_seen(schema.groups().size(), false);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto colon = body.find(':');
        if (colon == std::string_view::npos) throw ConfigError(source, line_no, "expected '<group>: ...'");
        const auto group_name = trim(body.substr(0, colon));
        std::size_t g = 0;
        while (g < schema.groups().size() && schema.groups()[g].name != group_name) ++g;
        if (g == schema.groups().size()) throw ConfigError(source, line_no, "unknown group '" + std::string(group_name) + "'");
        if (group_seen[g]) throw ConfigError(source, line_no, "group '" + std::string(group_name) + "' listed twice");
        group_seen[g] = true;

        std::istringstream items{std::string(body.substr(colon + 1))};
        std::string item;
        while (items >> item) {
            const auto at = item.find('@');
            const auto plus = item.find('+', at == std::string::npos ? 0 : at);
            if (at == std::string::npos || plus == std::string::npos) {
                throw ConfigError(source, line_no, "expected '<attribute>@<offset>+<width>', found '" + item + "'");
            }
            const auto attr = schema.index_of(item.substr(0, at));
            const auto offset = parse_integer(std::string_view(item).substr(at + 1, plus - at - 1));
            const auto width = parse_integer(std::string_view(item).substr(plus + 1));
            if (!attr) throw ConfigError(source, line_no, "unknown attribute in '" + item + "'");
            if (!offset || !width || *offset < 0 || *width < 0) {
                throw ConfigError(source, line_no, "bad offset/width in '" + item + "'");
            }
            plan.groups[g].push_back({*attr, static_cast<std::size_t>(*offset), static_cast<std::size_t>(*width)});
        }
    }
    return plan;
}

SemanticMatrix build_raw_matrix(const PersonRecord& record, const RuleSet& rules, const Schema& schema) {
    if (record.values.size() != schema.attributes().size()) {
        throw ShapeError("record has " + std::to_string(record.values.size()) + " values, schema has " +
                         std::to_string(schema.attributes().size()));
    }
    const auto rows = evaluate(rules, record);
    SemanticMatrix raw;
    raw.form = MatrixForm::raw;
    raw.values = Matrix(rows.size(), kWordSlots);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < kWordSlots; ++c) raw.values(r, c) = rows[r][c];
    }
    return raw;
}

SemanticMatrix reduce(const SemanticMatrix& raw, const GroupingPlan& plan) {
    if (raw.form != MatrixForm::raw || raw.values.rows() != kRawRows || raw.values.cols() != kWordSlots) {
        throw ShapeError("reduce expects a raw " + std::to_string(kRawRows) + "x" + std::to_string(kWordSlots) +
                         " matrix");
    }
    if (plan.groups.size() != kReducedRows) throw ShapeError("plan must have " + std::to_string(kReducedRows) + " groups");

    SemanticMatrix out;
    out.form = MatrixForm::reduced;
    out.values = Matrix(kReducedRows, kWordSlots);
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        for (const auto& p : plan.groups[g]) {
            if (p.attribute >= kRawRows || p.offset + p.width > kWordSlots) {
                throw PlanOverflow("placement of attribute " + std::to_string(p.attribute) + " in group " +
                                   std::to_string(g) + " exceeds " + std::to_string(kWordSlots) + " slots");
            }
            const auto src = raw.values.row(p.attribute);
            for (std::size_t s = p.width; s < kWordSlots; ++s) {
                if (src[s] != 0.0) {
                    throw PlanOverflow("raw row " + std::to_string(p.attribute) + " has a weight in slot " +
                                       std::to_string(s) + ", beyond its placement width " + std::to_string(p.width));
                }
            }
            for (std::size_t s = 0; s < p.width; ++s) out.values(g, p.offset + s) = src[s];
        }
    }
    // Provenance in row-major order of the reduced matrix.
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        for (std::size_t c = 0; c < kWordSlots; ++c) {
            if (out.values(g, c) == 0.0) continue;
            for (const auto& p : plan.groups[g]) {
                if (c >= p.offset && c < p.offset + p.width) {
                    out.provenance.push_back({g, c, p.attribute, c - p.offset});
                    break;
                }
            }
        }
    }
    return out;
}

SemanticMatrix unreduce(const SemanticMatrix& reduced) {
    if (reduced.form != MatrixForm::reduced) throw ShapeError("unreduce expects a reduced matrix");
    SemanticMatrix raw;
    raw.form = MatrixForm::raw;
    raw.values = Matrix(kRawRows, kWordSlots);
    for (const auto& src : reduced.provenance) raw.values(src.attribute, src.slot) = reduced.values(src.row, src.col);
    return raw;
}

SemanticMatrix transform(const PersonRecord& record, const RuleSet& rules, const Schema& schema,
                         const GroupingPlan& plan) {
    return reduce(build_raw_matrix(record, rules, schema), plan);
}

std::vector<SemanticMatrix> transform_batch(std::span<const PersonRecord> records, const RuleSet& rules,
                                            const Schema& schema, const GroupingPlan& plan) {
    std::vector<SemanticMatrix> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(transform(r, rules, schema, plan));
    return out;
}

SemanticContext SemanticContext::make(Schema schema, RuleSet rules) {
    auto plan = make_plan(schema, rules);
    return SemanticContext{std::move(schema), std::move(rules), std::move(plan)};
}

SemanticContext SemanticContext::defaults() {
    auto schema = default_schema();
    auto rules = default_ruleset(schema);
    return make(std::move(schema), std::move(rules));
}

void write_matrix(std::ostream& out, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << format_fixed(m(r, c), 6);
        }
        out << '\n';
    }
}

Matrix read_matrix(std::istream& in, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (ls >> cell) {
            const auto v = parse_double(cell);
            if (!v) throw ConfigError(source, line_no, "bad matrix entry '" + cell + "'");
            row.push_back(*v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ConfigError(source, line_no, "ragged matrix row");
        }
        rows.push_back(std::move(row));
    }
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace deeplcp
