#ifndef DEEPLCP_RULES_HPP
#define DEEPLCP_RULES_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deeplcp/error.hpp"
#include "deeplcp/records.hpp"
#include "deeplcp/schema.hpp"

namespace deeplcp {

// Word slots per sentence row: the width of every semantic matrix.
inline constexpr std::size_t kWordSlots = 13;

// Incidence weights for one attribute, right-padded with zeros.
using WeightVector = std::array<double, kWordSlots>;

struct CategoricalArm {
    std::string value;
    std::vector<double> weights;

    friend bool operator==(const CategoricalArm&, const CategoricalArm&) = default;
};

// Half-open interval [lower, upper). upper may be +infinity, lower -infinity.
struct NumericArm {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> weights;

    friend bool operator==(const NumericArm&, const NumericArm&) = default;
};

struct Rule {
    std::string name;
    std::string attribute;
    std::size_t attribute_index = 0;
    AttributeKind kind = AttributeKind::categorical;
    RiskCategory category = RiskCategory::minor_risk;
    Theme theme = Theme::personal_history;
    std::vector<CategoricalArm> categorical_arms;
    std::vector<NumericArm> numeric_arms;  // sorted by lower bound
    std::vector<double> default_weights;

    // Number of word slots this rule can emit: the longest weight sequence over
    // all arms. Fixes the attribute's column span in the reduced matrix.
    std::size_t width() const noexcept;

    friend bool operator==(const Rule&, const Rule&) = default;
};

// One rule per schema attribute, indexed by attribute.
class RuleSet {
public:
    RuleSet() = default;
    explicit RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {}

    const std::vector<Rule>& rules() const noexcept { return rules_; }
    const Rule& for_attribute(std::size_t index) const { return rules_.at(index); }
    std::size_t size() const noexcept { return rules_.size(); }

    friend bool operator==(const RuleSet&, const RuleSet&) = default;

private:
    std::vector<Rule> rules_;
};

enum class DiagnosticKind {
    syntax,
    duplicate_rule,
    unknown_attribute,
    coverage,
    weight_range,
    overlapping_intervals,
    empty_interval,
    arm_mismatch,
    schema_mismatch,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
    DiagnosticKind kind = DiagnosticKind::syntax;
    std::size_t line = 0;  // 1-based, always set
    std::size_t column = 0;
    std::string message;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view source);

struct RuleParseResult {
    std::optional<RuleSet> ruleset;  // set iff diagnostics is empty
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return ruleset.has_value(); }
};

// Total: never throws on malformed text; every problem becomes a diagnostic.
RuleParseResult parse_ruleset(std::string_view text, const Schema& schema);

// Throws RuleSetError when the text has diagnostics.
RuleSet load_ruleset(const std::string& path, const Schema& schema);
RuleSet default_ruleset(const Schema& schema);

class RuleSetError : public Error {
public:
    RuleSetError(std::string source, std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

// Canonical source text; parse_ruleset(format_ruleset(r)) == r.
std::string format_ruleset(const RuleSet& rules);

// Throws ValueParseError for a non-numeric value on a numeric rule.
WeightVector apply_rule(const Rule& rule, std::string_view value);

// Row i comes from the rule for attribute i. Errors carry the attribute name.
std::vector<WeightVector> evaluate(const RuleSet& rules, const PersonRecord& record);

}  // namespace deeplcp

#endif  // DEEPLCP_RULES_HPP
