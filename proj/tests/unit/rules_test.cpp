#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "deeplcp/defaults.hpp"
#include "deeplcp/random.hpp"
#include "deeplcp/rules.hpp"
#include "deeplcp/synth.hpp"
#include "deeplcp/text_format.hpp"

using namespace deeplcp;

namespace {

const Schema& schema() {
    static const Schema s = default_schema();
    return s;
}

std::string default_text() { return std::string(default_rules_text()); }

// Replaces the whole "rule <name> ..." block (through its closing brace).
std::string replace_rule(const std::string& text, const std::string& name, const std::string& replacement) {
    const auto start = text.find("rule " + name + " ");
    REQUIRE(start != std::string::npos);
    const auto end = text.find('}', start);
    return text.substr(0, start) + replacement + text.substr(end + 1);
}

bool has_kind(const RuleParseResult& r, DiagnosticKind kind) {
    return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const Diagnostic& d) { return d.kind == kind; });
}

const Rule& rule_for(const RuleSet& rules, const std::string& attribute) {
    return rules.for_attribute(*schema().index_of(attribute));
}

std::string weights_text(Rng& rng, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ", ";
        s += format_double(static_cast<double>(rng.below(1001)) / 1000.0);
    }
    return s;
}

// A random valid rule file over the default schema, arms in shuffled order.
std::string random_rules(Rng& rng) {
    std::string text;
    for (const auto& a : schema().attributes()) {
        std::vector<std::string> arms;
        if (a.kind == AttributeKind::categorical) {
            for (const auto& v : a.allowed_values) {
                if (rng.bernoulli(0.7)) arms.push_back("\"" + v + "\" -> " + weights_text(rng, 1 + rng.below(3)));
            }
        } else {
            double lo = a.min_value;
            const auto n = 1 + rng.below(4);
            for (std::size_t i = 0; i < n; ++i) {
                const double hi = i + 1 == n && rng.bernoulli(0.5) ? INFINITY : lo + 1 + static_cast<double>(rng.below(30));
                arms.push_back("[" + format_double(lo) + ", " + (std::isinf(hi) ? std::string("inf") : format_double(hi)) +
                               ") -> " + weights_text(rng, 1 + rng.below(2)));
                lo = hi + static_cast<double>(rng.below(3));
            }
        }
        rng.shuffle(std::span<std::string>(arms));
        text += "rule r_" + a.name + " { attribute: " + a.name + "; map: ";
        for (const auto& arm : arms) text += arm + "; ";
        text += "default -> " + weights_text(rng, 1) + " }\n";
    }
    return text;
}

}  // namespace

TEST_CASE("default rule file parses cleanly") {
    const auto result = parse_ruleset(default_rules_text(), schema());
    for (const auto& d : result.diagnostics) INFO(format_diagnostic(d, "default.rules"));
    REQUIRE(result.ok());
    CHECK(result.ruleset->size() == 31);
    for (std::size_t i = 0; i < 31; ++i) CHECK(result.ruleset->for_attribute(i).attribute_index == i);
}

TEST_CASE("gender rule: two categorical arms, male weighted above female") {
    const std::string gender = R"(rule gender { attribute: gender; map: "male" -> 0.65; "female" -> 0.35; default -> 0.0 })";
    const auto result = parse_ruleset(replace_rule(default_text(), "gender", gender), schema());
    REQUIRE(result.ok());
    const auto& rule = rule_for(*result.ruleset, "gender");
    REQUIRE(rule.categorical_arms.size() == 2);
    CHECK(rule.categorical_arms[0].value == "male");
    CHECK(rule.categorical_arms[0].weights == std::vector<double>{0.65});
    CHECK(rule.categorical_arms[1].weights == std::vector<double>{0.35});
    CHECK(rule.categorical_arms[0].weights[0] > rule.categorical_arms[1].weights[0]);

    const auto male = apply_rule(rule, "male");
    CHECK(male[0] == 0.65);
    CHECK(std::all_of(male.begin() + 1, male.end(), [](double w) { return w == 0.0; }));
    CHECK(apply_rule(rule, "unknown") == WeightVector{});
}

TEST_CASE("age rule interval lookup") {
    const auto rules = default_ruleset(schema());
    const auto& age = rule_for(rules, "age");
    CHECK(apply_rule(age, "55")[0] == 0.4);
    CHECK(apply_rule(age, "39")[0] == 0.1);
    CHECK(apply_rule(age, "40")[0] == 0.4);  // half-open
    CHECK(apply_rule(age, "60")[0] == 0.7);
    CHECK(apply_rule(age, "unknown") == WeightVector{});
    CHECK_THROWS_AS(apply_rule(age, "old"), ValueParseError);
}

TEST_CASE("a 30-rule file reports the uncovered attribute") {
    const auto result = parse_ruleset(replace_rule(default_text(), "gender", ""), schema());
    CHECK_FALSE(result.ok());
    REQUIRE(has_kind(result, DiagnosticKind::coverage));
    const auto it = std::find_if(result.diagnostics.begin(), result.diagnostics.end(),
                                 [](const Diagnostic& d) { return d.kind == DiagnosticKind::coverage; });
    CHECK(it->message.find("gender") != std::string::npos);
    CHECK(it->line > 0);
}

TEST_CASE("overlapping numeric arms are rejected") {
    const auto text = replace_rule(default_text(), "age",
                                   "rule age { attribute: age; map: [0, 40) -> 0.1; [30, 60) -> 0.4; default -> 0 }");
    const auto result = parse_ruleset(text, schema());
    CHECK(has_kind(result, DiagnosticKind::overlapping_intervals));
}

TEST_CASE("semantic diagnostics") {
    auto check_kind = [](const std::string& rule_name, const std::string& replacement, DiagnosticKind kind) {
        INFO(replacement);
        const auto result = parse_ruleset(replace_rule(default_text(), rule_name, replacement), schema());
        CHECK_FALSE(result.ok());
        CHECK(has_kind(result, kind));
        for (const auto& d : result.diagnostics) CHECK(d.line >= 1);
    };
    check_kind("gender", R"(rule gender { attribute: gender; map: "male" -> 1.5; default -> 0 })",
               DiagnosticKind::weight_range);
    check_kind("gender", R"(rule gender { attribute: gender; map: "male" -> -0.5; default -> 0 })",
               DiagnosticKind::weight_range);
    check_kind("gender", R"(rule gender { attribute: sex; map: "male" -> 0.5; default -> 0 })",
               DiagnosticKind::unknown_attribute);
    check_kind("gender", R"(rule gender { attribute: age; map: "male" -> 0.5; default -> 0 })",
               DiagnosticKind::duplicate_rule);
    check_kind("gender", R"(rule gender { attribute: gender; map: [0, 1) -> 0.5; default -> 0 })",
               DiagnosticKind::arm_mismatch);
    check_kind("gender", R"(rule gender { attribute: gender; category: symptom; map: "male" -> 0.5; default -> 0 })",
               DiagnosticKind::schema_mismatch);
    check_kind("gender", R"(rule gender { attribute: gender; map: "martian" -> 0.5; default -> 0 })",
               DiagnosticKind::schema_mismatch);
    check_kind("age", "rule age { attribute: age; map: [40, 40) -> 0.5; default -> 0 }", DiagnosticKind::empty_interval);
    check_kind("gender", R"(rule gender { attribute: gender; map: "male" -> 0.5 })", DiagnosticKind::syntax);
    check_kind("gender",
               R"(rule gender { attribute: gender; map: "male" -> 0,0,0,0,0,0,0,0,0,0,0,0,0,0; default -> 0 })",
               DiagnosticKind::weight_range);
}

TEST_CASE("syntax errors are line-anchored and recovery continues") {
    std::string text = default_text();
    text = replace_rule(text, "gender", "rule gender { attribute gender; map: \"male\" -> 0.5; default -> 0 }");
    const auto line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(text.find("rule gender")), '\n')) + 1;
    const auto result = parse_ruleset(text, schema());
    REQUIRE_FALSE(result.ok());
    CHECK(result.diagnostics.front().kind == DiagnosticKind::syntax);
    CHECK(result.diagnostics.front().line == line);
    CHECK(format_diagnostic(result.diagnostics.front(), "f.rules").find("f.rules:" + std::to_string(line) + ":") == 0);
}

TEST_CASE("numeric arms are stored sorted by lower bound") {
    const auto text = replace_rule(default_text(), "age",
                                   "rule age { attribute: age; map: [60, inf) -> 0.7; [0, 40) -> 0.1; [40, 60) -> 0.4; default -> 0 }");
    const auto result = parse_ruleset(text, schema());
    REQUIRE(result.ok());
    const auto& arms = rule_for(*result.ruleset, "age").numeric_arms;
    REQUIRE(arms.size() == 3);
    CHECK(std::is_sorted(arms.begin(), arms.end(), [](const NumericArm& a, const NumericArm& b) { return a.lower < b.lower; }));
    CHECK(arms[0].lower == 0.0);
}

TEST_CASE("negative and infinite bounds parse") {
    const auto text = replace_rule(default_text(), "age",
                                   "rule age { attribute: age; map: [-inf, -5) -> 0.2; [-5, 10) -> 0.3; [10, inf) -> 0.4; default -> 0 }");
    const auto result = parse_ruleset(text, schema());
    REQUIRE(result.ok());
    const auto& arms = rule_for(*result.ruleset, "age").numeric_arms;
    CHECK(std::isinf(arms[0].lower));
    CHECK(arms[1].lower == -5.0);
}

TEST_CASE("pretty-print round-trip on the default and random rule sets") {
    const auto rules = default_ruleset(schema());
    auto again = parse_ruleset(format_ruleset(rules), schema());
    REQUIRE(again.ok());
    CHECK(*again.ruleset == rules);

    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const auto text = random_rules(rng);
        const auto first = parse_ruleset(text, schema());
        for (const auto& d : first.diagnostics) INFO(format_diagnostic(d, "random"));
        REQUIRE(first.ok());
        for (const auto& r : first.ruleset->rules()) {
            CHECK(std::is_sorted(r.numeric_arms.begin(), r.numeric_arms.end(),
                                 [](const NumericArm& a, const NumericArm& b) { return a.lower < b.lower; }));
        }
        const auto second = parse_ruleset(format_ruleset(*first.ruleset), schema());
        REQUIRE(second.ok());
        CHECK(*second.ruleset == *first.ruleset);
    }
}

TEST_CASE("evaluate: all-unknown gives zeros, rules are local") {
    const auto rules = default_ruleset(schema());
    PersonRecord unknown;
    unknown.values.assign(31, "unknown");
    const auto zeros = evaluate(rules, unknown);
    REQUIRE(zeros.size() == 31);
    for (const auto& w : zeros) CHECK(w == WeightVector{});

    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_record(rng, schema());
        auto b = a;
        const auto changed = rng.below(31);
        b.values[changed] = random_record(rng, schema()).values[changed];
        const auto ea = evaluate(rules, a);
        const auto eb = evaluate(rules, b);
        for (std::size_t i = 0; i < 31; ++i) {
            if (i != changed) CHECK(ea[i] == eb[i]);
        }
    }
    PersonRecord short_record;
    short_record.values.assign(30, "unknown");
    CHECK_THROWS_AS(evaluate(rules, short_record), ShapeError);
}

TEST_CASE("every schema-valid value matches and weights stay in range") {
    const auto rules = default_ruleset(schema());
    for (std::size_t i = 0; i < 31; ++i) {
        const auto& spec = schema().attribute(i);
        const auto& rule = rules.for_attribute(i);
        std::vector<std::string> values;
        if (spec.kind == AttributeKind::categorical) {
            values = spec.allowed_values;
        } else {
            for (double v = spec.min_value; v <= spec.max_value; v += 0.5) values.push_back(format_double(v));
        }
        for (const auto& v : values) {
            const auto w = apply_rule(rule, v);
            for (std::size_t s = 0; s < kWordSlots; ++s) {
                CHECK(w[s] >= 0.0);
                CHECK(w[s] <= 1.0);
                if (s >= rule.width()) CHECK(w[s] == 0.0);
            }
        }
    }
}

TEST_CASE("load_ruleset reports the file path") {
    try {
        load_ruleset("/nonexistent/x.rules", schema());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("x.rules") != std::string::npos);
    }
}
