#include "deeplcp/rules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "deeplcp/defaults.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

std::string_view to_string(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::syntax: return "SyntaxError";
        case DiagnosticKind::duplicate_rule: return "DuplicateRule";
        case DiagnosticKind::unknown_attribute: return "UnknownAttribute";
        case DiagnosticKind::coverage: return "CoverageError";
        case DiagnosticKind::weight_range: return "WeightRangeError";
        case DiagnosticKind::overlapping_intervals: return "OverlappingIntervals";
        case DiagnosticKind::empty_interval: return "EmptyInterval";
        case DiagnosticKind::arm_mismatch: return "ArmMismatch";
        case DiagnosticKind::schema_mismatch: return "SchemaMismatch";
    }
    return "Error";
}

std::string format_diagnostic(const Diagnostic& d, std::string_view source) {
    std::ostringstream os;
    os << source << ':' << d.line << ':' << d.column << ": " << to_string(d.kind) << ": " << d.message;
    return os.str();
}

namespace {

std::string join_diagnostics(const std::string& source, const std::vector<Diagnostic>& diagnostics) {
    std::string msg;
    for (const auto& d : diagnostics) {
        if (!msg.empty()) msg += '\n';
        msg += format_diagnostic(d, source);
    }
    return msg;
}

}  // namespace

RuleSetError::RuleSetError(std::string source, std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(source, diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::size_t Rule::width() const noexcept {
    std::size_t w = default_weights.size();
    for (const auto& a : categorical_arms) w = std::max(w, a.weights.size());
    for (const auto& a : numeric_arms) w = std::max(w, a.weights.size());
    return w;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { ident, number, string, lbrace, rbrace, colon, semi, comma, arrow, lbracket, rparen, minus, end };

std::string_view describe(Tok t) {
    switch (t) {
        case Tok::ident: return "identifier";
        case Tok::number: return "number";
        case Tok::string: return "string";
        case Tok::lbrace: return "'{'";
        case Tok::rbrace: return "'}'";
        case Tok::colon: return "':'";
        case Tok::semi: return "';'";
        case Tok::comma: return "','";
        case Tok::arrow: return "'->'";
        case Tok::lbracket: return "'['";
        case Tok::rparen: return "')'";
        case Tok::minus: return "'-'";
        case Tok::end: return "end of input";
    }
    return "token";
}

struct Token {
    Tok kind = Tok::end;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    Lexer(std::string_view text, std::vector<Diagnostic>& diags) : text_(text), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                t.kind = Tok::end;
                out.push_back(std::move(t));
                return out;
            }
            const char c = text_[pos_];
            if (is_ident_start(c)) {
                const auto start = pos_;
                while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
                t.kind = Tok::ident;
                t.text = std::string(text_.substr(start, pos_ - start));
            } else if (is_digit(c) || c == '.' ||
                       ((c == '+') && pos_ + 1 < text_.size() &&
                        (is_digit(text_[pos_ + 1]) || text_[pos_ + 1] == '.'))) {
                if (!lex_number(t)) continue;
            } else if (c == '"') {
                if (!lex_string(t)) continue;
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                advance();
                advance();
                t.kind = Tok::arrow;
            } else if (c == '-' && pos_ + 1 < text_.size() &&
                       (is_digit(text_[pos_ + 1]) || text_[pos_ + 1] == '.')) {
                if (!lex_number(t)) continue;
            } else {
                advance();
                switch (c) {
                    case '{': t.kind = Tok::lbrace; break;
                    case '}': t.kind = Tok::rbrace; break;
                    case ':': t.kind = Tok::colon; break;
                    case ';': t.kind = Tok::semi; break;
                    case ',': t.kind = Tok::comma; break;
                    case '[': t.kind = Tok::lbracket; break;
                    case ')': t.kind = Tok::rparen; break;
                    case '-': t.kind = Tok::minus; break;
                    default: {
                        const auto byte = static_cast<unsigned char>(c);
                        std::string shown = byte >= 0x20 && byte < 0x7f ? std::string(1, c)
                                                                        : "\\x" + hex(byte);
                        report(t.line, t.column, "unexpected character '" + shown + "'");
                        continue;
                    }
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
    static std::string hex(unsigned char b) {
        const char* digits = "0123456789abcdef";
        return {digits[b >> 4], digits[b & 15]};
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    bool lex_number(Token& t) {
        const auto start = pos_;
        if (text_[pos_] == '+' || text_[pos_] == '-') advance();
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (is_digit(c) || c == '.') {
                advance();
            } else if ((c == 'e' || c == 'E') && pos_ + 1 < text_.size()) {
                const char n = text_[pos_ + 1];
                if (is_digit(n)) {
                    advance();
                } else if ((n == '+' || n == '-') && pos_ + 2 < text_.size() && is_digit(text_[pos_ + 2])) {
                    advance();
                    advance();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        const auto lexeme = text_.substr(start, pos_ - start);
        const auto value = parse_double(lexeme);
        if (!value) {
            report(t.line, t.column, "malformed number '" + std::string(lexeme) + "'");
            return false;
        }
        t.kind = Tok::number;
        t.text = std::string(lexeme);
        t.number = *value;
        return true;
    }

    bool lex_string(Token& t) {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') {
                report(t.line, t.column, "unterminated string");
                return false;
            }
            const char c = text_[pos_];
            advance();
            if (c == '"') break;
            if (c == '\\') {
                if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\\')) {
                    report(line_, column_, "invalid escape in string");
                    return false;
                }
                value += text_[pos_];
                advance();
            } else {
                value += c;
            }
        }
        t.kind = Tok::string;
        t.text = std::move(value);
        return true;
    }

    void report(std::size_t line, std::size_t column, std::string message) {
        diags_.push_back({DiagnosticKind::syntax, line, column, std::move(message)});
    }

    std::string_view text_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

// Positions are kept next to the syntax tree so semantic checks can point at
// the offending arm.
struct ArmAst {
    enum class Kind { categorical, numeric, fallback } kind = Kind::fallback;
    std::string value;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> weights;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct FieldAst {
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct RuleAst {
    std::string name;
    std::size_t line = 0;
    std::size_t column = 0;
    std::optional<FieldAst> attribute;
    std::optional<FieldAst> category;
    std::optional<FieldAst> theme;
    std::vector<ArmAst> arms;
};

struct SyntaxFailure {};

constexpr std::size_t kMaxDiagnostics = 64;

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

    std::vector<RuleAst> run() {
        std::vector<RuleAst> rules;
        while (peek().kind != Tok::end && diags_.size() < kMaxDiagnostics) {
            if (is_keyword(peek(), "rule")) {
                try {
                    rules.push_back(parse_rule());
                } catch (const SyntaxFailure&) {
                    synchronize();
                }
            } else {
                error(peek(), "expected 'rule', found " + show(peek()));
                // Skip to the next top-level 'rule'.
                advance();
                while (peek().kind != Tok::end && !is_keyword(peek(), "rule")) advance();
            }
        }
        return rules;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    static bool is_keyword(const Token& t, std::string_view word) { return t.kind == Tok::ident && t.text == word; }

    static std::string show(const Token& t) {
        if (t.kind == Tok::ident) return "'" + t.text + "'";
        if (t.kind == Tok::number) return "number " + t.text;
        if (t.kind == Tok::string) return "string \"" + t.text + "\"";
        return std::string(describe(t.kind));
    }

    void error(const Token& at, std::string message) {
        diags_.push_back({DiagnosticKind::syntax, at.line, at.column, std::move(message)});
    }

    [[noreturn]] void fail(const Token& at, std::string message) {
        error(at, std::move(message));
        throw SyntaxFailure{};
    }

    const Token& expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) fail(peek(), "expected " + std::string(what) + ", found " + show(peek()));
        return advance();
    }

    // Skip past the closing brace of the broken rule, or up to the next 'rule'.
    void synchronize() {
        while (peek().kind != Tok::end) {
            if (peek().kind == Tok::rbrace) {
                advance();
                return;
            }
            if (is_keyword(peek(), "rule")) return;
            advance();
        }
    }

    RuleAst parse_rule() {
        RuleAst rule;
        const Token& kw = advance();
        rule.line = kw.line;
        rule.column = kw.column;
        rule.name = expect(Tok::ident, "rule name").text;
        expect(Tok::lbrace, "'{'");
        while (peek().kind != Tok::rbrace) {
            const Token& key = expect(Tok::ident, "field name ('attribute', 'category', 'theme', 'map', 'default')");
            if (key.text == "attribute" || key.text == "category" || key.text == "theme") {
                expect(Tok::colon, "':'");
                const Token& value = expect(Tok::ident, "identifier");
                auto& slot = key.text == "attribute" ? rule.attribute
                             : key.text == "category" ? rule.category
                                                      : rule.theme;
                if (slot) fail(key, "field '" + key.text + "' given twice");
                slot = FieldAst{value.text, value.line, value.column};
            } else if (key.text == "map") {
                expect(Tok::colon, "':'");
                parse_arms(rule);
            } else if (key.text == "default") {
                rule.arms.push_back(parse_arm_body(ArmAst{ArmAst::Kind::fallback, {}, 0, 0, {}, key.line, key.column}));
            } else {
                fail(key, "unknown field '" + key.text + "'");
            }
            if (peek().kind == Tok::semi) {
                advance();
            } else if (peek().kind != Tok::rbrace) {
                fail(peek(), "expected ';' or '}', found " + show(peek()));
            }
        }
        advance();  // '}'
        return rule;
    }

    static bool starts_arm(const Token& t) {
        return t.kind == Tok::string || t.kind == Tok::lbracket || is_keyword(t, "default");
    }

    void parse_arms(RuleAst& rule) {
        if (!starts_arm(peek())) fail(peek(), "expected an arm (\"value\", '[lo, hi)' or 'default'), found " + show(peek()));
        while (true) {
            rule.arms.push_back(parse_arm());
            // Arms are ';'-separated; a ';' followed by a non-arm ends the map.
            if (peek().kind == Tok::semi && pos_ + 1 < toks_.size() && starts_arm(toks_[pos_ + 1])) {
                advance();
                continue;
            }
            return;
        }
    }

    ArmAst parse_arm() {
        const Token& first = peek();
        ArmAst arm;
        arm.line = first.line;
        arm.column = first.column;
        if (first.kind == Tok::string) {
            arm.kind = ArmAst::Kind::categorical;
            arm.value = advance().text;
        } else if (first.kind == Tok::lbracket) {
            advance();
            arm.kind = ArmAst::Kind::numeric;
            arm.lower = parse_bound();
            expect(Tok::comma, "','");
            arm.upper = parse_bound();
            expect(Tok::rparen, "')' (intervals are half-open)");
        } else {
            advance();  // default
            arm.kind = ArmAst::Kind::fallback;
        }
        return parse_arm_body(std::move(arm));
    }

    ArmAst parse_arm_body(ArmAst arm) {
        expect(Tok::arrow, "'->'");
        arm.weights.push_back(parse_weight());
        while (peek().kind == Tok::comma) {
            advance();
            arm.weights.push_back(parse_weight());
        }
        return arm;
    }

    // A leading '-' is accepted so that negative weights reach the range check.
    double parse_weight() {
        const bool negative = peek().kind == Tok::minus;
        if (negative) advance();
        const double v = expect(Tok::number, "weight").number;
        return negative ? -v : v;
    }

    double parse_bound() {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (peek().kind == Tok::number) return advance().number;
        if (is_keyword(peek(), "inf")) {
            advance();
            return inf;
        }
        if (peek().kind == Tok::minus) {
            advance();
            if (peek().kind == Tok::number) return -advance().number;
            if (is_keyword(peek(), "inf")) {
                advance();
                return -inf;
            }
        }
        fail(peek(), "expected interval bound (number or inf), found " + show(peek()));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
};

// ---------------------------------------------------------------------------
// Semantic checks
// ---------------------------------------------------------------------------

void check_weights(const ArmAst& arm, std::vector<Diagnostic>& diags) {
    if (arm.weights.size() > kWordSlots) {
        diags.push_back({DiagnosticKind::weight_range, arm.line, arm.column,
                         "arm emits " + std::to_string(arm.weights.size()) + " weights, at most " +
                             std::to_string(kWordSlots) + " allowed"});
    }
    for (double w : arm.weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
            diags.push_back({DiagnosticKind::weight_range, arm.line, arm.column,
                             "weight " + format_double(w) + " outside [0, 1]"});
            return;
        }
    }
}

std::optional<Rule> build_rule(const RuleAst& ast, const Schema& schema, std::vector<Diagnostic>& diags) {
    const auto before = diags.size();
    auto report = [&](DiagnosticKind kind, std::size_t line, std::size_t column, std::string message) {
        diags.push_back({kind, line, column, std::move(message)});
    };

    if (!ast.attribute) {
        report(DiagnosticKind::syntax, ast.line, ast.column, "rule '" + ast.name + "' has no 'attribute' field");
        return std::nullopt;
    }
    const auto index = schema.index_of(ast.attribute->value);
    if (!index) {
        report(DiagnosticKind::unknown_attribute, ast.attribute->line, ast.attribute->column,
               "unknown attribute '" + ast.attribute->value + "'");
        return std::nullopt;
    }
    const AttributeSpec& spec = schema.attribute(*index);

    Rule rule;
    rule.name = ast.name;
    rule.attribute = spec.name;
    rule.attribute_index = *index;
    rule.kind = spec.kind;
    rule.category = spec.category;
    rule.theme = spec.theme;

    if (ast.category) {
        const auto c = parse_risk_category(ast.category->value);
        if (!c || *c != spec.category) {
            report(DiagnosticKind::schema_mismatch, ast.category->line, ast.category->column,
                   "category '" + ast.category->value + "' does not match schema category '" +
                       std::string(to_string(spec.category)) + "' of '" + spec.name + "'");
        }
    }
    if (ast.theme) {
        const auto t = parse_theme(ast.theme->value);
        if (!t || *t != spec.theme) {
            report(DiagnosticKind::schema_mismatch, ast.theme->line, ast.theme->column,
                   "theme '" + ast.theme->value + "' does not match schema theme '" +
                       std::string(to_string(spec.theme)) + "' of '" + spec.name + "'");
        }
    }

    bool have_default = false;
    std::set<std::string> seen_values;
    for (const auto& arm : ast.arms) {
        check_weights(arm, diags);
        switch (arm.kind) {
            case ArmAst::Kind::fallback:
                if (have_default) {
                    report(DiagnosticKind::arm_mismatch, arm.line, arm.column, "second default arm");
                }
                have_default = true;
                rule.default_weights = arm.weights;
                break;
            case ArmAst::Kind::categorical:
                if (spec.kind != AttributeKind::categorical) {
                    report(DiagnosticKind::arm_mismatch, arm.line, arm.column,
                           "categorical arm on numeric attribute '" + spec.name + "'");
                } else if (!spec.accepts(arm.value) || arm.value == kUnknownValue) {
                    report(DiagnosticKind::schema_mismatch, arm.line, arm.column,
                           "\"" + arm.value + "\" is not an allowed value of '" + spec.name + "'");
                } else if (!seen_values.insert(arm.value).second) {
                    report(DiagnosticKind::arm_mismatch, arm.line, arm.column,
                           "duplicate arm for \"" + arm.value + "\"");
                }
                rule.categorical_arms.push_back({arm.value, arm.weights});
                break;
            case ArmAst::Kind::numeric:
                if (spec.kind != AttributeKind::numeric) {
                    report(DiagnosticKind::arm_mismatch, arm.line, arm.column,
                           "interval arm on categorical attribute '" + spec.name + "'");
                } else if (!(arm.lower < arm.upper)) {
                    report(DiagnosticKind::empty_interval, arm.line, arm.column,
                           "interval [" + format_double(arm.lower) + ", " + format_double(arm.upper) + ") is empty");
                }
                rule.numeric_arms.push_back({arm.lower, arm.upper, arm.weights});
                break;
        }
    }
    if (!have_default) {
        report(DiagnosticKind::syntax, ast.line, ast.column, "rule '" + ast.name + "' has no default arm");
    }

    // Canonical order: sorted by lower bound (stable, so source order breaks ties).
    std::vector<std::size_t> order(rule.numeric_arms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rule.numeric_arms[a].lower < rule.numeric_arms[b].lower;
    });
    std::vector<NumericArm> sorted;
    std::vector<const ArmAst*> numeric_asts;
    for (const auto& arm : ast.arms) {
        if (arm.kind == ArmAst::Kind::numeric) numeric_asts.push_back(&arm);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.push_back(rule.numeric_arms[order[i]]);
        if (i > 0 && sorted[i - 1].upper > sorted[i].lower) {
            const ArmAst* at = numeric_asts[order[i]];
            report(DiagnosticKind::overlapping_intervals, at->line, at->column,
                   "interval [" + format_double(sorted[i].lower) + ", " + format_double(sorted[i].upper) +
                       ") overlaps [" + format_double(sorted[i - 1].lower) + ", " +
                       format_double(sorted[i - 1].upper) + ")");
        }
    }
    rule.numeric_arms = std::move(sorted);

    if (diags.size() != before) return std::nullopt;
    return rule;
}

std::size_t last_line(std::string_view text) {
    std::size_t lines = 1 + static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    if (!text.empty() && text.back() == '\n') --lines;
    return std::max<std::size_t>(lines, 1);
}

}  // namespace

RuleParseResult parse_ruleset(std::string_view text, const Schema& schema) {
    RuleParseResult result;
    auto& diags = result.diagnostics;

    auto tokens = Lexer(text, diags).run();
    const auto asts = Parser(std::move(tokens), diags).run();

    std::vector<std::optional<Rule>> by_attribute(schema.attributes().size());
    std::map<std::string, std::size_t> names;
    std::vector<bool> claimed(schema.attributes().size(), false);
    for (const auto& ast : asts) {
        if (!names.emplace(ast.name, ast.line).second) {
            diags.push_back({DiagnosticKind::duplicate_rule, ast.line, ast.column,
                             "rule name '" + ast.name + "' already used on line " +
                                 std::to_string(names[ast.name])});
        }
        if (ast.attribute) {
            if (auto idx = schema.index_of(ast.attribute->value)) {
                if (claimed[*idx]) {
                    diags.push_back({DiagnosticKind::duplicate_rule, ast.line, ast.column,
                                     "second rule for attribute '" + ast.attribute->value + "'"});
                    continue;
                }
                claimed[*idx] = true;
            }
        }
        if (auto rule = build_rule(ast, schema, diags)) by_attribute[rule->attribute_index] = std::move(*rule);
    }

    std::string missing;
    for (std::size_t i = 0; i < claimed.size(); ++i) {
        if (!claimed[i]) {
            if (!missing.empty()) missing += ", ";
            missing += schema.attribute(i).name;
        }
    }
    if (!missing.empty()) {
        diags.push_back({DiagnosticKind::coverage, last_line(text), 1, "no rule for attribute(s): " + missing});
    }

    if (diags.empty()) {
        std::vector<Rule> rules;
        rules.reserve(by_attribute.size());
        for (auto& r : by_attribute) rules.push_back(std::move(*r));
        result.ruleset = RuleSet(std::move(rules));
    } else {
        std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return a.line != b.line ? a.line < b.line : a.column < b.column;
        });
    }
    return result;
}

RuleSet load_ruleset(const std::string& path, const Schema& schema) {
    auto result = parse_ruleset(read_text_file(path), schema);
    if (!result.ok()) throw RuleSetError(path, std::move(result.diagnostics));
    return std::move(*result.ruleset);
}

RuleSet default_ruleset(const Schema& schema) {
    auto result = parse_ruleset(default_rules_text(), schema);
    if (!result.ok()) throw RuleSetError("default.rules", std::move(result.diagnostics));
    return std::move(*result.ruleset);
}

namespace {

std::string format_weights(const std::vector<double>& weights) {
    std::string out;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (i) out += ", ";
        out += format_double(weights[i]);
    }
    return out;
}

std::string format_bound(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_ruleset(const RuleSet& rules) {
    std::ostringstream os;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const Rule& rule = rules.rules()[r];
        if (r) os << '\n';
        os << "rule " << rule.name << " {\n"
           << "  attribute: " << rule.attribute << ";\n"
           << "  category: " << to_string(rule.category) << ";\n"
           << "  theme: " << to_string(rule.theme) << ";\n"
           << "  map:\n";
        for (const auto& arm : rule.categorical_arms) {
            os << "    " << quote(arm.value) << " -> " << format_weights(arm.weights) << ";\n";
        }
        for (const auto& arm : rule.numeric_arms) {
            os << "    [" << format_bound(arm.lower) << ", " << format_bound(arm.upper)
               << ") -> " << format_weights(arm.weights) << ";\n";
        }
        os << "    default -> " << format_weights(rule.default_weights) << "\n}\n";
    }
    return os.str();
}

WeightVector apply_rule(const Rule& rule, std::string_view value) {
    WeightVector out{};
    if (value == kUnknownValue) return out;

    const std::vector<double>* weights = &rule.default_weights;
    if (rule.kind == AttributeKind::numeric) {
        const auto x = parse_double(value);
        if (!x) throw ValueParseError(rule.attribute, std::string(value));
        for (const auto& arm : rule.numeric_arms) {
            if (*x >= arm.lower && *x < arm.upper) {
                weights = &arm.weights;
                break;
            }
        }
    } else {
        for (const auto& arm : rule.categorical_arms) {
            if (arm.value == value) {
                weights = &arm.weights;
                break;
            }
        }
    }
    std::copy(weights->begin(), weights->end(), out.begin());
    return out;
}

std::vector<WeightVector> evaluate(const RuleSet& rules, const PersonRecord& record) {
    if (record.values.size() != rules.size()) {
        throw ShapeError("record has " + std::to_string(record.values.size()) + " values, rule set covers " +
                         std::to_string(rules.size()) + " attributes");
    }
    std::vector<WeightVector> rows;
    rows.reserve(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) rows.push_back(apply_rule(rules.for_attribute(i), record.values[i]));
    return rows;
}

}  // namespace deeplcp
