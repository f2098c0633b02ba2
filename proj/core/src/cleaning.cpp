#include "deeplcp/cleaning.hpp"

#include <algorithm>
#include <cctype>

#include "deeplcp/defaults.hpp"
#include "deeplcp/error.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

}  // namespace

std::string standardize(std::string_view value, const CleaningConfig& cfg) {
    std::string out;
    out.reserve(value.size());
    switch (cfg.whitespace_policy) {
        case WhitespacePolicy::preserve:
            out.assign(value);
            break;
        case WhitespacePolicy::trim:
            out.assign(trim(value));
            break;
        case WhitespacePolicy::collapse: {
            bool pending_space = false;
            for (char c : value) {
                if (is_ws(c)) {
                    pending_space = !out.empty();
                    continue;
                }
                if (pending_space) out += ' ';
                pending_space = false;
                out += c;
            }
            break;
        }
    }
    if (cfg.case_policy == CasePolicy::lower) {
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    } else if (cfg.case_policy == CasePolicy::upper) {
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    }
    return out;
}

void validate_cleaning_config(const CleaningConfig& cfg, const Schema& schema) {
    if (cfg.typo_dictionary.contains(std::string(kUnknownValue))) {
        throw ConfigError("typo dictionary must not rewrite 'unknown'");
    }
    for (const auto& [key, value] : cfg.typo_dictionary) {
        const bool valid = std::any_of(schema.attributes().begin(), schema.attributes().end(),
                                       [&](const AttributeSpec& a) { return a.accepts(value); });
        if (!valid) throw ConfigError("typo dictionary value '" + value + "' is not valid for any attribute");
        if (standardize(value, cfg) != value) {
            throw ConfigError("typo dictionary value '" + value + "' is not in standardized form");
        }
        if (cfg.typo_dictionary.contains(value)) {
            throw ConfigError("typo dictionary value '" + value + "' is also a key (chained corrections)");
        }
        if (cfg.irrelevant_markers.contains(value)) {
            throw ConfigError("typo dictionary value '" + value + "' is also an irrelevant marker");
        }
    }
}

CleaningConfig parse_cleaning_config(std::string_view text, const Schema& schema, const std::string& source) {
    const auto doc = parse_kv_document(text, source);
    if (!doc.top.entries.empty()) {
        throw ConfigError(source, doc.top.entries.front().line, "entries must belong to a block");
    }
    CleaningConfig cfg;
    std::vector<std::pair<std::string, std::string>> raw_typos;
    std::vector<std::string> raw_markers;
    for (const auto& block : doc.blocks) {
        if (block.kind == "standardize") {
            for (const auto& e : block.entries) {
                if (e.key == "case") {
                    if (e.value == "lower") cfg.case_policy = CasePolicy::lower;
                    else if (e.value == "upper") cfg.case_policy = CasePolicy::upper;
                    else if (e.value == "preserve") cfg.case_policy = CasePolicy::preserve;
                    else throw ConfigError(source, e.line, "case must be lower, upper or preserve");
                } else if (e.key == "whitespace") {
                    if (e.value == "collapse") cfg.whitespace_policy = WhitespacePolicy::collapse;
                    else if (e.value == "trim") cfg.whitespace_policy = WhitespacePolicy::trim;
                    else if (e.value == "preserve") cfg.whitespace_policy = WhitespacePolicy::preserve;
                    else throw ConfigError(source, e.line, "whitespace must be collapse, trim or preserve");
                } else {
                    throw ConfigError(source, e.line, "unknown standardize key '" + e.key + "'");
                }
            }
        } else if (block.kind == "irrelevant") {
            for (const auto& e : block.entries) {
                if (e.key != "markers") throw ConfigError(source, e.line, "unknown irrelevant key '" + e.key + "'");
                // "<empty>" names the empty field, which cannot be written literally.
                for (auto& m : split_list(e.value, ',')) raw_markers.push_back(m == "<empty>" ? "" : m);
            }
        } else if (block.kind == "typos") {
            for (const auto& e : block.entries) raw_typos.emplace_back(e.key, e.value);
        } else {
            throw ConfigError(source, block.line, "unknown block '" + block.kind + "'");
        }
    }
    // Keys are stored standardized so lookup happens after standardization.
    for (const auto& m : raw_markers) cfg.irrelevant_markers.insert(standardize(m, cfg));
    for (const auto& [k, v] : raw_typos) cfg.typo_dictionary[standardize(k, cfg)] = v;
    validate_cleaning_config(cfg, schema);
    return cfg;
}

CleaningConfig load_cleaning_config(const std::string& path, const Schema& schema) {
    return parse_cleaning_config(read_text_file(path), schema, path);
}

CleaningConfig default_cleaning_config(const Schema& schema) {
    return parse_cleaning_config(default_cleaning_text(), schema, "default.clean");
}

PersonRecord clean_record(const PersonRecord& record, const CleaningConfig& cfg, const Schema& schema) {
    const auto& attrs = schema.attributes();
    if (record.values.size() != attrs.size()) {
        throw ShapeError("record has " + std::to_string(record.values.size()) + " values, schema has " +
                         std::to_string(attrs.size()));
    }
    PersonRecord out;
    out.label = record.label;
    out.values.reserve(attrs.size());
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        std::string v = standardize(record.values[i], cfg);
        if (auto it = cfg.typo_dictionary.find(v); it != cfg.typo_dictionary.end()) v = it->second;
        if (cfg.irrelevant_markers.contains(v)) v = std::string(kUnknownValue);
        if (!attrs[i].accepts(v)) throw CleaningError(attrs[i].name, record.values[i]);
        out.values.push_back(std::move(v));
    }
    return out;
}

}  // namespace deeplcp
