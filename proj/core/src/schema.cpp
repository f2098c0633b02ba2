#include "deeplcp/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "deeplcp/defaults.hpp"
#include "deeplcp/error.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

std::string_view to_string(AttributeKind kind) {
    return kind == AttributeKind::numeric ? "numeric" : "categorical";
}

std::string_view to_string(RiskCategory category) {
    switch (category) {
        case RiskCategory::minor_risk: return "minor_risk";
        case RiskCategory::major_risk: return "major_risk";
        case RiskCategory::symptom: return "symptom";
    }
    return "?";
}

std::string_view to_string(Theme theme) {
    switch (theme) {
        case Theme::thoracic_signs: return "thoracic_signs";
        case Theme::cough: return "cough";
        case Theme::feeding: return "feeding";
        case Theme::consumer: return "consumer";
        case Theme::personal_history: return "personal_history";
        case Theme::residence: return "residence";
    }
    return "?";
}

std::optional<AttributeKind> parse_attribute_kind(std::string_view s) {
    if (s == "categorical") return AttributeKind::categorical;
    if (s == "numeric") return AttributeKind::numeric;
    return std::nullopt;
}

std::optional<RiskCategory> parse_risk_category(std::string_view s) {
    for (auto c : {RiskCategory::minor_risk, RiskCategory::major_risk, RiskCategory::symptom}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::optional<Theme> parse_theme(std::string_view s) {
    for (auto t : {Theme::thoracic_signs, Theme::cough, Theme::feeding, Theme::consumer,
                   Theme::personal_history, Theme::residence}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

RiskCategory band_category(std::size_t group) {
    if (group < kBandSizes[0]) return RiskCategory::minor_risk;
    if (group < kBandSizes[0] + kBandSizes[1]) return RiskCategory::major_risk;
    return RiskCategory::symptom;
}

bool AttributeSpec::accepts(std::string_view value) const {
    if (value == kUnknownValue) return true;
    if (kind == AttributeKind::numeric) {
        const auto v = parse_double(value);
        // parse_double trims; canonical numeric values carry no whitespace.
        return v && trim(value).size() == value.size() && *v >= min_value && *v <= max_value;
    }
    return std::find(allowed_values.begin(), allowed_values.end(), value) != allowed_values.end();
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
}

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

bool is_canonical_value(std::string_view s) {
    if (s.empty() || trim(s).size() != s.size()) return false;
    return std::none_of(s.begin(), s.end(), [](char c) {
        return std::isupper(static_cast<unsigned char>(c)) || c == ',' || c == '"' || c == '\n';
    });
}

const KvEntry& require(const KvBlock& block, std::string_view key, const std::string& source) {
    const auto* e = block.find(key);
    if (!e) {
        throw SchemaError(source, block.line,
                          std::string(block.kind) + " '" + block.name + "': missing field '" + std::string(key) + "'");
    }
    return *e;
}

}  // namespace

Schema parse_schema(std::string_view text, const std::string& source) {
    KvDocument doc;
    try {
        doc = parse_kv_document(text, source);
    } catch (const ConfigError& e) {
        throw SchemaError(e.source(), e.line(), "malformed schema line");
    }
    if (!doc.top.entries.empty()) {
        throw SchemaError(source, doc.top.entries.front().line, "schema entries must belong to a block");
    }

    Schema schema;
    std::vector<std::size_t> group_lines;
    std::vector<const KvBlock*> attribute_blocks;
    for (const auto& block : doc.blocks) {
        if (block.kind == "group") {
            if (!is_identifier(block.name)) throw SchemaError(source, block.line, "group needs an identifier name");
            for (const auto& g : schema.groups_) {
                if (g.name == block.name) throw SchemaError(source, block.line, "duplicate group '" + block.name + "'");
            }
            const auto& cat = require(block, "category", source);
            const auto category = parse_risk_category(cat.value);
            if (!category) throw SchemaError(source, cat.line, "unknown category '" + cat.value + "'");
            schema.groups_.push_back(GroupSpec{block.name, *category, {}});
            group_lines.push_back(block.line);
        } else if (block.kind == "attribute") {
            attribute_blocks.push_back(&block);
        } else {
            throw SchemaError(source, block.line, "unknown block kind '" + block.kind + "'");
        }
    }

    if (schema.groups_.size() != kGroupCount) {
        throw SchemaError(source, 0, "group count: expected " + std::to_string(kGroupCount) + ", found " +
                                         std::to_string(schema.groups_.size()));
    }
    if (attribute_blocks.size() != kAttributeCount) {
        throw SchemaError(source, 0, "attribute count: expected " + std::to_string(kAttributeCount) +
                                         ", found " + std::to_string(attribute_blocks.size()));
    }
    for (std::size_t g = 0; g < kGroupCount; ++g) {
        if (schema.groups_[g].category != band_category(g)) {
            throw SchemaError(source, group_lines[g],
                              "band violation: group " + std::to_string(g) + " ('" + schema.groups_[g].name +
                                  "') must be " + std::string(to_string(band_category(g))));
        }
    }

    std::set<std::string> names;
    for (const KvBlock* block : attribute_blocks) {
        AttributeSpec spec;
        spec.name = block->name;
        if (!is_identifier(spec.name)) throw SchemaError(source, block->line, "attribute needs an identifier name");
        if (spec.name == "label") throw SchemaError(source, block->line, "'label' is reserved for the label column");
        if (!names.insert(spec.name).second) {
            throw SchemaError(source, block->line, "duplicate attribute '" + spec.name + "'");
        }

        const auto& kind = require(*block, "kind", source);
        const auto parsed_kind = parse_attribute_kind(kind.value);
        if (!parsed_kind) throw SchemaError(source, kind.line, "kind must be categorical or numeric");
        spec.kind = *parsed_kind;

        if (spec.kind == AttributeKind::categorical) {
            const auto& values = require(*block, "values", source);
            spec.allowed_values = split_list(values.value, ',');
            if (spec.allowed_values.empty()) throw SchemaError(source, values.line, "empty value list");
            std::set<std::string> seen;
            for (const auto& v : spec.allowed_values) {
                if (v == kUnknownValue) throw SchemaError(source, values.line, "'unknown' is reserved");
                if (!is_canonical_value(v)) {
                    throw SchemaError(source, values.line, "value '" + v + "' is not canonical (lowercase, trimmed)");
                }
                if (!seen.insert(v).second) throw SchemaError(source, values.line, "duplicate value '" + v + "'");
            }
        } else {
            const auto& range = require(*block, "range", source);
            const auto bounds = split_list(range.value, ',');
            const auto lo = bounds.size() == 2 ? parse_double(bounds[0]) : std::nullopt;
            const auto hi = bounds.size() == 2 ? parse_double(bounds[1]) : std::nullopt;
            if (!lo || !hi || *lo > *hi) throw SchemaError(source, range.line, "range must be 'lo, hi' with lo <= hi");
            spec.min_value = *lo;
            spec.max_value = *hi;
        }

        const auto& cat = require(*block, "category", source);
        const auto category = parse_risk_category(cat.value);
        if (!category) throw SchemaError(source, cat.line, "unknown category '" + cat.value + "'");
        spec.category = *category;

        const auto& theme = require(*block, "theme", source);
        const auto parsed_theme = parse_theme(theme.value);
        if (!parsed_theme) throw SchemaError(source, theme.line, "unknown theme '" + theme.value + "'");
        spec.theme = *parsed_theme;

        const auto& group = require(*block, "group", source);
        auto it = std::find_if(schema.groups_.begin(), schema.groups_.end(),
                               [&](const GroupSpec& g) { return g.name == group.value; });
        if (it == schema.groups_.end()) throw SchemaError(source, group.line, "unknown group '" + group.value + "'");
        spec.group = static_cast<std::size_t>(it - schema.groups_.begin());
        if (spec.category != it->category) {
            throw SchemaError(source, group.line,
                              "band violation: " + std::string(to_string(spec.category)) + " attribute '" + spec.name +
                                  "' placed in " + std::string(to_string(it->category)) + " group " +
                                  std::to_string(spec.group));
        }
        it->members.push_back(schema.attributes_.size());
        schema.attributes_.push_back(std::move(spec));
    }

    for (std::size_t g = 0; g < kGroupCount; ++g) {
        const auto& members = schema.groups_[g].members;
        if (members.empty()) throw SchemaError(source, group_lines[g], "group '" + schema.groups_[g].name + "' is empty");
        if (members.size() > 13) {
            throw SchemaError(source, group_lines[g], "group '" + schema.groups_[g].name + "' has more than 13 attributes");
        }
    }
    return schema;
}

Schema load_schema(const std::string& path) {
    return parse_schema(read_text_file(path), path);
}

Schema default_schema() {
    return parse_schema(default_schema_text(), "default.schema");
}

}  // namespace deeplcp
