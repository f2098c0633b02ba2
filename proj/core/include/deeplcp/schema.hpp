#ifndef DEEPLCP_SCHEMA_HPP
#define DEEPLCP_SCHEMA_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deeplcp {

inline constexpr std::size_t kAttributeCount = 31;
inline constexpr std::size_t kGroupCount = 18;

// Band layout of the reduced matrix: 5 minor-risk rows, 6 major-risk rows,
// 7 symptom rows.
inline constexpr std::array<std::size_t, 3> kBandSizes{5, 6, 7};

// Reserved value accepted by every attribute; rules weight it as zero.
inline constexpr std::string_view kUnknownValue = "unknown";

enum class AttributeKind { categorical, numeric };
enum class RiskCategory { minor_risk, major_risk, symptom };
enum class Theme { thoracic_signs, cough, feeding, consumer, personal_history, residence };

std::string_view to_string(AttributeKind kind);
std::string_view to_string(RiskCategory category);
std::string_view to_string(Theme theme);
std::optional<AttributeKind> parse_attribute_kind(std::string_view s);
std::optional<RiskCategory> parse_risk_category(std::string_view s);
std::optional<Theme> parse_theme(std::string_view s);

// Category every row of group `group` must hold.
RiskCategory band_category(std::size_t group);

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::categorical;
    std::vector<std::string> allowed_values;  // categorical only, excludes "unknown"
    double min_value = 0.0;                   // numeric only, inclusive
    double max_value = 0.0;
    RiskCategory category = RiskCategory::minor_risk;
    Theme theme = Theme::personal_history;
    std::size_t group = 0;

    // True for "unknown" and for canonical values of this attribute.
    bool accepts(std::string_view value) const;
};

struct GroupSpec {
    std::string name;
    RiskCategory category = RiskCategory::minor_risk;
    std::vector<std::size_t> members;  // attribute indices, schema order
};

// The questionnaire layout: 31 attributes partitioned into 18 groups whose
// categories follow the 5/6/7 band layout. Construct through parse_schema or
// load_schema, which enforce every invariant.
class Schema {
public:
    const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }
    const std::vector<GroupSpec>& groups() const noexcept { return groups_; }
    const AttributeSpec& attribute(std::size_t i) const { return attributes_.at(i); }

    std::optional<std::size_t> index_of(std::string_view name) const;

    friend Schema parse_schema(std::string_view text, const std::string& source);

private:
    std::vector<AttributeSpec> attributes_;
    std::vector<GroupSpec> groups_;
};

// Throws SchemaError with line diagnostics.
Schema parse_schema(std::string_view text, const std::string& source = "<schema>");
Schema load_schema(const std::string& path);

// The shipped default questionnaire (data/default.schema).
Schema default_schema();

}  // namespace deeplcp

#endif  // DEEPLCP_SCHEMA_HPP
