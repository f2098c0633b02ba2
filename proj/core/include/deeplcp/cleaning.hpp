#ifndef DEEPLCP_CLEANING_HPP
#define DEEPLCP_CLEANING_HPP

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "deeplcp/records.hpp"
#include "deeplcp/schema.hpp"

namespace deeplcp {

enum class CasePolicy { preserve, lower, upper };
// trim strips the ends; collapse also folds inner whitespace runs to one space.
enum class WhitespacePolicy { preserve, trim, collapse };

struct CleaningConfig {
    std::set<std::string> irrelevant_markers;             // stored standardized
    std::map<std::string, std::string> typo_dictionary;  // standardized key -> canonical value
    CasePolicy case_policy = CasePolicy::lower;
    WhitespacePolicy whitespace_policy = WhitespacePolicy::collapse;
};

std::string standardize(std::string_view value, const CleaningConfig& cfg);

// Checks that dictionary values are schema-valid canonical values, that no
// dictionary value is itself a key, and that "unknown" is not a key. These
// make clean_record idempotent. Throws ConfigError.
void validate_cleaning_config(const CleaningConfig& cfg, const Schema& schema);

CleaningConfig parse_cleaning_config(std::string_view text, const Schema& schema,
                                     const std::string& source = "<cleaning>");
CleaningConfig load_cleaning_config(const std::string& path, const Schema& schema);
CleaningConfig default_cleaning_config(const Schema& schema);

// standardize -> typo-fix -> irrelevant-drop, then validation.
// Throws CleaningError naming the first attribute that is still invalid.
PersonRecord clean_record(const PersonRecord& record, const CleaningConfig& cfg, const Schema& schema);

}  // namespace deeplcp

#endif  // DEEPLCP_CLEANING_HPP
