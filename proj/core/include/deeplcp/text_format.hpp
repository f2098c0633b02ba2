#ifndef DEEPLCP_TEXT_FORMAT_HPP
#define DEEPLCP_TEXT_FORMAT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deeplcp {

// The line-oriented "key: value block" dialect shared by schema, cleaning,
// synthetic-data and CLI config files:
//
//   # comment
//   top_level_key: value
//   kind name            <- block header, column 0
//     key: value         <- entry, indented
//
// Entries before the first header belong to an unnamed top-level block.
struct KvEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct KvBlock {
    std::string kind;  // empty for the top-level block
    std::string name;
    std::size_t line = 0;
    std::vector<KvEntry> entries;

    const KvEntry* find(std::string_view key) const;
};

struct KvDocument {
    KvBlock top;
    std::vector<KvBlock> blocks;
};

// Throws ConfigError (with `source` and line) on malformed lines.
KvDocument parse_kv_document(std::string_view text, const std::string& source);

std::string read_text_file(const std::string& path);

std::string_view trim(std::string_view s);
std::vector<std::string> split_list(std::string_view s, char sep);

// Full-match parse; rejects trailing garbage, NaN and infinities.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);
// Fixed-point with `digits` fractional digits.
std::string format_fixed(double value, int digits);

}  // namespace deeplcp

#endif  // DEEPLCP_TEXT_FORMAT_HPP
