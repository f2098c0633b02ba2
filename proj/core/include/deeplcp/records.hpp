#ifndef DEEPLCP_RECORDS_HPP
#define DEEPLCP_RECORDS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deeplcp/schema.hpp"

namespace deeplcp {

enum class Label { affected, unaffected };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view s);

// One individual's answers, aligned with Schema::attributes().
struct PersonRecord {
    std::vector<std::string> values;
    std::optional<Label> label;

    friend bool operator==(const PersonRecord&, const PersonRecord&) = default;
};

// A data row that could not become a record (wrong arity, bad label).
struct ParseIssue {
    std::size_t line = 0;
    std::string message;
};

struct RecordSet {
    std::vector<PersonRecord> records;
    std::vector<std::size_t> record_lines;  // source line of each record
    std::vector<ParseIssue> issues;
    std::size_t data_rows = 0;  // non-blank rows after the header
    bool has_labels = false;
};

// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
// Returns nullopt for an unterminated quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);
std::string quote_csv_field(std::string_view field);

// Header must list the schema attributes in order, optionally followed by a
// "label" column. Throws HeaderMismatch / IoError.
RecordSet parse_records(std::istream& in, const Schema& schema, const std::string& source = "<records>");
RecordSet parse_records_file(const std::string& path, const Schema& schema);

void write_records(std::ostream& out, std::span<const PersonRecord> records, const Schema& schema, bool with_labels);
void write_records_file(const std::string& path, std::span<const PersonRecord> records, const Schema& schema,
                        bool with_labels);

}  // namespace deeplcp

#endif  // DEEPLCP_RECORDS_HPP
