#include "deeplcp/records.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "deeplcp/error.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

std::string_view to_string(Label label) {
    return label == Label::affected ? "affected" : "unaffected";
}

std::optional<Label> parse_label(std::string_view s) {
    if (s == "affected") return Label::affected;
    if (s == "unaffected") return Label::unaffected;
    return std::nullopt;
}

std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (in_quotes) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

std::string quote_csv_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos &&
        (field.empty() || (field.front() != ' ' && field.back() != ' '))) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

RecordSet parse_records(std::istream& in, const Schema& schema, const std::string& source) {
    RecordSet result;
    std::string line;
    std::size_t line_no = 0;

    // Header: first non-blank line.
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        have_header = true;
    }
    if (!have_header) throw HeaderMismatch(source, 0, "missing header row");

    const auto header = split_csv_line(line);
    if (!header) throw HeaderMismatch(source, line_no, "unterminated quote in header");
    const auto& attrs = schema.attributes();
    std::size_t expected = attrs.size();
    if (header->size() == attrs.size() + 1 && trim((*header)[attrs.size()]) == "label") {
        result.has_labels = true;
        expected += 1;
    }
    if (header->size() != expected) {
        throw HeaderMismatch(source, line_no,
                             "header has " + std::to_string(header->size()) + " columns, schema expects " +
                                 std::to_string(attrs.size()) + " (plus optional 'label')");
    }
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (trim((*header)[i]) != attrs[i].name) {
            throw HeaderMismatch(source, line_no,
                                 "column " + std::to_string(i + 1) + " is '" + (*header)[i] + "', expected '" +
                                     attrs[i].name + "'");
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++result.data_rows;

        auto fields = split_csv_line(line);
        if (!fields) {
            result.issues.push_back({line_no, "unterminated quoted field"});
            continue;
        }
        if (fields->size() != expected) {
            result.issues.push_back({line_no, "expected " + std::to_string(expected) + " fields, found " +
                                                  std::to_string(fields->size())});
            continue;
        }
        PersonRecord record;
        if (result.has_labels) {
            const auto label = parse_label(trim(fields->back()));
            if (!label) {
                result.issues.push_back({line_no, "label must be 'affected' or 'unaffected', found '" +
                                                      fields->back() + "'"});
                continue;
            }
            record.label = label;
            fields->pop_back();
        }
        record.values = std::move(*fields);
        result.records.push_back(std::move(record));
        result.record_lines.push_back(line_no);
    }
    if (in.bad()) throw IoError("error reading '" + source + "'");
    return result;
}

RecordSet parse_records_file(const std::string& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_records(in, schema, path);
}

void write_records(std::ostream& out, std::span<const PersonRecord> records, const Schema& schema, bool with_labels) {
    const auto& attrs = schema.attributes();
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i) out << ',';
        out << attrs[i].name;
    }
    if (with_labels) out << ",label";
    out << '\n';
    for (const auto& r : records) {
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            if (i) out << ',';
            out << quote_csv_field(r.values[i]);
        }
        if (with_labels) out << ',' << (r.label ? to_string(*r.label) : std::string_view{});
        out << '\n';
    }
}

void write_records_file(const std::string& path, std::span<const PersonRecord> records, const Schema& schema,
                        bool with_labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_records(out, records, schema, with_labels);
    if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace deeplcp
