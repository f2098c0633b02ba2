#include "deeplcp/text_format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "deeplcp/error.hpp"

namespace deeplcp {

const KvEntry* KvBlock::find(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto end = pos == std::string_view::npos ? s.size() : pos;
        const auto item = trim(s.substr(start, end - start));
        if (!item.empty()) out.emplace_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

KvDocument parse_kv_document(std::string_view text, const std::string& source) {
    KvDocument doc;
    KvBlock* current = &doc.top;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (trim(line).empty()) {
            if (nl == std::string_view::npos) break;
            continue;
        }
        const bool indented = line.front() == ' ' || line.front() == '\t';
        const auto body = trim(line);
        const auto colon = body.find(':');

        if (!indented && colon == std::string_view::npos) {
            // Block header: "kind [name]".
            const auto space = body.find_first_of(" \t");
            KvBlock block;
            block.kind = std::string(body.substr(0, space));
            if (space != std::string_view::npos) block.name = std::string(trim(body.substr(space)));
            if (block.name.find_first_of(" \t") != std::string::npos) {
                throw ConfigError(source, line_no, "block header must be 'kind [name]'");
            }
            block.line = line_no;
            doc.blocks.push_back(std::move(block));
            current = &doc.blocks.back();
        } else {
            if (colon == std::string_view::npos) {
                throw ConfigError(source, line_no, "expected 'key: value'");
            }
            if (!indented && current != &doc.top && !doc.blocks.empty()) {
                throw ConfigError(source, line_no, "entries inside a block must be indented");
            }
            KvEntry entry;
            entry.key = std::string(trim(body.substr(0, colon)));
            entry.value = std::string(trim(body.substr(colon + 1)));
            entry.line = line_no;
            if (entry.key.empty()) throw ConfigError(source, line_no, "empty key");
            if (indented && current == &doc.top) {
                throw ConfigError(source, line_no, "indented entry outside of a block");
            }
            current->entries.push_back(std::move(entry));
        }
        if (nl == std::string_view::npos) break;
    }
    return doc;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return ss.str();
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<long long> parse_integer(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int digits) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", digits, value);
    return buf.data();
}

}  // namespace deeplcp
