#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace safeml::csv {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_number(double value)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{})
        return std::to_string(value);
    return std::string(buf.data(), end);
}

/// Parses a whole token as a finite decimal; anything else yields nullopt.
inline std::optional<double> parse_number(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    // from_chars rejects a leading '+', which plain CSV exports sometimes carry.
    if (text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

/// Reads one record. Handles double-quoted fields with "" escapes and quoted
/// line breaks. Returns false at end of input.
inline bool read_record(std::istream& in, std::vector<std::string>& fields)
{
    fields.clear();
    std::string line;
    if (!std::getline(in, line))
        return false;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
        if (i == line.size()) {
            if (quoted) {
                std::string next;
                if (!std::getline(in, next))
                    break;
                field += '\n';
                line = std::move(next);
                i = 0;
                continue;
            }
            break;
        }
        const char c = line[i++];
        if (quoted) {
            if (c == '"') {
                if (i < line.size() && line[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r' || i != line.size()) {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

inline void write_field(std::ostream& out, std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"')
            out << '"';
        out << c;
    }
    out << '"';
}

} // namespace safeml::csv
