#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ontorec {

/// Splits one physical line of a semicolon-separated file. Fields may be
/// enclosed in double quotes; a doubled quote inside a quoted field encodes
/// a literal quote. Returns nullopt on a structurally broken row
/// (unterminated quote, garbage after a closing quote).
inline std::optional<std::vector<std::string>> split_semicolon_row(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            if (!cur.empty() || was_quoted) return std::nullopt;  // quote mid-field
            in_quotes = true;
            was_quoted = true;
        } else if (c == ';') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else {
            if (was_quoted) return std::nullopt;  // text after closing quote
            cur += c;
        }
    }
    if (in_quotes) return std::nullopt;
    fields.push_back(std::move(cur));
    return fields;
}

/// Latin-1 bytes to UTF-8. Bytes below 0x80 pass through; the rest become
/// two-byte sequences.
inline std::string latin1_to_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char b : s) {
        if (b < 0x80) {
            out += static_cast<char>(b);
        } else {
            out += static_cast<char>(0xC0 | (b >> 6));
            out += static_cast<char>(0x80 | (b & 0x3F));
        }
    }
    return out;
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace ontorec
