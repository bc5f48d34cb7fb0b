#pragma once

// RFC 4180 reading and writing: comma separated, CRLF or LF records, fields
// quoted with '"' and quotes doubled inside quoted fields.

#include "bwtex/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bwtex::csv {

using Row = std::vector<std::string>;

inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string write(const std::vector<Row>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += quote(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

inline std::vector<Row> parse(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                    if (i + 1 < text.size() && text[i + 1] != ',' && text[i + 1] != '\r' && text[i + 1] != '\n')
                        fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": text after closing quote");
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started || !field.empty())
                fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": quote inside unquoted field");
            quoted = true;
            field_started = true;
            break;
        case ',': end_field(); break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            [[fallthrough]];
        case '\n':
            end_row();
            ++line;
            break;
        default: field += c;
        }
    }
    if (quoted) fail(ErrorCode::ParseError, "unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

} // namespace bwtex::csv
