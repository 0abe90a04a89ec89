// SPDX-License-Identifier: Apache-2.0
#include "ramo/csv.hpp"

#include <istream>

#include "ramo/error.hpp"

namespace ramo::csv {

Reader::Reader(std::istream& in) : in_(in) {}

std::optional<Record> Reader::next() {
    if (first_) {
        first_ = false;
        if (in_.peek() == 0xEF) {
            char bom[3];
            in_.read(bom, 3);
            if (in_.gcount() != 3 || bom[1] != '\xBB' || bom[2] != '\xBF') {
                in_.clear();
                in_.seekg(0);
            }
        }
    }
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

    Record rec;
    rec.line = line_;
    std::string field;
    bool in_quotes = false;
    bool after_quote = false;  // just closed a quoted field
    bool any = false;

    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            rec.fields.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in_.peek() == '\n') in_.get();
            ++line_;
            rec.fields.push_back(std::move(field));
            return rec;
        } else if (c == '"') {
            if (!field.empty() || after_quote) {
                throw Error(ErrorKind::MalformedCsv,
                            "line " + std::to_string(line_) + ": stray quote in unquoted field");
            }
            in_quotes = true;
        } else {
            if (after_quote) {
                throw Error(ErrorKind::MalformedCsv,
                            "line " + std::to_string(line_) + ": text after closing quote");
            }
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw Error(ErrorKind::MalformedCsv,
                    "line " + std::to_string(rec.line) + ": unterminated quoted field");
    }
    if (!any) return std::nullopt;
    rec.fields.push_back(std::move(field));
    return rec;
}

std::string escape_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace ramo::csv
