// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ramo::csv {

struct Record {
    std::size_t line = 0;  // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// A leading UTF-8 BOM is skipped. Throws Error{MalformedCsv} on an
/// unterminated quote or text after a closing quote.
class Reader {
public:
    explicit Reader(std::istream& in);

    std::optional<Record> next();

private:
    std::istream& in_;
    std::size_t line_ = 1;
    bool first_ = true;
};

std::string escape_field(std::string_view field);

}  // namespace ramo::csv
