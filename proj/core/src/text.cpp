// SPDX-License-Identifier: Apache-2.0
#include "ramo/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>

namespace ramo {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[pos]; advances pos. Malformed,
// overlong and surrogate sequences yield kInvalid and consume one byte.
char32_t decode_one(std::string_view text, std::size_t& pos) noexcept {
    const auto b0 = static_cast<unsigned char>(text[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kInvalid;
    }
    pos += len;
    return cp;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Letter, digit and combining-mark blocks of the scripts that show up in
// course catalogs. Coarse on purpose: a few symbols inside these blocks
// survive, which is harmless for matching.
constexpr std::array<std::pair<char32_t, char32_t>, 30> kWordRanges{{
    {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA}, {0x00C0, 0x00D6},
    {0x00D8, 0x00F6}, {0x00F8, 0x02AF}, {0x0300, 0x036F}, {0x0370, 0x037D},
    {0x037F, 0x0386}, {0x0388, 0x03FF}, {0x0400, 0x052F}, {0x0531, 0x0587},
    {0x05D0, 0x05EA}, {0x0620, 0x064A}, {0x0660, 0x0669}, {0x0671, 0x06D3},
    {0x0900, 0x0963}, {0x0966, 0x097F}, {0x0E01, 0x0E3A}, {0x0E40, 0x0E4E},
    {0x1E00, 0x1FFF}, {0x3041, 0x3096}, {0x30A1, 0x30FA}, {0x3400, 0x4DBF},
    {0x4E00, 0x9FFF}, {0xAC00, 0xD7A3}, {0xF900, 0xFAFF}, {0xFF10, 0xFF19},
    {0xFF21, 0xFF3A}, {0xFF41, 0xFF5A},
}};

bool is_word_char(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    return std::any_of(kWordRanges.begin(), kWordRanges.end(),
                       [cp](const auto& r) { return cp >= r.first && cp <= r.second; });
}

bool is_allowed_punct(char32_t cp) noexcept {
    constexpr std::string_view kAllowed = ".,:;!?'\"()&+/%-";
    return cp < 0x80 && kAllowed.find(static_cast<char>(cp)) != std::string_view::npos;
}

bool is_space(char32_t cp) noexcept {
    switch (cp) {
        case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
        case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_dropped(char32_t cp) noexcept {
    return cp == kInvalid || cp == 0xFFFD || cp < 0x20 || (cp >= 0x7F && cp <= 0x9F) ||
           (cp >= 0x200B && cp <= 0x200F) || cp == 0xFEFF || cp == 0x00AD;
}

}  // namespace

std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const char32_t cp = decode_one(raw, pos);
        if (is_space(cp)) {
            pending_space = true;
            continue;
        }
        if (is_dropped(cp)) continue;
        if (!is_word_char(cp) && !is_allowed_punct(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        encode(cp, out);
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string_view trim(std::string_view text) noexcept {
    constexpr std::string_view kWs = " \t\r\n\v\f";
    const auto first = text.find_first_not_of(kWs);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(kWs);
    return text.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view text) { return ascii_lower(clean_text(text)); }

std::size_t utf8_length(std::string_view text) noexcept {
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        decode_one(text, pos);
        ++n;
    }
    return n;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = end + 1;
    }
    return lines;
}

}  // namespace ramo
