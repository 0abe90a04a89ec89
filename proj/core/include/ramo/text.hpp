// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ramo {

/// Normalizes a raw catalog cell:
///  - control characters, U+FFFD and invalid UTF-8 are dropped,
///  - anything that is not a letter, digit or one of .,:;!?'"()&+/%- becomes a space,
///  - whitespace runs collapse to one space and the ends are trimmed.
/// Total and idempotent.
std::string clean_text(std::string_view raw);

/// ASCII case fold. Non-ASCII bytes pass through unchanged.
std::string ascii_lower(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

/// clean_text followed by ascii_lower; the comparison key for names.
std::string normalize_key(std::string_view text);

/// Number of UTF-8 code points. Invalid bytes count as one each.
std::size_t utf8_length(std::string_view text) noexcept;

std::vector<std::string> split_lines(std::string_view text);

}  // namespace ramo
