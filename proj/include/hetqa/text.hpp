#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hetqa::text {

/// Byte length of the whitespace code point starting at text[i], or 0.
/// Recognizes ASCII whitespace and the Unicode White_Space characters encoded
/// in UTF-8 (U+0085, U+00A0, U+1680, U+2000-U+200A, U+2028, U+2029, U+202F,
/// U+205F, U+3000).
std::size_t whitespace_width(std::string_view text, std::size_t i);

/// Splits on whitespace_width; never yields empty pieces.
std::vector<std::string_view> split_ws(std::string_view text);

/// ASCII-only lowercasing; other bytes pass through.
std::string ascii_lower(std::string_view s);

bool is_ascii_punct(char c);

/// Strips ASCII punctuation from both ends.
std::string_view trim_punct(std::string_view s);

bool is_blank(std::string_view s);

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace hetqa::text
