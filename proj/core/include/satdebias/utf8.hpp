#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace satdebias::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to
/// U+FFFD one byte at a time.
std::vector<char32_t> decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

/// Number of scalar values in `text`.
std::size_t length(std::string_view text);

/// Byte offset of scalar index `index` (index == length() maps to size()).
std::size_t byte_offset(std::string_view text, std::size_t index);

/// Substring by scalar-value range [start, end).
std::string_view slice(std::string_view text, std::size_t start, std::size_t end);

bool is_space(char32_t cp) noexcept;

/// Trims Unicode whitespace from both ends.
std::string_view trim(std::string_view text);

}  // namespace satdebias::utf8
