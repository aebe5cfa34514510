#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "satdebias/types.hpp"

namespace satdebias::text {

/// A token plus its scalar-value span [start, end) in the source text.
struct Token {
  std::string text;  // lowercased
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

/// Splits on Unicode (UAX #29) word boundaries, lowercases with the
/// language's casing rules (Turkish dotted/dotless i), and drops segments
/// without any letter or digit.
std::vector<std::string> tokenize(std::string_view text, Language language);

std::vector<Token> tokenize_with_offsets(std::string_view text, Language language);

/// Locale-aware lowercase of an arbitrary string.
std::string lowercase(std::string_view text, Language language);

/// Splits after '.', '!', '?' or U+2026 when followed by whitespace or end
/// of text. Segments are trimmed; empty ones are dropped. No abbreviation
/// handling.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace satdebias::text
