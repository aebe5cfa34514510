#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace satdebias {

/// Binary class. POSITIVE is the satirical / ironic / sarcastic class.
enum class Label { Positive, Negative };

enum class Language { Tr, En };

enum class Source { Zaytung, Aa, Onion, Huffpost, IronyTr, Generated, Other };

/// Debiasing prompt variants.
enum class PromptId { P1, P2 };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Language language) noexcept;
std::string_view to_string(Source source) noexcept;
std::string_view to_string(PromptId prompt) noexcept;

// Exact (case-sensitive) parsers for the canonical spellings above.
std::optional<Label> parse_label(std::string_view text) noexcept;
std::optional<Language> parse_language(std::string_view text) noexcept;
std::optional<Source> parse_source(std::string_view text) noexcept;
/// Accepts "P1"/"P2" in either case.
std::optional<PromptId> parse_prompt_id(std::string_view text) noexcept;

Label opposite(Label label) noexcept;

}  // namespace satdebias
