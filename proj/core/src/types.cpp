#include "satdebias/types.hpp"

namespace satdebias {

std::string_view to_string(Label label) noexcept {
  return label == Label::Positive ? "POSITIVE" : "NEGATIVE";
}

std::string_view to_string(Language language) noexcept {
  return language == Language::Tr ? "tr" : "en";
}

std::string_view to_string(Source source) noexcept {
  switch (source) {
    case Source::Zaytung: return "zaytung";
    case Source::Aa: return "aa";
    case Source::Onion: return "onion";
    case Source::Huffpost: return "huffpost";
    case Source::IronyTr: return "ironytr";
    case Source::Generated: return "generated";
    case Source::Other: return "other";
  }
  return "other";
}

std::string_view to_string(PromptId prompt) noexcept {
  return prompt == PromptId::P1 ? "P1" : "P2";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "POSITIVE") return Label::Positive;
  if (text == "NEGATIVE") return Label::Negative;
  return std::nullopt;
}

std::optional<Language> parse_language(std::string_view text) noexcept {
  if (text == "tr") return Language::Tr;
  if (text == "en") return Language::En;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view text) noexcept {
  for (auto s : {Source::Zaytung, Source::Aa, Source::Onion, Source::Huffpost, Source::IronyTr,
                 Source::Generated, Source::Other}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<PromptId> parse_prompt_id(std::string_view text) noexcept {
  if (text == "P1" || text == "p1") return PromptId::P1;
  if (text == "P2" || text == "p2") return PromptId::P2;
  return std::nullopt;
}

Label opposite(Label label) noexcept {
  return label == Label::Positive ? Label::Negative : Label::Positive;
}

}  // namespace satdebias
