#include "satdebias/text.hpp"

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <memory>
#include <mutex>

#include "satdebias/error.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::text {
namespace {

const icu::Locale& locale_for(Language language) {
  static const icu::Locale tr("tr", "TR");
  static const icu::Locale en("en", "US");
  return language == Language::Tr ? tr : en;
}

// BreakIterator construction is expensive; keep one per thread and language.
icu::BreakIterator& word_iterator(Language language) {
  thread_local std::unique_ptr<icu::BreakIterator> cache[2];
  auto& slot = cache[language == Language::Tr ? 0 : 1];
  if (!slot) {
    UErrorCode status = U_ZERO_ERROR;
    slot.reset(icu::BreakIterator::createWordInstance(locale_for(language), status));
    if (U_FAILURE(status) || !slot) throw Error(std::string("ICU word iterator: ") + u_errorName(status));
  }
  return *slot;
}

bool has_alnum(const icu::UnicodeString& s) {
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    if (u_isalnum(c)) return true;
    i += U16_LENGTH(c);
  }
  return false;
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

std::string lowercase(std::string_view text, Language language) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(locale_for(language));
  return to_utf8(s);
}

std::vector<Token> tokenize_with_offsets(std::string_view text, Language language) {
  std::vector<Token> out;
  if (text.empty()) return out;
  const icu::UnicodeString s =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::BreakIterator& it = word_iterator(language);
  it.setText(s);

  // ICU reports UTF-16 indices; track scalar offsets incrementally.
  int32_t prev = it.first();
  std::size_t prev_scalar = 0;
  for (int32_t next = it.next(); next != icu::BreakIterator::DONE; prev = next, next = it.next()) {
    const std::size_t len_scalar = static_cast<std::size_t>(s.countChar32(prev, next - prev));
    icu::UnicodeString piece(s, prev, next - prev);
    if (has_alnum(piece)) {
      piece.toLower(locale_for(language));
      out.push_back(Token{to_utf8(piece), prev_scalar, prev_scalar + len_scalar});
    }
    prev_scalar += len_scalar;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, Language language) {
  std::vector<std::string> out;
  for (Token& t : tokenize_with_offsets(text, language)) out.push_back(std::move(t.text));
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  const std::vector<char32_t> cps = utf8::decode(text);
  std::vector<std::string> out;
  std::size_t begin = 0;
  auto emit = [&](std::size_t end) {
    std::vector<char32_t> seg(cps.begin() + static_cast<std::ptrdiff_t>(begin),
                              cps.begin() + static_cast<std::ptrdiff_t>(end));
    const std::string piece(utf8::trim(utf8::encode(seg)));
    if (!piece.empty()) out.push_back(piece);
    begin = end;
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    const bool terminal = c == U'.' || c == U'!' || c == U'?' || c == U'…';
    if (terminal && (i + 1 == cps.size() || utf8::is_space(cps[i + 1]))) emit(i + 1);
  }
  if (begin < cps.size()) emit(cps.size());
  return out;
}

}  // namespace satdebias::text
