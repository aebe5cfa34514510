#include "satdebias/judge.hpp"

#include <algorithm>

#include "satdebias/debias.hpp"
#include "satdebias/text.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::model {

Lexemes Lexemes::defaults(Language language) {
  if (language == Language::Tr) return Lexemes{{"satirik"}, {"satirik değil"}};
  return Lexemes{{"satirical"}, {"non-satirical", "not satirical"}};
}

const std::string& default_judge_prompt(Language language) {
  static const std::string tr =
      "Aşağıdaki haber metni satirik mi? Yalnızca \"satirik\" ya da \"satirik değil\" olarak cevap ver.\n"
      "Haber metni:\n{{BODY}}";
  static const std::string en =
      "Is the following news text satirical? Answer only with \"satirical\" or \"non-satirical\".\n"
      "Article text:\n{{BODY}}";
  return language == Language::Tr ? tr : en;
}

Predicted parse_judgement(const std::string& completion, const Lexemes& lexemes, Language language) {
  const std::string haystack = text::lowercase(completion, language);
  struct Candidate {
    std::string text;
    bool positive;
  };
  std::vector<Candidate> candidates;
  for (const auto& l : lexemes.positive) candidates.push_back({text::lowercase(l, language), true});
  for (const auto& l : lexemes.negative) candidates.push_back({text::lowercase(l, language), false});
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.text.size() > b.text.size(); });

  std::vector<bool> taken(haystack.size(), false);
  bool found_pos = false;
  bool found_neg = false;
  for (const Candidate& c : candidates) {
    if (c.text.empty()) continue;
    for (auto pos = haystack.find(c.text); pos != std::string::npos; pos = haystack.find(c.text, pos + 1)) {
      const auto first = taken.begin() + static_cast<std::ptrdiff_t>(pos);
      const auto last = first + static_cast<std::ptrdiff_t>(c.text.size());
      if (std::any_of(first, last, [](bool b) { return b; })) continue;
      std::fill(first, last, true);
      (c.positive ? found_pos : found_neg) = true;
    }
  }
  if (found_pos == found_neg) return Predicted::NonResponse;
  return found_pos ? Predicted::Positive : Predicted::Negative;
}

JudgeResult llm_judge(const corpus::Article& article, provider::ChatProvider& provider, const JudgeConfig& config) {
  debias::PromptTemplate prompt{PromptId::P1, article.language,
                                config.prompt.empty() ? default_judge_prompt(article.language) : config.prompt};
  const Lexemes lexemes = config.lexemes.positive.empty() && config.lexemes.negative.empty()
                              ? Lexemes::defaults(article.language)
                              : config.lexemes;
  provider::ChatRequest request;
  request.messages.push_back({"user", debias::render_prompt(prompt, article)});

  JudgeResult result;
  const int attempts = std::max(1, config.retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const provider::ChatResponse resp = provider.complete(request);
    if (resp.ok() && !utf8::trim(resp.content).empty()) {
      result.completion = resp.content;
      result.predicted = parse_judgement(resp.content, lexemes, article.language);
      if (result.predicted == Predicted::NonResponse) result.cause = "no unambiguous label in completion";
      return result;
    }
    result.cause = !resp.error.empty() ? resp.error
                   : resp.ok()         ? std::string("empty completion")
                                       : "HTTP " + std::to_string(resp.status);
    if (!provider::is_retryable(resp)) break;
    if (attempt < attempts) config.retry.wait(attempt);
  }
  result.predicted = Predicted::NonResponse;
  return result;
}

}  // namespace satdebias::model
