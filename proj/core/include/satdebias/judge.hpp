#pragma once

#include <string>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/predictions.hpp"
#include "satdebias/provider.hpp"

namespace satdebias::model {

/// Label words searched in a completion, per language.
struct Lexemes {
  std::vector<std::string> positive;
  std::vector<std::string> negative;

  /// tr: "satirik" / "satirik değil"; en: "satirical" / "non-satirical", "not satirical".
  static Lexemes defaults(Language language);
};

struct JudgeConfig {
  /// Must contain {{BODY}} once. Empty selects the built-in prompt for the
  /// article language.
  std::string prompt;
  /// Empty lists select Lexemes::defaults for the article language.
  Lexemes lexemes;
  provider::RetryPolicy retry;
};

struct JudgeResult {
  Predicted predicted = Predicted::NonResponse;
  std::string completion;
  std::string cause;  // why the result is NONRESPONSE, if it is
};

const std::string& default_judge_prompt(Language language);

/// Case-insensitive longest-match-first scan. Exactly one lexeme family
/// present gives that label; none or both give NONRESPONSE.
Predicted parse_judgement(const std::string& completion, const Lexemes& lexemes, Language language);

/// Asks the provider to classify `article`. Transport failures after retries
/// become NONRESPONSE with the cause recorded.
JudgeResult llm_judge(const corpus::Article& article, provider::ChatProvider& provider,
                      const JudgeConfig& config = {});

}  // namespace satdebias::model
