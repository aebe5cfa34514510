#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/types.hpp"

namespace satdebias::biasstats {

/// Per-label length statistics. `label` is empty for whole-corpus stats.
struct LabelStats {
  std::optional<Label> label;
  std::size_t n_articles = 0;
  double avg_words = 0.0;
  double avg_sentences = 0.0;
  double avg_words_per_sentence = 0.0;
};

struct TermScore {
  std::string term;
  double score = 0.0;  // mean tf-idf over the label's documents
  std::size_t rank = 0;  // 1-based

  bool operator==(const TermScore&) const = default;
};

/// Token normalizer hook applied before term counting. Must return exactly
/// one output per input.
class Lemmatizer {
 public:
  virtual ~Lemmatizer() = default;
  virtual std::vector<std::string> lemmatize(const std::vector<std::string>& tokens) const = 0;
};

/// Dictionary lookup (form -> lemma); unknown forms pass through unchanged.
class DictionaryLemmatizer final : public Lemmatizer {
 public:
  explicit DictionaryLemmatizer(std::vector<std::pair<std::string, std::string>> entries);
  /// TSV file: form <TAB> lemma per line.
  static DictionaryLemmatizer from_tsv(const std::string& path);
  std::vector<std::string> lemmatize(const std::vector<std::string>& tokens) const override;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // sorted by form
};

/// Pipes tokens through an external command, one token per line in and one
/// lemma per line out. The command runs once per lemmatize() call.
class ProcessLemmatizer final : public Lemmatizer {
 public:
  explicit ProcessLemmatizer(std::string command) : command_(std::move(command)) {}
  std::vector<std::string> lemmatize(const std::vector<std::string>& tokens) const override;

 private:
  std::string command_;
};

/// Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1.
double smoothed_idf(std::size_t n_docs, std::size_t df) noexcept;

/// Averages over the articles carrying `label` (all articles when empty).
/// Throws InvariantError when no article matches.
LabelStats corpus_stats(const corpus::Corpus& corpus, std::optional<Label> label);

/// Top-k terms of one label by mean tf-idf, where tf = count / document
/// length and idf is computed over every document of the corpus. Ties are
/// broken by byte-wise term order. `lemmatizer` may be null (identity).
std::vector<TermScore> top_k_terms(const corpus::Corpus& corpus, Label label, std::size_t k,
                                   const Lemmatizer* lemmatizer = nullptr);

}  // namespace satdebias::biasstats
