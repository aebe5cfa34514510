#include "satdebias/biasstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "satdebias/error.hpp"
#include "satdebias/text.hpp"

namespace satdebias::biasstats {
namespace {

// Exact accumulator for sums of count/length terms. Equal rationals reduce
// to identical (num, den) pairs, so equal scores compare equal bit-for-bit.
// Falls back to sorted floating summation once int64 would overflow.
class TermAccumulator {
 public:
  void add(std::int64_t count, std::int64_t length) {
    parts_.push_back(static_cast<double>(count) / static_cast<double>(length));
    if (!exact_) return;
    const std::int64_t g = std::gcd(den_, length);
    const __int128 lcm = static_cast<__int128>(den_ / g) * length;
    const __int128 num = static_cast<__int128>(num_) * (lcm / den_) +
                         static_cast<__int128>(count) * (lcm / length);
    store(num, lcm);
  }

  /// Mean over `n_docs` documents.
  double mean(std::size_t n_docs) {
    if (exact_) {
      store(num_, static_cast<__int128>(den_) * static_cast<__int128>(n_docs));
      if (exact_) return static_cast<double>(num_) / static_cast<double>(den_);
    }
    std::sort(parts_.begin(), parts_.end());
    long double sum = 0;
    for (double p : parts_) sum += p;
    return static_cast<double>(sum / static_cast<long double>(n_docs));
  }

 private:
  void store(__int128 num, __int128 den) {
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    constexpr __int128 kMax = INT64_MAX;
    if (num > kMax || den > kMax) {
      exact_ = false;
      return;
    }
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  bool exact_ = true;
  std::vector<double> parts_;
};

}  // namespace

double smoothed_idf(std::size_t n_docs, std::size_t df) noexcept {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

LabelStats corpus_stats(const corpus::Corpus& corpus, std::optional<Label> label) {
  LabelStats stats;
  stats.label = label;
  std::size_t words = 0;
  std::size_t sentences = 0;
  for (const corpus::Article& a : corpus.articles()) {
    if (label && a.label != *label) continue;
    ++stats.n_articles;
    words += text::tokenize(a.body, a.language).size();
    sentences += text::split_sentences(a.body).size();
  }
  if (stats.n_articles == 0) {
    throw InvariantError("corpus '" + corpus.name() + "' has no " +
                         (label ? std::string(to_string(*label)) : std::string("")) + " articles");
  }
  const auto n = static_cast<double>(stats.n_articles);
  stats.avg_words = static_cast<double>(words) / n;
  stats.avg_sentences = static_cast<double>(sentences) / n;
  if (stats.avg_sentences > 0) stats.avg_words_per_sentence = stats.avg_words / stats.avg_sentences;
  return stats;
}

std::vector<TermScore> top_k_terms(const corpus::Corpus& corpus, Label label, std::size_t k,
                                   const Lemmatizer* lemmatizer) {
  const std::size_t n_label = corpus.count(label);
  if (n_label == 0)
    throw InvariantError("corpus '" + corpus.name() + "' has no " + std::string(to_string(label)) + " articles");
  if (k == 0) return {};

  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const corpus::Article& a : corpus.articles()) docs.push_back(text::tokenize(a.body, a.language));

  if (lemmatizer) {
    // One lemmatizer round trip over the distinct surface forms.
    std::unordered_map<std::string, std::string> lemma_of;
    for (const auto& d : docs)
      for (const auto& t : d) lemma_of.emplace(t, std::string());
    std::vector<std::string> forms;
    forms.reserve(lemma_of.size());
    for (const auto& [form, unused] : lemma_of) forms.push_back(form);
    std::sort(forms.begin(), forms.end());
    const std::vector<std::string> lemmas = lemmatizer->lemmatize(forms);
    if (lemmas.size() != forms.size())
      throw Error("lemmatizer returned " + std::to_string(lemmas.size()) + " lemmas for " +
                  std::to_string(forms.size()) + " tokens");
    for (std::size_t i = 0; i < forms.size(); ++i) lemma_of[forms[i]] = lemmas[i];
    for (auto& d : docs)
      for (auto& t : d) t = lemma_of[t];
  }

  std::unordered_map<std::string, std::size_t> df;
  std::unordered_map<std::string, TermAccumulator> acc;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& t : docs[i]) ++counts[t];
    for (const auto& [term, c] : counts) ++df[term];
    if (corpus.articles()[i].label != label || docs[i].empty()) continue;
    const auto length = static_cast<std::int64_t>(docs[i].size());
    for (const auto& [term, c] : counts) acc[term].add(c, length);
  }

  std::vector<TermScore> scores;
  scores.reserve(acc.size());
  for (auto& [term, a] : acc)
    scores.push_back(TermScore{term, smoothed_idf(corpus.size(), df[term]) * a.mean(n_label), 0});
  auto better = [](const TermScore& a, const TermScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  };
  const std::size_t keep = std::min(k, scores.size());
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep), scores.end(), better);
  scores.resize(keep);
  for (std::size_t i = 0; i < keep; ++i) scores[i].rank = i + 1;
  return scores;
}

}  // namespace satdebias::biasstats
