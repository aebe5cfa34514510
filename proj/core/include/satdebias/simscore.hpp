#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/types.hpp"

namespace satdebias::simscore {

/// Token embedding matrix with unit-norm rows (row-major storage).
class TokenEmbeddings {
 public:
  /// Rows whose norm is within `renormalize_tolerance` of 1 are rescaled;
  /// anything further off (or zero / non-finite) is rejected.
  TokenEmbeddings(std::vector<std::string> tokens, std::vector<double> values, std::size_t dim,
                  double renormalize_tolerance = 1e-3);
  TokenEmbeddings(std::vector<std::string> tokens, const std::vector<std::vector<double>>& rows,
                  double renormalize_tolerance = 1e-3);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * dim_, dim_}; }

 private:
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::size_t dim_;
};

struct ScorePRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// 2PR/(P+R), or 0 when P+R is 0.
double f1_of(double precision, double recall) noexcept;

/// Greedy matching: recall averages, over reference tokens, the best inner
/// product against any candidate token; precision does the same over
/// candidate tokens. Inner products are clamped to [-1, 1]. No idf
/// weighting and no baseline rescaling.
ScorePRF greedy_match_score(const TokenEmbeddings& candidate, const TokenEmbeddings& reference);

/// Contextual token embedding service. Must tolerate concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual TokenEmbeddings embed(std::string_view text, Language language) = 0;
};

/// Offline stub: tokenizes with the corpus tokenizer and maps each token to a
/// pseudo-random unit vector derived from its hash. Identical tokens get
/// identical vectors; unrelated tokens are nearly orthogonal.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = 64, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {}
  TokenEmbeddings embed(std::string_view text, Language language) override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// `POST {base_url}/embed_tokens` with {"text", "language"} returning
/// {"tokens": [...], "vectors": [[...], ...]}.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(std::string base_url, std::string api_key = {}, int timeout_seconds = 120)
      : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {}
  TokenEmbeddings embed(std::string_view text, Language language) override;

 private:
  std::string base_url_;
  std::string api_key_;
  int timeout_seconds_;
};

/// Parses an embed_tokens response body.
TokenEmbeddings decode_embeddings(const std::string& body);

struct TextPair {
  std::string original_id;
  std::string generated_id;
  Language language = Language::Tr;
  std::string original;
  std::string generated;
};

struct PairScore {
  std::string original_id;
  std::string generated_id;
  std::optional<ScorePRF> score;
  std::string error;
};

struct SimilarityReport {
  ScorePRF aggregate;  // unweighted mean over successful pairs
  std::vector<PairScore> pairs;
  std::size_t n_failed = 0;
};

/// Scores every pair with the generated text as candidate and the original
/// as reference. Embedder failures are recorded per pair; the aggregate
/// covers the successes. Throws on an empty list or when every pair fails.
SimilarityReport corpus_similarity(const std::vector<TextPair>& pairs, Embedder& embedder,
                                   std::size_t max_in_flight = 1);

/// Pairs a debiased corpus with its sources through the
/// `source_article_id` metadata written by build_debiased_corpus.
std::vector<TextPair> pairs_from_corpora(const corpus::Corpus& original, const corpus::Corpus& debiased);

/// JSONL: {"original_id", "generated_id", "language", "original", "generated"}.
std::vector<TextPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::filesystem::path& path, const std::vector<TextPair>& pairs);

/// TSV with one row per pair and a final "MEAN" row.
std::string report_tsv(const SimilarityReport& report);

}  // namespace satdebias::simscore
