#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/model.hpp"

namespace satdebias::explain {

struct AttributionEntry {
  std::string token;
  std::size_t start = 0;  // scalar offsets into the body
  std::size_t end = 0;
  double score = 0.0;
};

struct AttributionVector {
  std::string article_id;
  std::vector<AttributionEntry> entries;  // document order
};

/// Leave-one-occurrence-out occlusion: score = logit(document) minus the
/// logit with that occurrence masked. Masking drops the occurrence from the
/// term counts but keeps the tf denominator, so scores add up to
/// logit(document) - bias. Tokens past the model's input cap score 0.
AttributionVector occlusion_attribution(const model::BaselineModel& model, const corpus::Article& article);

struct AlignmentReport {
  std::string article_id;
  double mass_in_fake = 0.0;
  double mass_in_real = 0.0;
  double topk_fake_precision = 0.0;
  std::size_t k = 10;
  /// Tokens crossing a span boundary (counted as outside).
  std::size_t n_straddling = 0;
};

/// Positive attribution mass inside FAKE / REAL spans, and the share of the
/// top-k positive tokens (ties by document order) lying inside FAKE spans.
/// Throws InvariantError when `spans` is empty or belongs to another article.
AlignmentReport align(const AttributionVector& attribution, const std::vector<corpus::AnnotatedSpan>& spans,
                      std::size_t k = 10);

/// Standalone HTML page; red for positive scores, blue for negative.
std::string heatmap_html(const corpus::Article& article, const AttributionVector& attribution,
                         const std::vector<corpus::AnnotatedSpan>& spans = {});

std::string alignment_tsv_header();
std::string alignment_tsv_row(const AlignmentReport& report);

}  // namespace satdebias::explain
