#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/model.hpp"

namespace satdebias::model {

enum class Predicted { Positive, Negative, NonResponse };

std::string_view to_string(Predicted p) noexcept;
std::optional<Predicted> parse_predicted(std::string_view text) noexcept;
Predicted from_label(Label label) noexcept;

struct PredictionItem {
  std::string article_id;
  Predicted predicted = Predicted::NonResponse;
  std::optional<double> score;

  bool operator==(const PredictionItem&) const = default;
};

/// Model outputs over one test set. Ids are unique; NONRESPONSE items carry
/// no score; scores lie in [0, 1].
struct PredictionSet {
  std::string model_id;
  std::string dataset_id;
  std::vector<PredictionItem> items;

  void validate() const;
  std::size_t nonresponse_count() const noexcept;
  /// nonresponse_count / size, 0 for an empty set.
  double nonresponse_rate() const noexcept;
};

/// TSV: `article_id <TAB> predicted <TAB> score`. An optional header row
/// starting with "article_id" is skipped; `# model_id=...` and
/// `# dataset_id=...` comment lines set the identifiers (otherwise the file
/// stem is used for both).
PredictionSet import_predictions(const std::filesystem::path& path);
void save_predictions(const PredictionSet& set, const std::filesystem::path& path);

/// Baseline predictions for every article of `corpus`.
PredictionSet predict_corpus(const BaselineModel& model, const corpus::Corpus& corpus, std::string model_id);

}  // namespace satdebias::model
