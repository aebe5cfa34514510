#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/predictions.hpp"

namespace satdebias::evalx {

enum class SetupKind { Biased, Debiased, Hybrid };

std::string_view to_string(SetupKind kind) noexcept;
std::optional<SetupKind> parse_setup_kind(std::string_view text) noexcept;

/// Per-kind composition. Defaults: 200 positives, 200 negatives, and 100
/// debiased positives in the hybrid setup.
struct SetupSizes {
  std::size_t positives = 200;
  std::size_t negatives = 200;
  std::size_t hybrid_debiased = 100;
};

struct TrainingSetup {
  SetupKind kind = SetupKind::Biased;
  std::uint64_t seed = 0;
  std::vector<std::string> positive_original;
  std::vector<std::string> positive_debiased;  // ids in the debiased corpus
  std::vector<std::string> negative;

  /// Checks the per-kind counts against `sizes`.
  void validate(const SetupSizes& sizes = {}) const;
};

/// Same positives and negatives for every kind under a fixed seed; the
/// hybrid setup debiases a seeded half of those positives. Debiased
/// counterparts are located through debias::debiased_id().
TrainingSetup build_setup(SetupKind kind, const corpus::Corpus& source, const corpus::Corpus* debiased,
                          std::uint64_t seed, const SetupSizes& sizes = {});

/// Source article ids behind every positive of a setup (original or
/// debiased), in setup order.
std::vector<std::string> positive_source_ids(const TrainingSetup& setup, const corpus::Corpus* debiased);

/// Materializes the training articles of a setup.
std::vector<corpus::Article> resolve(const TrainingSetup& setup, const corpus::Corpus& source,
                                     const corpus::Corpus* debiased);

/// Every source article not used by the setup (the same-domain test set).
corpus::Corpus held_out(const TrainingSetup& setup, const corpus::Corpus& source, const corpus::Corpus* debiased,
                        std::string name = {});

std::string setup_to_json(const TrainingSetup& setup);
TrainingSetup setup_from_json(const std::string& text);

/// Precision / recall / F1 / support of one class.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

/// Confusion counts indexed [gold][predicted], POSITIVE = 0, NEGATIVE = 1.
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

struct MetricsReport {
  std::string model_id;
  std::string dataset_id;
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  double recall_micro = 0.0;
  double nonresponse_rate = 0.0;
  Confusion confusion{};
  ClassMetrics positive;
  ClassMetrics negative;
  std::size_t n_total = 0;
  std::size_t n_evaluated = 0;
  std::size_t n_excluded = 0;

  void validate() const;
};

/// NONRESPONSE items only feed nonresponse_rate; every other metric covers
/// the evaluated items. Per-class scores with an empty denominator are 0.
MetricsReport evaluate(const model::PredictionSet& predictions, const corpus::Corpus& gold);

/// Signed differences b - a in percentage points.
struct ReportDelta {
  std::string dataset_id;
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  double nonresponse_rate = 0.0;
};

/// Throws InvariantError when the reports come from different test sets.
ReportDelta compare_reports(const MetricsReport& a, const MetricsReport& b);

/// "(-20.30%)" style annotation for a delta in points.
std::string format_delta(double points);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);
std::string report_table(const MetricsReport& report);
std::string delta_to_json(const ReportDelta& delta);
std::string delta_table(const ReportDelta& delta);

}  // namespace satdebias::evalx
