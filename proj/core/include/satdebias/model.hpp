#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "satdebias/corpus.hpp"
#include "satdebias/types.hpp"

namespace satdebias::model {

/// Model input is cropped to this many tokens.
inline constexpr std::size_t kDefaultMaxTokens = 512;

struct Hyper {
  double learning_rate = 0.5;
  std::size_t epochs = 200;
  double l2 = 1e-4;

  bool operator==(const Hyper&) const = default;
};

/// L2-regularized logistic regression over tf-idf features
/// (tf = count / document length, idf = ln((1+N)/(1+df)) + 1).
class BaselineModel {
 public:
  BaselineModel() = default;
  /// Throws InvariantError on size mismatch, duplicate terms or non-finite values.
  BaselineModel(std::vector<std::string> vocabulary, std::vector<double> idf, std::vector<double> weights,
                double bias, std::string trained_on = {}, Hyper hyper = {},
                std::size_t max_tokens = kDefaultMaxTokens);

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const std::string& trained_on() const noexcept { return trained_on_; }
  const Hyper& hyper() const noexcept { return hyper_; }
  std::size_t max_tokens() const noexcept { return max_tokens_; }

  std::optional<std::size_t> index_of(std::string_view term) const;
  /// 0 for out-of-vocabulary terms.
  double weight(std::string_view term) const;

  /// Copy with weights and bias multiplied by `factor`.
  BaselineModel scaled(double factor) const;

  bool operator==(const BaselineModel& o) const {
    return vocabulary_ == o.vocabulary_ && idf_ == o.idf_ && weights_ == o.weights_ && bias_ == o.bias_ &&
           trained_on_ == o.trained_on_ && hyper_ == o.hyper_ && max_tokens_ == o.max_tokens_;
  }

 private:
  std::vector<std::string> vocabulary_;
  std::vector<double> idf_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::string trained_on_;
  Hyper hyper_;
  std::size_t max_tokens_ = kDefaultMaxTokens;
  std::unordered_map<std::string, std::size_t> index_;
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;

/// Tokens fed to the model: tokenized body cropped to max_tokens().
std::vector<std::string> model_tokens(const BaselineModel& model, const corpus::Article& article);

/// tf-idf features over in-vocabulary terms, sorted by index. `length` is the
/// tf denominator; it defaults to tokens.size().
SparseVector features(const BaselineModel& model, const std::vector<std::string>& tokens,
                      std::optional<std::size_t> length = std::nullopt);

double logit(const BaselineModel& model, const SparseVector& x) noexcept;
double sigmoid(double z) noexcept;

struct Prediction {
  Label label = Label::Positive;
  double score = 0.5;
};

/// score = sigmoid(w.x + b); POSITIVE iff score >= 0.5.
Prediction predict(const BaselineModel& model, const corpus::Article& article);

/// Mean logistic loss plus (l2/2)|w|^2 over sparse rows with 0/1 targets.
struct Objective {
  std::vector<SparseVector> rows;
  std::vector<double> targets;
  std::size_t dim = 0;
  double l2 = 0.0;

  double loss(std::span<const double> w, double b) const;
  /// Writes dL/dw into `grad_w` (resized to dim) and returns dL/db.
  double gradient(std::span<const double> w, double b, std::vector<double>& grad_w) const;
};

struct TrainResult {
  BaselineModel model;
  std::vector<double> loss_history;  // epochs + 1 entries, starting at w = 0
};

/// Full-batch gradient descent from zero weights; deterministic. Throws
/// InvariantError on empty or single-label data or bad hyperparameters,
/// Error when the loss becomes non-finite.
TrainResult train_baseline(const std::vector<corpus::Article>& train, const Hyper& hyper,
                           std::string trained_on = {}, std::size_t max_tokens = kDefaultMaxTokens);

/// Versioned JSON (format "satdebias.baseline", version 1).
std::string model_to_json(const BaselineModel& model);
BaselineModel model_from_json(const std::string& text);
void save_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_model(const std::filesystem::path& path);

}  // namespace satdebias::model
