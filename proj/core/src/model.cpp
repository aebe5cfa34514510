#include "satdebias/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "jsonl.hpp"
#include "satdebias/biasstats.hpp"
#include "satdebias/error.hpp"
#include "satdebias/text.hpp"

namespace satdebias::model {

using detail::json;

BaselineModel::BaselineModel(std::vector<std::string> vocabulary, std::vector<double> idf,
                             std::vector<double> weights, double bias, std::string trained_on, Hyper hyper,
                             std::size_t max_tokens)
    : vocabulary_(std::move(vocabulary)),
      idf_(std::move(idf)),
      weights_(std::move(weights)),
      bias_(bias),
      trained_on_(std::move(trained_on)),
      hyper_(hyper),
      max_tokens_(max_tokens) {
  if (idf_.size() != vocabulary_.size() || weights_.size() != vocabulary_.size())
    throw InvariantError("model vectors must match vocabulary size " + std::to_string(vocabulary_.size()));
  if (!std::isfinite(bias_)) throw InvariantError("model bias is not finite");
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!std::isfinite(idf_[i]) || !std::isfinite(weights_[i]))
      throw InvariantError("non-finite parameter for term '" + vocabulary_[i] + "'");
    if (!index_.emplace(vocabulary_[i], i).second)
      throw InvariantError("duplicate vocabulary term '" + vocabulary_[i] + "'");
  }
  if (max_tokens_ == 0) throw InvariantError("max_tokens must be positive");
}

std::optional<std::size_t> BaselineModel::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double BaselineModel::weight(std::string_view term) const {
  auto i = index_of(term);
  return i ? weights_[*i] : 0.0;
}

BaselineModel BaselineModel::scaled(double factor) const {
  std::vector<double> w = weights_;
  for (double& x : w) x *= factor;
  return BaselineModel(vocabulary_, idf_, std::move(w), bias_ * factor, trained_on_, hyper_, max_tokens_);
}

std::vector<std::string> model_tokens(const BaselineModel& model, const corpus::Article& article) {
  std::vector<std::string> tokens = text::tokenize(article.body, article.language);
  if (tokens.size() > model.max_tokens()) tokens.resize(model.max_tokens());
  return tokens;
}

SparseVector features(const BaselineModel& model, const std::vector<std::string>& tokens,
                      std::optional<std::size_t> length) {
  const std::size_t len = length.value_or(tokens.size());
  if (len == 0) return {};
  std::map<std::size_t, std::size_t> counts;
  for (const auto& t : tokens)
    if (auto i = model.index_of(t)) ++counts[*i];
  SparseVector x;
  x.reserve(counts.size());
  for (const auto& [i, c] : counts)
    x.emplace_back(i, static_cast<double>(c) / static_cast<double>(len) * model.idf()[i]);
  return x;
}

double logit(const BaselineModel& model, const SparseVector& x) noexcept {
  double z = model.bias();
  for (const auto& [i, v] : x) z += model.weights()[i] * v;
  return z;
}

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Prediction predict(const BaselineModel& model, const corpus::Article& article) {
  const double score = sigmoid(logit(model, features(model, model_tokens(model, article))));
  return Prediction{score >= 0.5 ? Label::Positive : Label::Negative, score};
}

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) noexcept { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double row_dot(const SparseVector& x, std::span<const double> w, double b) noexcept {
  double z = b;
  for (const auto& [i, v] : x) z += w[i] * v;
  return z;
}

}  // namespace

double Objective::loss(std::span<const double> w, double b) const {
  double total = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const double z = row_dot(rows[n], w, b);
    total += softplus(z) - targets[n] * z;
  }
  double reg = 0.0;
  for (double x : w) reg += x * x;
  return total / static_cast<double>(rows.size()) + 0.5 * l2 * reg;
}

double Objective::gradient(std::span<const double> w, double b, std::vector<double>& grad_w) const {
  grad_w.assign(dim, 0.0);
  double grad_b = 0.0;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const double r = (sigmoid(row_dot(rows[n], w, b)) - targets[n]) * inv_n;
    for (const auto& [i, v] : rows[n]) grad_w[i] += r * v;
    grad_b += r;
  }
  for (std::size_t i = 0; i < dim; ++i) grad_w[i] += l2 * w[i];
  return grad_b;
}

TrainResult train_baseline(const std::vector<corpus::Article>& train, const Hyper& hyper, std::string trained_on,
                           std::size_t max_tokens) {
  if (train.empty()) throw InvariantError("training set is empty");
  const bool has_pos = std::any_of(train.begin(), train.end(), [](const auto& a) { return a.label == Label::Positive; });
  const bool has_neg = std::any_of(train.begin(), train.end(), [](const auto& a) { return a.label == Label::Negative; });
  if (!has_pos || !has_neg) throw InvariantError("training set must contain both labels");
  if (!(hyper.learning_rate > 0) || hyper.epochs == 0 || !(hyper.l2 >= 0) || !std::isfinite(hyper.learning_rate) ||
      !std::isfinite(hyper.l2))
    throw InvariantError("hyperparameters must be positive (l2 may be 0)");
  if (max_tokens == 0) throw InvariantError("max_tokens must be positive");

  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  std::map<std::string, std::size_t> df;
  for (const auto& a : train) {
    std::vector<std::string> tokens = text::tokenize(a.body, a.language);
    if (tokens.size() > max_tokens) tokens.resize(max_tokens);
    for (const auto& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
    docs.push_back(std::move(tokens));
  }
  std::vector<std::string> vocab;
  std::vector<double> idf;
  vocab.reserve(df.size());
  for (const auto& [term, count] : df) {
    vocab.push_back(term);
    idf.push_back(biasstats::smoothed_idf(train.size(), count));
  }
  const std::size_t dim = vocab.size();
  BaselineModel shape(vocab, idf, std::vector<double>(dim, 0.0), 0.0, trained_on, hyper, max_tokens);

  Objective obj;
  obj.dim = dim;
  obj.l2 = hyper.l2;
  for (std::size_t n = 0; n < train.size(); ++n) {
    obj.rows.push_back(features(shape, docs[n]));
    obj.targets.push_back(train[n].label == Label::Positive ? 1.0 : 0.0);
  }

  std::vector<double> w(dim, 0.0);
  std::vector<double> grad;
  double b = 0.0;
  TrainResult result;
  result.loss_history.reserve(hyper.epochs + 1);
  result.loss_history.push_back(obj.loss(w, b));
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const double gb = obj.gradient(w, b, grad);
    for (std::size_t i = 0; i < dim; ++i) w[i] -= hyper.learning_rate * grad[i];
    b -= hyper.learning_rate * gb;
    const double l = obj.loss(w, b);
    if (!std::isfinite(l)) throw Error("training loss became non-finite at epoch " + std::to_string(epoch + 1));
    result.loss_history.push_back(l);
  }
  result.model = BaselineModel(std::move(vocab), std::move(idf), std::move(w), b, std::move(trained_on), hyper,
                               max_tokens);
  return result;
}

std::string model_to_json(const BaselineModel& m) {
  json doc = {{"format", "satdebias.baseline"},
              {"version", 1},
              {"trained_on", m.trained_on()},
              {"max_tokens", m.max_tokens()},
              {"hyper", {{"learning_rate", m.hyper().learning_rate}, {"epochs", m.hyper().epochs}, {"l2", m.hyper().l2}}},
              {"bias", m.bias()},
              {"vocabulary", m.vocabulary()},
              {"idf", m.idf()},
              {"weights", m.weights()}};
  return doc.dump(1, ' ', false, json::error_handler_t::replace);
}

BaselineModel model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.value("format", std::string()) != "satdebias.baseline")
      throw ParseError("<model>", 0, "not a satdebias baseline model");
    if (doc.value("version", 0) != 1)
      throw ParseError("<model>", 0, "unsupported model version " + doc.value("version", json()).dump());
    Hyper h;
    h.learning_rate = doc.at("hyper").at("learning_rate").get<double>();
    h.epochs = doc.at("hyper").at("epochs").get<std::size_t>();
    h.l2 = doc.at("hyper").at("l2").get<double>();
    return BaselineModel(doc.at("vocabulary").get<std::vector<std::string>>(), doc.at("idf").get<std::vector<double>>(),
                         doc.at("weights").get<std::vector<double>>(), doc.at("bias").get<double>(),
                         doc.value("trained_on", std::string()), h, doc.value("max_tokens", kDefaultMaxTokens));
  } catch (const json::exception& e) {
    throw ParseError("<model>", 0, e.what());
  }
}

void save_model(const BaselineModel& model, const std::filesystem::path& path) {
  detail::write_file(path, model_to_json(model) + "\n");
}

BaselineModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(detail::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace satdebias::model
