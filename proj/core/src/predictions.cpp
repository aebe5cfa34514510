#include "satdebias/predictions.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "jsonl.hpp"
#include "satdebias/error.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::model {

std::string_view to_string(Predicted p) noexcept {
  switch (p) {
    case Predicted::Positive: return "POSITIVE";
    case Predicted::Negative: return "NEGATIVE";
    case Predicted::NonResponse: return "NONRESPONSE";
  }
  return "NONRESPONSE";
}

std::optional<Predicted> parse_predicted(std::string_view text) noexcept {
  for (auto p : {Predicted::Positive, Predicted::Negative, Predicted::NonResponse})
    if (to_string(p) == text) return p;
  return std::nullopt;
}

Predicted from_label(Label label) noexcept {
  return label == Label::Positive ? Predicted::Positive : Predicted::Negative;
}

void PredictionSet::validate() const {
  std::unordered_set<std::string_view> seen;
  for (const PredictionItem& it : items) {
    if (!seen.insert(it.article_id).second) throw InvariantError("duplicate prediction for article '" + it.article_id + "'");
    if (it.predicted == Predicted::NonResponse && it.score)
      throw InvariantError("NONRESPONSE item '" + it.article_id + "' must not carry a score");
    if (it.score && !(*it.score >= 0.0 && *it.score <= 1.0))
      throw InvariantError("score for '" + it.article_id + "' is outside [0, 1]");
  }
}

std::size_t PredictionSet::nonresponse_count() const noexcept {
  std::size_t n = 0;
  for (const auto& it : items) n += it.predicted == Predicted::NonResponse;
  return n;
}

double PredictionSet::nonresponse_rate() const noexcept {
  return items.empty() ? 0.0 : static_cast<double>(nonresponse_count()) / static_cast<double>(items.size());
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

PredictionSet import_predictions(const std::filesystem::path& path) {
  PredictionSet set;
  set.model_id = path.stem().string();
  set.dataset_id = path.stem().string();
  std::unordered_set<std::string> seen;
  bool first = true;
  detail::for_each_line(path, [&](std::size_t line, std::string_view text) {
    if (text.front() == '#') {
      const std::string_view body = utf8::trim(text.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        const std::string_view key = utf8::trim(body.substr(0, eq));
        const std::string value(utf8::trim(body.substr(eq + 1)));
        if (key == "model_id") set.model_id = value;
        if (key == "dataset_id") set.dataset_id = value;
      }
      return;
    }
    const auto fields = split_tabs(text);
    if (first && fields[0] == "article_id") {
      first = false;
      return;
    }
    first = false;
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError(path.string(), line, "expected article_id<TAB>predicted<TAB>score");
    PredictionItem item;
    item.article_id = fields[0];
    if (item.article_id.empty()) throw ParseError(path.string(), line, "empty article_id");
    auto p = parse_predicted(fields[1]);
    if (!p) throw ParseError(path.string(), line, "unknown prediction label '" + fields[1] + "'");
    item.predicted = *p;
    if (fields.size() == 3 && !fields[2].empty() && fields[2] != "-") {
      std::size_t used = 0;
      double score = 0;
      try {
        score = std::stod(fields[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fields[2].size() || !std::isfinite(score))
        throw ParseError(path.string(), line, "invalid score '" + fields[2] + "'");
      if (item.predicted == Predicted::NonResponse)
        throw ParseError(path.string(), line, "NONRESPONSE row must not carry a score");
      if (score < 0.0 || score > 1.0) throw ParseError(path.string(), line, "score outside [0, 1]");
      item.score = score;
    }
    if (!seen.insert(item.article_id).second)
      throw ParseError(path.string(), line, "duplicate article_id '" + item.article_id + "'");
    set.items.push_back(std::move(item));
  });
  return set;
}

void save_predictions(const PredictionSet& set, const std::filesystem::path& path) {
  set.validate();
  std::ostringstream out;
  out << "# model_id=" << set.model_id << "\n# dataset_id=" << set.dataset_id << "\n";
  out << "article_id\tpredicted\tscore\n";
  out << std::setprecision(17);
  for (const auto& it : set.items) {
    out << it.article_id << '\t' << to_string(it.predicted) << '\t';
    if (it.score) out << *it.score;
    out << '\n';
  }
  detail::write_file(path, out.str());
}

PredictionSet predict_corpus(const BaselineModel& model, const corpus::Corpus& corpus, std::string model_id) {
  PredictionSet set;
  set.model_id = std::move(model_id);
  set.dataset_id = corpus.name();
  set.items.reserve(corpus.size());
  for (const auto& a : corpus.articles()) {
    const Prediction p = predict(model, a);
    set.items.push_back(PredictionItem{a.id, from_label(p.label), p.score});
  }
  return set;
}

}  // namespace satdebias::model
