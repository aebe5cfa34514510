#include "satdebias/evalx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "jsonl.hpp"
#include "satdebias/debias.hpp"
#include "satdebias/error.hpp"
#include "satdebias/random.hpp"

namespace satdebias::evalx {

using detail::json;

std::string_view to_string(SetupKind kind) noexcept {
  switch (kind) {
    case SetupKind::Biased: return "BIASED";
    case SetupKind::Debiased: return "DEBIASED";
    case SetupKind::Hybrid: return "HYBRID";
  }
  return "BIASED";
}

std::optional<SetupKind> parse_setup_kind(std::string_view text) noexcept {
  for (auto k : {SetupKind::Biased, SetupKind::Debiased, SetupKind::Hybrid})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Setups

void TrainingSetup::validate(const SetupSizes& sizes) const {
  std::size_t want_orig = sizes.positives;
  std::size_t want_deb = 0;
  if (kind == SetupKind::Debiased) {
    want_orig = 0;
    want_deb = sizes.positives;
  } else if (kind == SetupKind::Hybrid) {
    want_orig = sizes.positives - sizes.hybrid_debiased;
    want_deb = sizes.hybrid_debiased;
  }
  if (positive_original.size() != want_orig || positive_debiased.size() != want_deb || negative.size() != sizes.negatives)
    throw InvariantError(std::string(to_string(kind)) + " setup has " + std::to_string(positive_original.size()) + "/" +
                         std::to_string(positive_debiased.size()) + "/" + std::to_string(negative.size()) +
                         " original/debiased/negative ids, expected " + std::to_string(want_orig) + "/" +
                         std::to_string(want_deb) + "/" + std::to_string(sizes.negatives));
}

namespace {

constexpr std::uint64_t kPositiveStream = 1;
constexpr std::uint64_t kNegativeStream = 2;
constexpr std::uint64_t kHybridStream = 3;

// source article id -> debiased article id.
std::map<std::string, std::string, std::less<>> counterpart_index(const corpus::Corpus& debiased) {
  std::map<std::string, std::string, std::less<>> out;
  for (const corpus::Article& a : debiased.articles()) {
    auto it = a.metadata.find("source_article_id");
    std::string source;
    if (it != a.metadata.end()) {
      source = it->second;
    } else if (const auto pos = a.id.rfind("~debiased"); pos != std::string::npos) {
      source = a.id.substr(0, pos);
    } else {
      continue;
    }
    out.emplace(std::move(source), a.id);
  }
  return out;
}

}  // namespace

TrainingSetup build_setup(SetupKind kind, const corpus::Corpus& source, const corpus::Corpus* debiased,
                          std::uint64_t seed, const SetupSizes& sizes) {
  if (sizes.hybrid_debiased > sizes.positives)
    throw InvariantError("hybrid debiased count exceeds the number of positives");
  TrainingSetup setup;
  setup.kind = kind;
  setup.seed = seed;
  std::vector<std::string> positives;
  for (auto& a : corpus::select_subset(source, Label::Positive, sizes.positives, mix_seed(seed, kPositiveStream)))
    positives.push_back(std::move(a.id));
  for (auto& a : corpus::select_subset(source, Label::Negative, sizes.negatives, mix_seed(seed, kNegativeStream)))
    setup.negative.push_back(std::move(a.id));

  if (kind == SetupKind::Biased) {
    setup.positive_original = std::move(positives);
    return setup;
  }
  if (!debiased) throw InvariantError(std::string(to_string(kind)) + " setup needs a debiased corpus");
  const auto counterparts = counterpart_index(*debiased);
  auto counterpart = [&](const std::string& id) -> const std::string& {
    auto it = counterparts.find(id);
    if (it == counterparts.end())
      throw InvariantError("no debiased counterpart for selected positive '" + id + "'");
    return it->second;
  };

  std::vector<bool> debias_this(positives.size(), kind == SetupKind::Debiased);
  if (kind == SetupKind::Hybrid) {
    std::vector<std::size_t> order(positives.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SeededRng rng(mix_seed(seed, kHybridStream));
    rng.partial_shuffle(order, sizes.hybrid_debiased);
    for (std::size_t i = 0; i < sizes.hybrid_debiased; ++i) debias_this[order[i]] = true;
  }
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (debias_this[i])
      setup.positive_debiased.push_back(counterpart(positives[i]));
    else
      setup.positive_original.push_back(positives[i]);
  }
  return setup;
}

std::vector<std::string> positive_source_ids(const TrainingSetup& setup, const corpus::Corpus* debiased) {
  std::vector<std::string> out = setup.positive_original;
  for (const auto& id : setup.positive_debiased) {
    if (!debiased) throw InvariantError("setup references debiased articles but no debiased corpus was given");
    const corpus::Article& a = debiased->at(id);
    if (auto it = a.metadata.find("source_article_id"); it != a.metadata.end()) {
      out.push_back(it->second);
    } else if (const auto pos = id.rfind("~debiased"); pos != std::string::npos) {
      out.push_back(id.substr(0, pos));
    } else {
      throw InvariantError("debiased article '" + id + "' has no source_article_id");
    }
  }
  return out;
}

std::vector<corpus::Article> resolve(const TrainingSetup& setup, const corpus::Corpus& source,
                                     const corpus::Corpus* debiased) {
  std::vector<corpus::Article> out;
  for (const auto& id : setup.positive_original) out.push_back(source.at(id));
  for (const auto& id : setup.positive_debiased) {
    if (!debiased) throw InvariantError("setup references debiased articles but no debiased corpus was given");
    out.push_back(debiased->at(id));
  }
  for (const auto& id : setup.negative) out.push_back(source.at(id));
  return out;
}

corpus::Corpus held_out(const TrainingSetup& setup, const corpus::Corpus& source, const corpus::Corpus* debiased,
                        std::string name) {
  std::unordered_set<std::string> used(setup.negative.begin(), setup.negative.end());
  for (auto& id : positive_source_ids(setup, debiased)) used.insert(std::move(id));
  std::vector<corpus::Article> rest;
  for (const auto& a : source.articles())
    if (!used.contains(a.id)) rest.push_back(a);
  return corpus::Corpus(name.empty() ? source.name() + "-heldout" : std::move(name), std::move(rest));
}

std::string setup_to_json(const TrainingSetup& s) {
  json doc = {{"kind", to_string(s.kind)},
              {"seed", s.seed},
              {"positive_original", s.positive_original},
              {"positive_debiased", s.positive_debiased},
              {"negative", s.negative}};
  return doc.dump(1);
}

TrainingSetup setup_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    TrainingSetup s;
    const auto kind = parse_setup_kind(doc.at("kind").get<std::string>());
    if (!kind) throw ParseError("<setup>", 0, "unknown setup kind");
    s.kind = *kind;
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.positive_original = doc.at("positive_original").get<std::vector<std::string>>();
    s.positive_debiased = doc.at("positive_debiased").get<std::vector<std::string>>();
    s.negative = doc.at("negative").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw ParseError("<setup>", 0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Metrics

void MetricsReport::validate() const {
  if (n_evaluated + n_excluded != n_total) throw InvariantError("report counts do not add up");
  std::size_t sum = 0;
  for (const auto& row : confusion)
    for (std::size_t c : row) sum += c;
  if (sum != n_evaluated) throw InvariantError("confusion counts do not sum to n_evaluated");
  for (double r : {accuracy, precision_macro, recall_macro, f1_macro, precision_weighted, recall_weighted, f1_weighted,
                   recall_micro, nonresponse_rate})
    if (!(r >= 0.0 && r <= 1.0)) throw InvariantError("report rate outside [0, 1]");
}

namespace {

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.support = tp + fn;
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace

MetricsReport evaluate(const model::PredictionSet& predictions, const corpus::Corpus& gold) {
  predictions.validate();
  MetricsReport r;
  r.model_id = predictions.model_id;
  r.dataset_id = predictions.dataset_id;
  r.n_total = predictions.items.size();
  for (const auto& item : predictions.items) {
    const corpus::Article* a = gold.find(item.article_id);
    if (!a) throw InvariantError("prediction for unknown article '" + item.article_id + "'");
    if (item.predicted == model::Predicted::NonResponse) {
      ++r.n_excluded;
      continue;
    }
    const int g = a->label == Label::Positive ? 0 : 1;
    const int p = item.predicted == model::Predicted::Positive ? 0 : 1;
    ++r.confusion[g][p];
    ++r.n_evaluated;
  }
  if (r.n_evaluated == 0) throw InvariantError("no evaluable predictions (all items are NONRESPONSE or the set is empty)");

  const auto& c = r.confusion;
  const std::size_t correct = c[0][0] + c[1][1];
  const double n = static_cast<double>(r.n_evaluated);
  r.accuracy = static_cast<double>(correct) / n;
  // Micro recall pools true positives and supports of both classes.
  const std::size_t micro_tp = c[0][0] + c[1][1];
  const std::size_t micro_support = (c[0][0] + c[0][1]) + (c[1][1] + c[1][0]);
  r.recall_micro = static_cast<double>(micro_tp) / static_cast<double>(micro_support);
  r.nonresponse_rate = static_cast<double>(r.n_excluded) / static_cast<double>(r.n_total);
  r.positive = class_metrics(c[0][0], c[1][0], c[0][1]);
  r.negative = class_metrics(c[1][1], c[0][1], c[1][0]);
  r.precision_macro = (r.positive.precision + r.negative.precision) / 2.0;
  r.recall_macro = (r.positive.recall + r.negative.recall) / 2.0;
  r.f1_macro = (r.positive.f1 + r.negative.f1) / 2.0;
  const double wp = static_cast<double>(r.positive.support) / n;
  const double wn = static_cast<double>(r.negative.support) / n;
  r.precision_weighted = wp * r.positive.precision + wn * r.negative.precision;
  r.recall_weighted = wp * r.positive.recall + wn * r.negative.recall;
  r.f1_weighted = wp * r.positive.f1 + wn * r.negative.f1;
  return r;
}

ReportDelta compare_reports(const MetricsReport& a, const MetricsReport& b) {
  if (a.dataset_id != b.dataset_id || a.n_total != b.n_total)
    throw InvariantError("reports come from different test sets ('" + a.dataset_id + "'/" + std::to_string(a.n_total) +
                         " vs '" + b.dataset_id + "'/" + std::to_string(b.n_total) + ")");
  auto pts = [](double x, double y) { return (y - x) * 100.0; };
  ReportDelta d;
  d.dataset_id = a.dataset_id;
  d.accuracy = pts(a.accuracy, b.accuracy);
  d.precision_macro = pts(a.precision_macro, b.precision_macro);
  d.recall_macro = pts(a.recall_macro, b.recall_macro);
  d.f1_macro = pts(a.f1_macro, b.f1_macro);
  d.precision_weighted = pts(a.precision_weighted, b.precision_weighted);
  d.recall_weighted = pts(a.recall_weighted, b.recall_weighted);
  d.f1_weighted = pts(a.f1_weighted, b.f1_weighted);
  d.nonresponse_rate = pts(a.nonresponse_rate, b.nonresponse_rate);
  return d;
}

std::string format_delta(double points) {
  const double rounded = std::round(points * 100.0) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "(%+.2f%%)", rounded == 0.0 ? 0.0 : rounded);
  return buf;
}

namespace {

json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

ClassMetrics class_from_json(const json& j) {
  return ClassMetrics{j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
                      j.at("support").get<std::size_t>()};
}

}  // namespace

std::string report_to_json(const MetricsReport& r) {
  json doc = {{"model_id", r.model_id},
              {"dataset_id", r.dataset_id},
              {"accuracy", r.accuracy},
              {"precision_macro", r.precision_macro},
              {"recall_macro", r.recall_macro},
              {"f1_macro", r.f1_macro},
              {"precision_weighted", r.precision_weighted},
              {"recall_weighted", r.recall_weighted},
              {"f1_weighted", r.f1_weighted},
              {"recall_micro", r.recall_micro},
              {"nonresponse_rate", r.nonresponse_rate},
              {"confusion", {{"labels", {"POSITIVE", "NEGATIVE"}}, {"matrix", r.confusion}}},
              {"per_class", {{"POSITIVE", class_json(r.positive)}, {"NEGATIVE", class_json(r.negative)}}},
              {"n_total", r.n_total},
              {"n_evaluated", r.n_evaluated},
              {"n_excluded", r.n_excluded}};
  return doc.dump(1);
}

MetricsReport report_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    MetricsReport r;
    r.model_id = doc.value("model_id", std::string());
    r.dataset_id = doc.value("dataset_id", std::string());
    r.accuracy = doc.at("accuracy").get<double>();
    r.precision_macro = doc.at("precision_macro").get<double>();
    r.recall_macro = doc.at("recall_macro").get<double>();
    r.f1_macro = doc.at("f1_macro").get<double>();
    r.precision_weighted = doc.at("precision_weighted").get<double>();
    r.recall_weighted = doc.at("recall_weighted").get<double>();
    r.f1_weighted = doc.at("f1_weighted").get<double>();
    r.recall_micro = doc.value("recall_micro", r.accuracy);
    r.nonresponse_rate = doc.at("nonresponse_rate").get<double>();
    if (doc.contains("confusion")) r.confusion = doc.at("confusion").at("matrix").get<Confusion>();
    if (doc.contains("per_class")) {
      r.positive = class_from_json(doc.at("per_class").at("POSITIVE"));
      r.negative = class_from_json(doc.at("per_class").at("NEGATIVE"));
    }
    r.n_total = doc.at("n_total").get<std::size_t>();
    r.n_evaluated = doc.at("n_evaluated").get<std::size_t>();
    r.n_excluded = doc.at("n_excluded").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError("<report>", 0, e.what());
  }
}

std::string report_table(const MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "model:   " << r.model_id << "\ndataset: " << r.dataset_id << "\n";
  out << "items:   " << r.n_total << " (" << r.n_evaluated << " evaluated, " << r.n_excluded << " nonresponse, rate "
      << std::setprecision(3) << r.nonresponse_rate << std::setprecision(2) << ")\n\n";
  out << std::left << std::setw(12) << "metric" << std::right << std::setw(10) << "macro" << std::setw(10) << "weighted"
      << "\n";
  auto row = [&](const char* name, double macro, double weighted) {
    out << std::left << std::setw(12) << name << std::right << std::setw(9) << macro * 100 << "%" << std::setw(9)
        << weighted * 100 << "%\n";
  };
  row("precision", r.precision_macro, r.precision_weighted);
  row("recall", r.recall_macro, r.recall_weighted);
  row("f1", r.f1_macro, r.f1_weighted);
  out << std::left << std::setw(12) << "accuracy" << std::right << std::setw(9) << r.accuracy * 100 << "%\n\n";
  out << "confusion (rows gold, cols predicted)\n";
  out << "            POSITIVE  NEGATIVE\n";
  out << "POSITIVE  " << std::setw(10) << r.confusion[0][0] << std::setw(10) << r.confusion[0][1] << "\n";
  out << "NEGATIVE  " << std::setw(10) << r.confusion[1][0] << std::setw(10) << r.confusion[1][1] << "\n";
  return out.str();
}

std::string delta_to_json(const ReportDelta& d) {
  json doc = {{"dataset_id", d.dataset_id},
              {"accuracy", d.accuracy},
              {"precision_macro", d.precision_macro},
              {"recall_macro", d.recall_macro},
              {"f1_macro", d.f1_macro},
              {"precision_weighted", d.precision_weighted},
              {"recall_weighted", d.recall_weighted},
              {"f1_weighted", d.f1_weighted},
              {"nonresponse_rate", d.nonresponse_rate}};
  return doc.dump(1);
}

std::string delta_table(const ReportDelta& d) {
  std::ostringstream out;
  out << "dataset: " << d.dataset_id << " (b - a, percentage points)\n";
  auto row = [&](const char* name, double v) { out << std::left << std::setw(20) << name << format_delta(v) << "\n"; };
  row("accuracy", d.accuracy);
  row("precision_macro", d.precision_macro);
  row("recall_macro", d.recall_macro);
  row("f1_macro", d.f1_macro);
  row("precision_weighted", d.precision_weighted);
  row("recall_weighted", d.recall_weighted);
  row("f1_weighted", d.f1_weighted);
  row("nonresponse_rate", d.nonresponse_rate);
  return out.str();
}

}  // namespace satdebias::evalx
