#include "satdebias/simscore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "jsonl.hpp"
#include "satdebias/error.hpp"

namespace satdebias::simscore {

using detail::json;

namespace {

// Sum of sorted values: independent of input order.
double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  // Identical rows are a perfect match even when rounding lands below 1.
  if (s > 1.0 - 1e-9 && std::equal(a.begin(), a.end(), b.begin())) return 1.0;
  return std::clamp(s, -1.0, 1.0);
}

}  // namespace

TokenEmbeddings::TokenEmbeddings(std::vector<std::string> tokens, std::vector<double> values, std::size_t dim,
                                 double renormalize_tolerance)
    : tokens_(std::move(tokens)), values_(std::move(values)), dim_(dim) {
  if (tokens_.empty()) throw InvariantError("token embeddings need at least one token");
  if (dim_ == 0) throw InvariantError("embedding dimension must be positive");
  if (values_.size() != tokens_.size() * dim_)
    throw InvariantError("embedding matrix has " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(tokens_.size()) + " x " + std::to_string(dim_));
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double v = values_[i * dim_ + k];
      if (!std::isfinite(v)) throw InvariantError("non-finite embedding value for token '" + tokens_[i] + "'");
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (std::abs(norm - 1.0) > renormalize_tolerance)
      throw InvariantError("embedding row for token '" + tokens_[i] + "' has norm " + std::to_string(norm));
    if (norm != 1.0)
      for (std::size_t k = 0; k < dim_; ++k) values_[i * dim_ + k] /= norm;
  }
}

TokenEmbeddings::TokenEmbeddings(std::vector<std::string> tokens, const std::vector<std::vector<double>>& rows,
                                 double renormalize_tolerance)
    : TokenEmbeddings(
          std::move(tokens),
          [&] {
            std::vector<double> flat;
            const std::size_t d = rows.empty() ? 0 : rows.front().size();
            for (const auto& r : rows) {
              if (r.size() != d) throw InvariantError("embedding rows have inconsistent dimensions");
              flat.insert(flat.end(), r.begin(), r.end());
            }
            return flat;
          }(),
          rows.empty() ? 1 : rows.front().size(), renormalize_tolerance) {}

double f1_of(double precision, double recall) noexcept {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ScorePRF greedy_match_score(const TokenEmbeddings& candidate, const TokenEmbeddings& reference) {
  if (candidate.dim() != reference.dim())
    throw InvariantError("embedding dimension mismatch: " + std::to_string(candidate.dim()) + " vs " +
                         std::to_string(reference.dim()));
  const std::size_t nc = candidate.size();
  const std::size_t nr = reference.size();
  std::vector<double> best_for_candidate(nc, -1.0);
  std::vector<double> best_for_reference(nr, -1.0);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const double s = dot(candidate.row(i), reference.row(j));
      best_for_candidate[i] = std::max(best_for_candidate[i], s);
      best_for_reference[j] = std::max(best_for_reference[j], s);
    }
  }
  ScorePRF out;
  out.precision = order_free_mean(std::move(best_for_candidate));
  out.recall = order_free_mean(std::move(best_for_reference));
  out.f1 = f1_of(out.precision, out.recall);
  return out;
}

SimilarityReport corpus_similarity(const std::vector<TextPair>& pairs, Embedder& embedder,
                                   std::size_t max_in_flight) {
  if (pairs.empty()) throw InvariantError("corpus_similarity needs at least one pair");
  SimilarityReport report;
  report.pairs.resize(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      const TextPair& p = pairs[i];
      PairScore& out = report.pairs[i];
      out.original_id = p.original_id;
      out.generated_id = p.generated_id;
      try {
        const TokenEmbeddings cand = embedder.embed(p.generated, p.language);
        const TokenEmbeddings ref = embedder.embed(p.original, p.language);
        out.score = greedy_match_score(cand, ref);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::max<std::size_t>(1, std::min(max_in_flight, pairs.size())); ++t)
      pool.emplace_back(worker);
  }
  std::vector<double> p, r, f;
  for (const PairScore& s : report.pairs) {
    if (!s.score) {
      ++report.n_failed;
      continue;
    }
    p.push_back(s.score->precision);
    r.push_back(s.score->recall);
    f.push_back(s.score->f1);
  }
  if (p.empty()) throw Error("embedder failed for every pair (first error: " + report.pairs.front().error + ")");
  report.aggregate = ScorePRF{order_free_mean(p), order_free_mean(r), order_free_mean(f)};
  return report;
}

std::vector<TextPair> pairs_from_corpora(const corpus::Corpus& original, const corpus::Corpus& debiased) {
  std::vector<TextPair> out;
  for (const corpus::Article& g : debiased.articles()) {
    auto it = g.metadata.find("source_article_id");
    if (it == g.metadata.end())
      throw InvariantError("debiased article '" + g.id + "' has no source_article_id metadata");
    const corpus::Article& o = original.at(it->second);
    out.push_back(TextPair{o.id, g.id, o.language, o.body, g.body});
  }
  return out;
}

std::vector<TextPair> load_pairs(const std::filesystem::path& path) {
  std::vector<TextPair> out;
  detail::for_each_line(path, [&](std::size_t line, std::string_view text) {
    const json obj = detail::parse_object(path, line, text);
    TextPair p;
    p.original_id = detail::require_string(obj, "original_id", path, line);
    p.generated_id = detail::require_string(obj, "generated_id", path, line);
    const std::string lang = detail::optional_string(obj, "language", path, line).value_or("tr");
    auto l = parse_language(lang);
    if (!l) throw ParseError(path.string(), line, "unknown language '" + lang + "'");
    p.language = *l;
    p.original = detail::require_string(obj, "original", path, line);
    p.generated = detail::require_string(obj, "generated", path, line);
    out.push_back(std::move(p));
  });
  return out;
}

void save_pairs(const std::filesystem::path& path, const std::vector<TextPair>& pairs) {
  std::string content;
  for (const TextPair& p : pairs) {
    json obj = {{"original_id", p.original_id},
                {"generated_id", p.generated_id},
                {"language", to_string(p.language)},
                {"original", p.original},
                {"generated", p.generated}};
    content += obj.dump(-1, ' ', false, json::error_handler_t::replace) + '\n';
  }
  detail::write_file(path, content);
}

std::string report_tsv(const SimilarityReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "original_id\tgenerated_id\tprecision\trecall\tf1\terror\n";
  for (const PairScore& s : report.pairs) {
    out << s.original_id << '\t' << s.generated_id << '\t';
    if (s.score)
      out << s.score->precision << '\t' << s.score->recall << '\t' << s.score->f1 << '\t' << '\n';
    else
      out << "\t\t\t" << s.error << '\n';
  }
  out << "MEAN\t" << (report.pairs.size() - report.n_failed) << '\t' << report.aggregate.precision << '\t'
      << report.aggregate.recall << '\t' << report.aggregate.f1 << '\t'
      << (report.n_failed ? std::to_string(report.n_failed) + " failed" : std::string()) << '\n';
  return out.str();
}

}  // namespace satdebias::simscore
