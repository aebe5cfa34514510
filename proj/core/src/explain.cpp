#include "satdebias/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "satdebias/error.hpp"
#include "satdebias/text.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::explain {

AttributionVector occlusion_attribution(const model::BaselineModel& model, const corpus::Article& article) {
  AttributionVector out;
  out.article_id = article.id;
  const std::vector<text::Token> tokens = text::tokenize_with_offsets(article.body, article.language);
  const std::size_t used = std::min(tokens.size(), model.max_tokens());
  std::vector<std::string> input;
  input.reserve(used);
  for (std::size_t i = 0; i < used; ++i) input.push_back(tokens[i].text);

  const double full = model::logit(model, model::features(model, input));
  std::vector<std::string> masked;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    double score = 0.0;
    if (i < used) {
      masked = input;
      masked.erase(masked.begin() + static_cast<std::ptrdiff_t>(i));
      score = full - model::logit(model, model::features(model, masked, input.size()));
    }
    out.entries.push_back(AttributionEntry{tokens[i].text, tokens[i].start, tokens[i].end, score});
  }
  return out;
}

AlignmentReport align(const AttributionVector& attribution, const std::vector<corpus::AnnotatedSpan>& spans,
                      std::size_t k) {
  if (spans.empty()) throw InvariantError("article '" + attribution.article_id + "' has no annotation spans");
  for (const auto& s : spans)
    if (s.article_id != attribution.article_id)
      throw InvariantError("span for article '" + s.article_id + "' given with attribution for '" +
                           attribution.article_id + "'");

  AlignmentReport r;
  r.article_id = attribution.article_id;
  r.k = k;
  enum class Where { Outside, Fake, Real };
  std::vector<Where> where(attribution.entries.size(), Where::Outside);
  for (std::size_t i = 0; i < attribution.entries.size(); ++i) {
    const auto& e = attribution.entries[i];
    for (const auto& s : spans) {
      if (e.start >= s.start && e.end <= s.end) {
        where[i] = s.tag == corpus::SpanTag::Fake ? Where::Fake : Where::Real;
        break;
      }
      if (e.start < s.end && s.start < e.end) {
        ++r.n_straddling;
        break;
      }
    }
  }

  double total = 0.0;
  double fake = 0.0;
  double real = 0.0;
  for (std::size_t i = 0; i < attribution.entries.size(); ++i) {
    const double m = std::max(attribution.entries[i].score, 0.0);
    total += m;
    if (where[i] == Where::Fake) fake += m;
    if (where[i] == Where::Real) real += m;
  }
  if (total > 0.0) {
    r.mass_in_fake = fake / total;
    r.mass_in_real = real / total;
  }

  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < attribution.entries.size(); ++i)
    if (attribution.entries[i].score > 0.0) positive.push_back(i);
  std::stable_sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) {
    return attribution.entries[a].score > attribution.entries[b].score;
  });
  const std::size_t take = std::min(k, positive.size());
  if (take > 0) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < take; ++i) hits += where[positive[i]] == Where::Fake;
    r.topk_fake_precision = static_cast<double>(hits) / static_cast<double>(take);
  }
  return r;
}

namespace {

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      case '\n': out += "<br>\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string heatmap_html(const corpus::Article& article, const AttributionVector& attribution,
                         const std::vector<corpus::AnnotatedSpan>& spans) {
  double peak = 0.0;
  for (const auto& e : attribution.entries) peak = std::max(peak, std::abs(e.score));

  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" << escape_html(article.id)
      << "</title>\n<style>body{font-family:sans-serif;max-width:60em;margin:2em auto;line-height:1.6}"
         "span.t{border-radius:3px;padding:0 1px}span.fake{border-bottom:2px solid #a00}"
         "span.real{border-bottom:2px solid #0a0}</style></head><body>\n";
  out << "<h1>" << escape_html(article.title.empty() ? article.id : article.title) << "</h1>\n<p>";

  auto tag_at = [&](std::size_t start, std::size_t end) -> const char* {
    for (const auto& s : spans)
      if (start >= s.start && end <= s.end) return s.tag == corpus::SpanTag::Fake ? "fake" : "real";
    return nullptr;
  };

  std::size_t cursor = 0;
  for (const auto& e : attribution.entries) {
    out << escape_html(utf8::slice(article.body, cursor, e.start));
    const double a = peak > 0 ? std::abs(e.score) / peak : 0.0;
    char color[64];
    if (e.score >= 0)
      std::snprintf(color, sizeof color, "rgba(220,40,40,%.3f)", a);
    else
      std::snprintf(color, sizeof color, "rgba(40,80,220,%.3f)", a);
    const char* tag = tag_at(e.start, e.end);
    out << "<span class=\"t" << (tag ? std::string(" ") + tag : std::string()) << "\" style=\"background:" << color
        << "\" title=\"" << std::setprecision(6) << e.score << "\">" << escape_html(utf8::slice(article.body, e.start, e.end))
        << "</span>";
    cursor = e.end;
  }
  out << escape_html(utf8::slice(article.body, cursor, utf8::length(article.body)));
  out << "</p>\n</body></html>\n";
  return out.str();
}

std::string alignment_tsv_header() {
  return "article_id\tmass_in_fake\tmass_in_real\ttopk_fake_precision\tk\tn_straddling\n";
}

std::string alignment_tsv_row(const AlignmentReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << r.article_id << '\t' << r.mass_in_fake << '\t' << r.mass_in_real << '\t'
      << r.topk_fake_precision << '\t' << r.k << '\t' << r.n_straddling << '\n';
  return out.str();
}

}  // namespace satdebias::explain
