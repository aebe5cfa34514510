#include <cmath>

#include "http.hpp"
#include "jsonl.hpp"
#include "satdebias/error.hpp"
#include "satdebias/random.hpp"
#include "satdebias/simscore.hpp"
#include "satdebias/text.hpp"

namespace satdebias::simscore {

using detail::json;

TokenEmbeddings HashEmbedder::embed(std::string_view text, Language language) {
  std::vector<std::string> tokens = text::tokenize(text, language);
  if (tokens.empty()) throw Error("text has no tokens to embed");
  std::vector<double> values;
  values.reserve(tokens.size() * dim_);
  for (const std::string& t : tokens) {
    const std::uint64_t h = fnv1a(t) ^ seed_;
    double sq = 0.0;
    const std::size_t base = values.size();
    for (std::size_t k = 0; k < dim_; ++k) {
      const double u = static_cast<double>(mix_seed(h, k) >> 11) * 0x1.0p-53;
      const double v = 2.0 * u - 1.0;
      values.push_back(v);
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    for (std::size_t k = 0; k < dim_; ++k) values[base + k] /= norm;
  }
  return TokenEmbeddings(std::move(tokens), std::move(values), dim_);
}

TokenEmbeddings decode_embeddings(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("malformed embed_tokens response: ") + e.what());
  }
  try {
    auto tokens = doc.at("tokens").get<std::vector<std::string>>();
    auto rows = doc.at("vectors").get<std::vector<std::vector<double>>>();
    if (rows.size() != tokens.size())
      throw ProviderError("embed_tokens returned " + std::to_string(rows.size()) + " vectors for " +
                          std::to_string(tokens.size()) + " tokens");
    return TokenEmbeddings(std::move(tokens), rows);
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected embed_tokens shape: ") + e.what());
  }
}

TokenEmbeddings HttpEmbedder::embed(std::string_view text, Language language) {
  const json req = {{"text", std::string(text)}, {"language", to_string(language)}};
  const auto res = detail::post_json(base_url_, "/embed_tokens",
                                     req.dump(-1, ' ', false, json::error_handler_t::replace), api_key_,
                                     std::chrono::seconds(timeout_seconds_));
  if (!res.error.empty()) throw ProviderError(res.error);
  if (res.status < 200 || res.status >= 300)
    throw ProviderError("embed_tokens returned HTTP " + std::to_string(res.status));
  return decode_embeddings(res.body);
}

}  // namespace satdebias::simscore
