#include <httplib.h>

#include "http.hpp"
#include "satdebias/error.hpp"
#include "satdebias/provider.hpp"

namespace satdebias {
namespace detail {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto slash = url.find('/', host_begin);
  SplitUrl out;
  out.origin = slash == std::string::npos ? url : url.substr(0, slash);
  if (slash != std::string::npos) out.prefix = url.substr(slash);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

HttpResult post_json(const std::string& base_url, const std::string& path, const std::string& body,
                     const std::string& bearer_token, std::chrono::seconds timeout) {
  HttpResult result;
  const SplitUrl url = split_url(base_url);
  try {
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    if (!bearer_token.empty()) client.set_bearer_token_auth(bearer_token);
    auto res = client.Post(url.prefix + path, body, "application/json");
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      return result;
    }
    result.status = res->status;
    result.body = std::move(res->body);
  } catch (const std::exception& e) {
    // httplib throws for unsupported schemes (https without OpenSSL).
    result.error = std::string("transport error: ") + e.what();
  }
  return result;
}

}  // namespace detail

namespace provider {

OpenAiCompatibleProvider::OpenAiCompatibleProvider(ProviderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ProviderError("provider base_url is not set (DEBIAS_LLM_BASE_URL)");
  if (config_.model.empty()) throw ProviderError("provider model is not set (DEBIAS_LLM_MODEL)");
}

ChatResponse OpenAiCompatibleProvider::complete(const ChatRequest& request) {
  ChatRequest req = request;
  if (req.model.empty()) req.model = config_.model;
  if (!req.temperature) req.temperature = config_.temperature;
  const detail::HttpResult http = detail::post_json(config_.base_url, "/chat/completions",
                                                    encode_chat_request(req), config_.api_key,
                                                    config_.timeout);
  ChatResponse out;
  out.status = http.status;
  out.raw = http.body;
  out.error = http.error;
  if (out.ok()) {
    try {
      out.content = decode_chat_content(http.body);
    } catch (const ProviderError& e) {
      out.error = e.what();
    }
  }
  return out;
}

}  // namespace provider
}  // namespace satdebias
