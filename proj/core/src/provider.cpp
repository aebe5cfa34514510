#include "satdebias/provider.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "jsonl.hpp"
#include "satdebias/error.hpp"

namespace satdebias::provider {

using detail::json;

ProviderConfig ProviderConfig::from_env() {
  auto env = [](const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  ProviderConfig c;
  c.base_url = env("DEBIAS_LLM_BASE_URL");
  c.api_key = env("DEBIAS_LLM_API_KEY");
  c.model = env("DEBIAS_LLM_MODEL");
  return c;
}

const std::string& last_user_message(const ChatRequest& request) {
  static const std::string kEmpty;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it)
    if (it->role == "user") return it->content;
  return kEmpty;
}

ChatResponse EchoProvider::complete(const ChatRequest& request) {
  ChatResponse r;
  r.status = 200;
  r.content = last_user_message(request);
  r.raw = r.content;
  return r;
}

FixtureProvider::FixtureProvider(const std::filesystem::path& path, std::string model_name)
    : model_(std::move(model_name)) {
  detail::for_each_line(path, [&](std::size_t line, std::string_view text) {
    const json obj = detail::parse_object(path, line, text);
    ChatResponse r;
    r.status = obj.value("status", 200);
    r.content = detail::require_string(obj, "response", path, line);
    r.raw = r.content;
    responses_[detail::require_string(obj, "request", path, line)] = std::move(r);
  });
}

FixtureProvider::FixtureProvider(std::map<std::string, std::string> responses, std::string model_name)
    : model_(std::move(model_name)) {
  for (auto& [req, resp] : responses) {
    ChatResponse r;
    r.status = 200;
    r.content = resp;
    r.raw = std::move(resp);
    responses_.emplace(req, std::move(r));
  }
}

ChatResponse FixtureProvider::complete(const ChatRequest& request) {
  auto it = responses_.find(last_user_message(request));
  if (it == responses_.end()) {
    ChatResponse miss;
    miss.status = 404;
    miss.raw = "no recorded completion for this request";
    return miss;
  }
  return it->second;
}

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  const double scale = std::pow(multiplier, std::max(0, attempt - 1));
  const double ms = static_cast<double>(initial_backoff.count()) * scale;
  return std::chrono::milliseconds(
      static_cast<long long>(std::min(ms, static_cast<double>(max_backoff.count()))));
}

void RetryPolicy::wait(int attempt) const {
  const auto d = backoff(attempt);
  if (sleep)
    sleep(d);
  else
    std::this_thread::sleep_for(d);
}

RetryPolicy RetryPolicy::no_wait(int attempts) {
  RetryPolicy p;
  p.max_attempts = attempts;
  p.initial_backoff = std::chrono::milliseconds(0);
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

bool is_retryable(const ChatResponse& r) noexcept {
  if (!r.error.empty() || r.status == 0) return true;
  if (r.status == 429 || r.status >= 500) return true;
  if (r.status >= 200 && r.status < 300) return r.content.find_first_not_of(" \t\r\n") == std::string::npos;
  return false;
}

std::string encode_chat_request(const ChatRequest& request) {
  json body = {{"model", request.model}, {"messages", json::array()}};
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (request.temperature) body["temperature"] = *request.temperature;
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string decode_chat_content(const std::string& raw) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("malformed completion JSON: ") + e.what());
  }
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected completion shape: ") + e.what());
  }
}

}  // namespace satdebias::provider
