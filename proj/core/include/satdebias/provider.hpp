#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace satdebias::provider {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  std::optional<double> temperature;
};

/// Outcome of one completion call. `status` is the HTTP status, or 0 when
/// the request never produced a response (see `error`).
struct ChatResponse {
  int status = 0;
  std::string content;
  std::string raw;
  std::string error;

  bool ok() const noexcept { return error.empty() && status >= 200 && status < 300; }
};

/// Chat-completion endpoint. Implementations must tolerate concurrent
/// complete() calls.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  /// Model name recorded in generation records.
  virtual std::string model() const = 0;
};

struct ProviderConfig {
  std::string base_url;
  std::string api_key;
  std::string model;
  std::optional<double> temperature;
  std::chrono::seconds timeout{120};

  /// Reads DEBIAS_LLM_BASE_URL, DEBIAS_LLM_API_KEY and DEBIAS_LLM_MODEL.
  static ProviderConfig from_env();
};

/// OpenAI-compatible `POST {base_url}/chat/completions` with bearer auth.
class OpenAiCompatibleProvider final : public ChatProvider {
 public:
  explicit OpenAiCompatibleProvider(ProviderConfig config);
  ChatResponse complete(const ChatRequest& request) override;
  std::string model() const override { return config_.model; }
  const ProviderConfig& config() const noexcept { return config_; }

 private:
  ProviderConfig config_;
};

/// Returns the last user message verbatim.
class EchoProvider final : public ChatProvider {
 public:
  ChatResponse complete(const ChatRequest& request) override;
  std::string model() const override { return "echo"; }
};

/// Replays recorded completions keyed by the exact user message text.
/// Fixture JSONL: {"request": str, "response": str, "status": int?}.
class FixtureProvider final : public ChatProvider {
 public:
  explicit FixtureProvider(const std::filesystem::path& path, std::string model_name = "fixture");
  FixtureProvider(std::map<std::string, std::string> responses, std::string model_name = "fixture");
  ChatResponse complete(const ChatRequest& request) override;
  std::string model() const override { return model_; }
  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::map<std::string, ChatResponse> responses_;
  std::string model_;
};

/// Delegates to a callable; used for fault injection.
class ScriptedProvider final : public ChatProvider {
 public:
  using Script = std::function<ChatResponse(const ChatRequest&)>;
  explicit ScriptedProvider(Script script, std::string model_name = "scripted")
      : script_(std::move(script)), model_(std::move(model_name)) {}
  ChatResponse complete(const ChatRequest& request) override { return script_(request); }
  std::string model() const override { return model_; }

 private:
  Script script_;
  std::string model_;
};

/// Exponential backoff. `sleep` defaults to std::this_thread::sleep_for.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};
  std::function<void(std::chrono::milliseconds)> sleep;

  /// Delay after failed attempt number `attempt` (1-based).
  std::chrono::milliseconds backoff(int attempt) const;
  void wait(int attempt) const;

  static RetryPolicy no_wait(int attempts = 3);
};

/// Transport errors, 429, 5xx and empty 2xx completions are retried.
bool is_retryable(const ChatResponse& response) noexcept;

/// Request body / response parsing for the chat-completions wire format.
std::string encode_chat_request(const ChatRequest& request);
/// Extracts choices[0].message.content; throws ProviderError on malformed JSON.
std::string decode_chat_content(const std::string& raw);

/// Last message with role "user", or empty.
const std::string& last_user_message(const ChatRequest& request);

}  // namespace satdebias::provider
