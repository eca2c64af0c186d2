#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace srl {

enum class Provider { RemoteHttp, Mock };

struct ChatMessage {
  enum class Role { System, User, Assistant };
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

std::string_view to_string(ChatMessage::Role r) noexcept;

struct CompletionResult {
  std::string text;
  std::int64_t latency_ms = 0;
  std::map<std::string, std::string> provider_meta;
};

struct ProviderConfig {
  Provider provider = Provider::Mock;
  /// Base URL of a chat-completions API, e.g. https://host/v1.
  std::string endpoint;
  std::string model;
  /// Name of the environment variable holding the API key.
  std::string api_key_env = "SRL_LLM_API_KEY";
  std::int64_t seed = 0;
  double request_timeout_seconds = 30.0;
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{250};
};

/// Throws ConfigError when a remote config lacks endpoint, model or key
/// reference, or when numeric limits are out of range.
void validate_config(const ProviderConfig& cfg);

/// Remote settings from SRL_LLM_BASE_URL, SRL_LLM_MODEL, SRL_LLM_API_KEY and
/// SRL_LLM_TIMEOUT_S; a mock config when no base URL is set.
ProviderConfig config_from_env();

/// Overlays keys of a JSON object ("provider", "endpoint", "model",
/// "api_key_env", "seed", "timeout_s", "max_retries", "backoff_ms").
ProviderConfig config_from_json(const nlohmann::json& j, ProviderConfig base = {});

class LlmGateway {
 public:
  virtual ~LlmGateway() = default;
  /// `messages` must start with exactly one system message.
  virtual CompletionResult complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Deterministic stand-in for a hosted model. Replies depend only on the
/// messages and the seed; agent intent is read from template markers.
CompletionResult mock_complete(const std::vector<ChatMessage>& messages, std::int64_t seed);

class MockGateway final : public LlmGateway {
 public:
  explicit MockGateway(std::int64_t seed) : seed_(seed) {}
  CompletionResult complete(const std::vector<ChatMessage>& messages) override;

 private:
  std::int64_t seed_;
};

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  double timeout_seconds = 30.0;
};

/// status 0 means the request never produced an HTTP response.
struct HttpResponse {
  int status = 0;
  std::string body;
  std::string error;
};

using HttpTransport = std::function<HttpResponse(const HttpRequest&)>;

/// POSTs through cpp-httplib; supports http:// and, when built with OpenSSL,
/// https:// URLs.
HttpTransport default_transport();

/// Chat-completions client with bounded retries. Authentication failures
/// (401/403) are never retried; 429, 5xx and transport failures are retried
/// up to max_retries times with exponential backoff.
class RemoteGateway final : public LlmGateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteGateway(ProviderConfig cfg, HttpTransport transport = default_transport(),
                         Sleeper sleeper = {});
  CompletionResult complete(const std::vector<ChatMessage>& messages) override;

  /// HTTP attempts made by the most recent complete() call.
  int last_attempts() const noexcept { return last_attempts_.load(); }

 private:
  ProviderConfig cfg_;
  HttpTransport transport_;
  Sleeper sleeper_;
  std::atomic<int> last_attempts_{0};
};

std::unique_ptr<LlmGateway> make_gateway(const ProviderConfig& cfg);

CompletionResult complete(const std::vector<ChatMessage>& messages, const ProviderConfig& cfg);

/// Throws InvalidArgument unless messages start with exactly one system
/// message and every content is non-empty.
void check_messages(const std::vector<ChatMessage>& messages);

}  // namespace srl
