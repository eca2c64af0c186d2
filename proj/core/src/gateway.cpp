#include "srl/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "srl/error.hpp"

namespace srl {

using nlohmann::json;

std::string_view to_string(ChatMessage::Role r) noexcept {
  switch (r) {
    case ChatMessage::Role::System: return "system";
    case ChatMessage::Role::User: return "user";
    case ChatMessage::Role::Assistant: return "assistant";
  }
  return "?";
}

void check_messages(const std::vector<ChatMessage>& messages) {
  if (messages.empty() || messages.front().role != ChatMessage::Role::System) {
    raise(ErrorCode::InvalidArgument, "messages must begin with a system message");
  }
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i > 0 && messages[i].role == ChatMessage::Role::System) {
      raise(ErrorCode::InvalidArgument, "only the first message may be a system message");
    }
    if (messages[i].content.empty()) {
      raise(ErrorCode::InvalidArgument, "message " + std::to_string(i) + " has empty content");
    }
  }
}

void validate_config(const ProviderConfig& cfg) {
  if (cfg.request_timeout_seconds <= 0) {
    raise(ErrorCode::ConfigError, "request_timeout_seconds must be positive");
  }
  if (cfg.max_retries < 0) raise(ErrorCode::ConfigError, "max_retries must be non-negative");
  if (cfg.backoff_base.count() < 0) raise(ErrorCode::ConfigError, "backoff must be non-negative");
  if (cfg.provider == Provider::RemoteHttp) {
    if (cfg.endpoint.empty()) raise(ErrorCode::ConfigError, "remote provider needs an endpoint");
    if (cfg.model.empty()) raise(ErrorCode::ConfigError, "remote provider needs a model name");
    if (cfg.api_key_env.empty()) {
      raise(ErrorCode::ConfigError, "remote provider needs an API key variable name");
    }
  }
}

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

ProviderConfig config_from_env() {
  ProviderConfig cfg;
  cfg.endpoint = env_or("SRL_LLM_BASE_URL");
  cfg.model = env_or("SRL_LLM_MODEL");
  cfg.provider = cfg.endpoint.empty() ? Provider::Mock : Provider::RemoteHttp;
  if (auto t = env_or("SRL_LLM_TIMEOUT_S"); !t.empty()) {
    try {
      cfg.request_timeout_seconds = std::stod(t);
    } catch (const std::exception&) {
      raise(ErrorCode::ConfigError, "SRL_LLM_TIMEOUT_S is not a number: " + t);
    }
  }
  return cfg;
}

ProviderConfig config_from_json(const json& j, ProviderConfig cfg) {
  if (!j.is_object()) raise(ErrorCode::ConfigError, "gateway config must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "provider") {
        const auto p = value.get<std::string>();
        if (p == "mock") cfg.provider = Provider::Mock;
        else if (p == "remote") cfg.provider = Provider::RemoteHttp;
        else raise(ErrorCode::ConfigError, "unknown provider '" + p + "'");
      } else if (key == "endpoint") {
        cfg.endpoint = value.get<std::string>();
      } else if (key == "model") {
        cfg.model = value.get<std::string>();
      } else if (key == "api_key_env") {
        cfg.api_key_env = value.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::int64_t>();
      } else if (key == "timeout_s") {
        cfg.request_timeout_seconds = value.get<double>();
      } else if (key == "max_retries") {
        cfg.max_retries = value.get<int>();
      } else if (key == "backoff_ms") {
        cfg.backoff_base = std::chrono::milliseconds(value.get<std::int64_t>());
      } else {
        raise(ErrorCode::ConfigError, "unknown gateway setting '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::ConfigError, std::string("gateway config: ") + e.what());
  }
  return cfg;
}

CompletionResult MockGateway::complete(const std::vector<ChatMessage>& messages) {
  check_messages(messages);
  return mock_complete(messages, seed_);
}

RemoteGateway::RemoteGateway(ProviderConfig cfg, HttpTransport transport, Sleeper sleeper)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
  validate_config(cfg_);
  if (cfg_.provider != Provider::RemoteHttp) {
    raise(ErrorCode::ConfigError, "RemoteGateway needs a remote provider config");
  }
  if (!transport_) raise(ErrorCode::ConfigError, "RemoteGateway needs a transport");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

namespace {

std::string completions_url(std::string base) {
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base + "/chat/completions";
}

std::string request_body(const ProviderConfig& cfg, const std::vector<ChatMessage>& messages) {
  json body;
  body["model"] = cfg.model;
  body["stream"] = false;
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  body["messages"] = std::move(msgs);
  return body.dump();
}

CompletionResult parse_completion(const std::string& body) {
  CompletionResult out;
  try {
    const auto doc = json::parse(body);
    const auto& choice = doc.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    if (!content.is_string()) raise(ErrorCode::MalformedResponse, "completion content is not text");
    out.text = content.get<std::string>();
    if (auto it = doc.find("model"); it != doc.end() && it->is_string()) {
      out.provider_meta["model"] = it->get<std::string>();
    }
    if (auto it = doc.find("id"); it != doc.end() && it->is_string()) {
      out.provider_meta["id"] = it->get<std::string>();
    }
    if (auto it = choice.find("finish_reason"); it != choice.end() && it->is_string()) {
      out.provider_meta["finish_reason"] = it->get<std::string>();
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::MalformedResponse, std::string("unreadable completion: ") + e.what());
  }
  if (out.text.empty()) raise(ErrorCode::MalformedResponse, "completion text is empty");
  return out;
}

}  // namespace

CompletionResult RemoteGateway::complete(const std::vector<ChatMessage>& messages) {
  check_messages(messages);
  const std::string key = env_or(cfg_.api_key_env.c_str());
  if (key.empty()) raise(ErrorCode::ConfigError, "environment variable " + cfg_.api_key_env + " is not set");

  HttpRequest req;
  req.url = completions_url(cfg_.endpoint);
  req.headers = {{"Authorization", "Bearer " + key}, {"Content-Type", "application/json"}};
  req.body = request_body(cfg_, messages);
  req.timeout_seconds = cfg_.request_timeout_seconds;

  int attempts = 0;
  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    last_attempts_.store(++attempts);
    const HttpResponse resp = transport_(req);
    const bool last = attempt >= cfg_.max_retries;

    if (resp.status == 401 || resp.status == 403) {
      raise(ErrorCode::AuthError, "provider rejected credentials (HTTP " + std::to_string(resp.status) + ")");
    }
    if (resp.status >= 200 && resp.status < 300) {
      auto out = parse_completion(resp.body);
      out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      out.provider_meta["attempts"] = std::to_string(attempts);
      return out;
    }
    const bool transient = resp.status == 0 || resp.status == 429 || resp.status >= 500;
    if (!transient) {
      raise(ErrorCode::UpstreamError, "provider returned HTTP " + std::to_string(resp.status));
    }
    if (last) {
      if (resp.status == 0) raise(ErrorCode::TimeoutError, "provider unreachable: " + resp.error);
      if (resp.status == 429) raise(ErrorCode::RateLimitError, "provider rate limit persisted after retries");
      raise(ErrorCode::UpstreamError, "provider returned HTTP " + std::to_string(resp.status));
    }
    sleeper_(cfg_.backoff_base * (1LL << std::min(attempt, 16)));
  }
}

std::unique_ptr<LlmGateway> make_gateway(const ProviderConfig& cfg) {
  validate_config(cfg);
  if (cfg.provider == Provider::Mock) return std::make_unique<MockGateway>(cfg.seed);
  return std::make_unique<RemoteGateway>(cfg);
}

CompletionResult complete(const std::vector<ChatMessage>& messages, const ProviderConfig& cfg) {
  return make_gateway(cfg)->complete(messages);
}

}  // namespace srl
