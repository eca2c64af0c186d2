#pragma once

#include <string>
#include <string_view>

#include "srl/service.hpp"

namespace srl {

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Transport-free HTTP surface over a SessionService:
///
///   POST /sessions                          {"pack_id", "condition"}
///   GET  /sessions/{id}/view
///   POST /sessions/{id}/plan                {} asks the agent, {"ordering",...} records
///   POST /sessions/{id}/advance
///   POST /sessions/{id}/subtasks/{sid}/start
///   POST /sessions/{id}/subtasks/{sid}/submit
///   POST /sessions/{id}/chat                {"kind", ...}
///   POST /sessions/{id}/tick                {"seconds", "subtask_id"?}
///   GET  /sessions/{id}/events              JSONL
///   POST /assessments/{instrument}/score    {"responses", "session_id"?, ...}
///
/// Errors come back as {"error": code, "message": text} with the code's
/// HTTP status.
class ApiRouter {
 public:
  explicit ApiRouter(SessionService& service) : service_(service) {}

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

 private:
  ApiResponse dispatch(std::string_view method, std::string_view path, const nlohmann::json& body);

  SessionService& service_;
};

}  // namespace srl
