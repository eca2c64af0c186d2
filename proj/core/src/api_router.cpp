#include "srl/api_router.hpp"

#include <vector>

#include "srl/error.hpp"

namespace srl {

using nlohmann::json;

namespace {

std::vector<std::string> segments(std::string_view path) {
  std::vector<std::string> out;
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::size_t pos = 0;
  while (pos <= path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    if (next > pos) out.emplace_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

ApiResponse ok(const json& j) { return {200, j.dump(), "application/json"}; }

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", code}, {"message", message}}.dump(), "application/json"};
}

}  // namespace

ApiResponse ApiRouter::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    json parsed = json::object();
    if (!body.empty() && body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
      try {
        parsed = json::parse(body);
      } catch (const json::parse_error& e) {
        raise(ErrorCode::InvalidPayload, std::string("request body is not JSON: ") + e.what());
      }
    }
    return dispatch(method, path, parsed);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(422, to_string(ErrorCode::InvalidPayload), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

ApiResponse ApiRouter::dispatch(std::string_view method, std::string_view path, const json& body) {
  const auto seg = segments(path);
  const bool get = method == "GET";
  const bool post = method == "POST";
  auto not_found = [&] { return error_response(404, "NotFound", "no route for " + std::string(method) + " " + std::string(path)); };

  if (seg.size() == 1 && seg[0] == "sessions") {
    if (!post) return error_response(405, "MethodNotAllowed", "use POST /sessions");
    const auto pack_id = body.value("pack_id", std::string());
    const auto cond = condition_from(body.value("condition", std::string("full_srl")));
    if (pack_id.empty()) raise(ErrorCode::InvalidPayload, "pack_id is required");
    if (!cond) raise(ErrorCode::InvalidPayload, "condition must be full_srl or no_srl");
    const auto id = service_.open_session(pack_id, *cond);
    return ok(json{{"session_id", id}, {"view", service_.view(id)}});
  }
  if (seg.size() == 3 && seg[0] == "assessments" && seg[2] == "score") {
    if (!post) return not_found();
    std::optional<std::string> sid;
    if (auto it = body.find("session_id"); it != body.end() && !it->is_null()) sid = it->get<std::string>();
    auto report = service_.score_assessment(seg[1], sheet_from_json(body), sid);
    return ok(report_to_json(report));
  }
  if (seg.size() >= 3 && seg[0] == "sessions") {
    const auto& id = seg[1];
    const auto& op = seg[2];
    if (seg.size() == 3) {
      if (get && op == "view") return ok(service_.view(id));
      if (get && op == "events") return {200, service_.export_events(id), "application/x-ndjson"};
      if (post && op == "advance") return ok(service_.advance(id));
      if (post && op == "plan") {
        return body.contains("ordering") ? ok(service_.record_plan(id, body)) : ok(service_.plan_request(id));
      }
      if (post && op == "chat") return ok(service_.chat(id, body));
      if (post && op == "tick") return ok(service_.tick(id, body));
    }
    if (seg.size() == 5 && op == "subtasks" && post) {
      if (seg[4] == "start") return ok(service_.start_subtask(id, seg[3]));
      if (seg[4] == "submit") return ok(service_.submit_subtask(id, seg[3], body));
    }
  }
  return not_found();
}

}  // namespace srl
