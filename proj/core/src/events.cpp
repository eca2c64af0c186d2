#include "srl/events.hpp"

#include "srl/error.hpp"
#include "srl/srl_layer.hpp"

namespace srl {

using nlohmann::json;

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::SessionStarted: return "SessionStarted";
    case EventKind::StageAdvanced: return "StageAdvanced";
    case EventKind::PlanRecorded: return "PlanRecorded";
    case EventKind::SubtaskStarted: return "SubtaskStarted";
    case EventKind::SubtaskSubmitted: return "SubtaskSubmitted";
    case EventKind::SubtaskCompleted: return "SubtaskCompleted";
    case EventKind::AgentPrompted: return "AgentPrompted";
    case EventKind::AgentReplied: return "AgentReplied";
    case EventKind::TimeTicked: return "TimeTicked";
    case EventKind::AssessmentScored: return "AssessmentScored";
  }
  return "?";
}

std::optional<EventKind> event_kind_from(std::string_view s) noexcept {
  for (int i = 0; i <= static_cast<int>(EventKind::AssessmentScored); ++i) {
    const auto k = static_cast<EventKind>(i);
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void bad_payload(const SessionEvent& ev, const std::string& what) {
  raise(ErrorCode::ReplayError, "event " + std::to_string(ev.event_seq) + " (" +
                                    std::string(to_string(ev.kind)) + "): " + what);
}

template <typename T>
T field(const SessionEvent& ev, const char* key) {
  try {
    return ev.payload.at(key).get<T>();
  } catch (const json::exception& e) {
    bad_payload(ev, std::string("payload field '") + key + "': " + e.what());
  }
}

ChatTurn::Role role_from(const std::string& s) {
  if (s == "user") return ChatTurn::Role::User;
  if (s == "assistant") return ChatTurn::Role::Assistant;
  raise(ErrorCode::ReplayError, "unknown transcript role '" + s + "'");
}

}  // namespace

SessionState apply_event(const TaskEngine& engine, SessionState s, const SessionEvent& ev) {
  if (ev.kind == EventKind::SessionStarted) {
    if (ev.event_seq != 0) bad_payload(ev, "SessionStarted must be event 0");
    const auto pack_id = field<std::string>(ev, "pack_id");
    if (pack_id != engine.pack().pack_id) bad_payload(ev, "session uses pack '" + pack_id + "'");
    const auto cond = condition_from(field<std::string>(ev, "condition"));
    if (!cond) bad_payload(ev, "unknown condition");
    s = engine.start_session(*cond, ev.session_id);
  } else {
    if (ev.event_seq != s.event_seq + 1) {
      raise(ErrorCode::ReplayError, "expected event " + std::to_string(s.event_seq + 1) + ", got " +
                                        std::to_string(ev.event_seq));
    }
    if (ev.session_id != s.session_id) bad_payload(ev, "belongs to session '" + ev.session_id + "'");
    switch (ev.kind) {
      case EventKind::SessionStarted: break;
      case EventKind::StageAdvanced: {
        s = engine.advance_stage(std::move(s));
        if (std::string(to_string(s.stage)) != field<std::string>(ev, "to")) {
          bad_payload(ev, "stage after advance disagrees with the log");
        }
        break;
      }
      case EventKind::PlanRecorded:
        s = record_plan(engine.pack(), std::move(s), plan_from_json(ev.payload.at("plan")));
        break;
      case EventKind::SubtaskStarted:
        s = engine.start_subtask(std::move(s), field<std::string>(ev, "subtask_id"));
        break;
      case EventKind::SubtaskSubmitted:
        if (!field<bool>(ev, "passed")) {
          s = engine.record_failed_attempt(std::move(s), field<std::string>(ev, "subtask_id"),
                                           outcome_from_json(ev.payload.at("outcome")));
        }
        break;
      case EventKind::SubtaskCompleted:
        s = engine.complete_subtask(std::move(s), field<std::string>(ev, "subtask_id"),
                                    outcome_from_json(ev.payload.at("outcome")));
        break;
      case EventKind::AgentPrompted: {
        const auto turn = field<std::string>(ev, "user_turn");
        if (!turn.empty()) {
          s.transcripts[field<std::string>(ev, "channel")].push_back({ChatTurn::Role::User, turn});
        }
        break;
      }
      case EventKind::AgentReplied: {
        const auto text = field<std::string>(ev, "text");
        s.transcripts[field<std::string>(ev, "channel")].push_back({ChatTurn::Role::Assistant, text});
        const auto agent = agent_kind_from(field<std::string>(ev, "agent"));
        if (!agent) bad_payload(ev, "unknown agent");
        if (*agent == AgentKind::Planning) {
          LearningPlan suggestion;
          suggestion.ordering = field<std::vector<std::string>>(ev, "ordering");
          suggestion.time_allocations = field<std::map<std::string, std::int64_t>>(ev, "time_allocations");
          suggestion.source = PlanSource::AgentSuggested;
          s.suggested_plan = std::move(suggestion);
        } else if (*agent == AgentKind::Reflection) {
          s.reflection = text;
        }
        break;
      }
      case EventKind::TimeTicked: {
        std::optional<std::string> active;
        if (auto it = ev.payload.find("subtask_id"); it != ev.payload.end() && !it->is_null()) {
          active = it->get<std::string>();
        }
        s = tick_time(std::move(s), active, field<std::int64_t>(ev, "seconds"));
        break;
      }
      case EventKind::AssessmentScored:
        s.assessments.push_back(report_from_json(ev.payload.at("report")));
        break;
    }
  }
  if (s.clock != ev.timestamp) {
    bad_payload(ev, "timestamp " + std::to_string(ev.timestamp) + " disagrees with session clock " +
                        std::to_string(s.clock));
  }
  s.event_seq = ev.event_seq;
  return s;
}

SessionState replay(const TaskEngine& engine, const std::vector<SessionEvent>& events) {
  if (events.empty() || events.front().kind != EventKind::SessionStarted) {
    raise(ErrorCode::ReplayError, "an event log must begin with SessionStarted");
  }
  SessionState s;
  for (const auto& ev : events) s = apply_event(engine, std::move(s), ev);
  return s;
}

SessionState replay_from(const TaskEngine& engine, SessionState snapshot,
                         const std::vector<SessionEvent>& events) {
  for (const auto& ev : events) {
    if (ev.event_seq <= snapshot.event_seq) continue;
    snapshot = apply_event(engine, std::move(snapshot), ev);
  }
  return snapshot;
}

json event_to_json(const SessionEvent& ev) {
  return json{{"event_seq", ev.event_seq},
              {"session_id", ev.session_id},
              {"timestamp", ev.timestamp},
              {"kind", std::string(to_string(ev.kind))},
              {"payload", ev.payload}};
}

SessionEvent event_from_json(const json& j) {
  SessionEvent ev;
  try {
    ev.event_seq = j.at("event_seq").get<std::uint64_t>();
    ev.session_id = j.at("session_id").get<std::string>();
    ev.timestamp = j.at("timestamp").get<std::int64_t>();
    const auto kind = event_kind_from(j.at("kind").get<std::string>());
    if (!kind) raise(ErrorCode::ReplayError, "unknown event kind " + j.at("kind").dump());
    ev.kind = *kind;
    ev.payload = j.at("payload");
  } catch (const json::exception& e) {
    raise(ErrorCode::ReplayError, std::string("malformed event record: ") + e.what());
  }
  return ev;
}

std::string events_to_jsonl(const std::vector<SessionEvent>& events) {
  std::string out;
  for (const auto& ev : events) {
    out += event_to_json(ev).dump();
    out += '\n';
  }
  return out;
}

std::vector<SessionEvent> events_from_jsonl(std::string_view text) {
  std::vector<SessionEvent> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      raise(ErrorCode::ReplayError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(event_from_json(j));
  }
  return out;
}

json plan_to_json(const LearningPlan& plan) {
  return json{{"ordering", plan.ordering},
              {"time_allocations", plan.time_allocations},
              {"strategy_note", plan.strategy_note},
              {"source", std::string(to_string(plan.source))}};
}

LearningPlan plan_from_json(const json& j) {
  LearningPlan p;
  try {
    p.ordering = j.at("ordering").get<std::vector<std::string>>();
    p.time_allocations = j.at("time_allocations").get<std::map<std::string, std::int64_t>>();
    p.strategy_note = j.value("strategy_note", std::string());
    const auto src = plan_source_from(j.value("source", std::string("learner_edited")));
    if (!src) raise(ErrorCode::InvalidPayload, "unknown plan source");
    p.source = *src;
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidPayload, std::string("malformed plan: ") + e.what());
  }
  return p;
}

json outcome_to_json(const SubtaskOutcome& o) {
  json j{{"subtask_id", o.subtask_id},
         {"time_spent_seconds", o.time_spent_seconds},
         {"attempts", o.attempts},
         {"quality", o.quality}};
  j["artifact_text"] = o.artifact_text ? json(*o.artifact_text) : json(nullptr);
  return j;
}

SubtaskOutcome outcome_from_json(const json& j) {
  SubtaskOutcome o;
  try {
    o.subtask_id = j.value("subtask_id", std::string());
    o.time_spent_seconds = j.value("time_spent_seconds", std::int64_t{0});
    o.attempts = j.value("attempts", std::int64_t{0});
    o.quality = j.value("quality", std::map<std::string, double>{});
    if (auto it = j.find("artifact_text"); it != j.end() && !it->is_null()) {
      o.artifact_text = it->get<std::string>();
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidPayload, std::string("malformed outcome: ") + e.what());
  }
  return o;
}

json transcript_to_json(const ChatTranscript& t) {
  json arr = json::array();
  for (const auto& turn : t) {
    arr.push_back({{"role", turn.role == ChatTurn::Role::User ? "user" : "assistant"}, {"text", turn.text}});
  }
  return arr;
}

json state_to_json(const SessionState& s) {
  json j;
  j["session_id"] = s.session_id;
  j["pack_id"] = s.pack_id;
  j["condition"] = std::string(to_string(s.condition));
  j["stage"] = std::string(to_string(s.stage));
  json status = json::object();
  for (const auto& [id, st] : s.subtask_status) status[id] = std::string(to_string(st));
  j["subtask_status"] = std::move(status);
  json outcomes = json::object();
  for (const auto& [id, o] : s.outcomes) outcomes[id] = outcome_to_json(o);
  j["outcomes"] = std::move(outcomes);
  j["plan"] = s.plan ? plan_to_json(*s.plan) : json(nullptr);
  j["suggested_plan"] = s.suggested_plan ? plan_to_json(*s.suggested_plan) : json(nullptr);
  json transcripts = json::object();
  for (const auto& [ch, t] : s.transcripts) transcripts[ch] = transcript_to_json(t);
  j["transcripts"] = std::move(transcripts);
  j["reflection"] = s.reflection ? json(*s.reflection) : json(nullptr);
  json reports = json::array();
  for (const auto& r : s.assessments) reports.push_back(report_to_json(r));
  j["assessments"] = std::move(reports);
  j["clock"] = s.clock;
  j["idle_seconds"] = s.idle_seconds;
  j["event_seq"] = s.event_seq;
  return j;
}

SessionState state_from_json(const json& j) {
  SessionState s;
  try {
    s.session_id = j.at("session_id").get<std::string>();
    s.pack_id = j.at("pack_id").get<std::string>();
    const auto cond = condition_from(j.at("condition").get<std::string>());
    const auto stage = task_stage_from(j.at("stage").get<std::string>());
    if (!cond || !stage) raise(ErrorCode::ReplayError, "snapshot has unknown condition or stage");
    s.condition = *cond;
    s.stage = *stage;
    for (const auto& [id, st] : j.at("subtask_status").items()) {
      const auto v = subtask_status_from(st.get<std::string>());
      if (!v) raise(ErrorCode::ReplayError, "snapshot has unknown status for '" + id + "'");
      s.subtask_status[id] = *v;
    }
    for (const auto& [id, o] : j.at("outcomes").items()) s.outcomes[id] = outcome_from_json(o);
    if (!j.at("plan").is_null()) s.plan = plan_from_json(j.at("plan"));
    if (!j.at("suggested_plan").is_null()) s.suggested_plan = plan_from_json(j.at("suggested_plan"));
    for (const auto& [ch, turns] : j.at("transcripts").items()) {
      auto& t = s.transcripts[ch];
      for (const auto& turn : turns) {
        t.push_back({role_from(turn.at("role").get<std::string>()), turn.at("text").get<std::string>()});
      }
    }
    if (!j.at("reflection").is_null()) s.reflection = j.at("reflection").get<std::string>();
    for (const auto& r : j.at("assessments")) s.assessments.push_back(report_from_json(r));
    s.clock = j.at("clock").get<std::int64_t>();
    s.idle_seconds = j.at("idle_seconds").get<std::int64_t>();
    s.event_seq = j.at("event_seq").get<std::uint64_t>();
  } catch (const json::exception& e) {
    raise(ErrorCode::ReplayError, std::string("malformed snapshot: ") + e.what());
  }
  return s;
}

}  // namespace srl
