#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "srl/engine.hpp"
#include "srl/state.hpp"

namespace srl {

enum class EventKind {
  SessionStarted,
  StageAdvanced,
  PlanRecorded,
  SubtaskStarted,
  SubtaskSubmitted,
  SubtaskCompleted,
  AgentPrompted,
  AgentReplied,
  TimeTicked,
  AssessmentScored,
};

std::string_view to_string(EventKind k) noexcept;
std::optional<EventKind> event_kind_from(std::string_view s) noexcept;

/// One state transition. `timestamp` is the session clock (seconds) after
/// the event applies, so logs do not depend on wall time.
struct SessionEvent {
  std::uint64_t event_seq = 0;
  std::string session_id;
  std::int64_t timestamp = 0;
  EventKind kind = EventKind::SessionStarted;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const SessionEvent&) const = default;
};

/// The single transition function shared by the live path and replay.
/// `s` is ignored for SessionStarted. Throws ReplayError on sequence gaps,
/// session mismatches or timestamps that disagree with the resulting clock;
/// engine errors propagate unchanged.
SessionState apply_event(const TaskEngine& engine, SessionState s, const SessionEvent& ev);

/// Folds a complete log starting at SessionStarted.
SessionState replay(const TaskEngine& engine, const std::vector<SessionEvent>& events);

/// Continues from a snapshot, applying events whose seq is past it.
SessionState replay_from(const TaskEngine& engine, SessionState snapshot,
                         const std::vector<SessionEvent>& events);

nlohmann::json event_to_json(const SessionEvent& ev);
SessionEvent event_from_json(const nlohmann::json& j);

/// One compact JSON object per line, each terminated by '\n'.
std::string events_to_jsonl(const std::vector<SessionEvent>& events);
std::vector<SessionEvent> events_from_jsonl(std::string_view text);

nlohmann::json plan_to_json(const LearningPlan& plan);
LearningPlan plan_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const SubtaskOutcome& o);
SubtaskOutcome outcome_from_json(const nlohmann::json& j);

nlohmann::json transcript_to_json(const ChatTranscript& t);

nlohmann::json state_to_json(const SessionState& s);
SessionState state_from_json(const nlohmann::json& j);

}  // namespace srl
