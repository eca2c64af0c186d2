#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srl/assessment.hpp"
#include "srl/content.hpp"

namespace srl {

enum class TaskStage { Introduction = 0, Planning = 1, TaskProcess = 2, Review = 3 };
enum class Condition { FullSrl, NoSrl };
enum class SubtaskStatus { Locked, Available, InProgress, Complete };
enum class PlanSource { AgentSuggested, LearnerEdited };

std::string_view to_string(TaskStage s) noexcept;
std::string_view to_string(Condition c) noexcept;
std::string_view to_string(SubtaskStatus s) noexcept;
std::string_view to_string(PlanSource s) noexcept;
std::optional<TaskStage> task_stage_from(std::string_view s) noexcept;
std::optional<Condition> condition_from(std::string_view s) noexcept;
std::optional<SubtaskStatus> subtask_status_from(std::string_view s) noexcept;
std::optional<PlanSource> plan_source_from(std::string_view s) noexcept;

struct SubtaskOutcome {
  std::string subtask_id;
  std::int64_t time_spent_seconds = 0;
  std::int64_t attempts = 0;
  std::map<std::string, double> quality;
  std::optional<std::string> artifact_text;

  bool operator==(const SubtaskOutcome&) const = default;
};

struct ChatTurn {
  enum class Role { User, Assistant };
  Role role = Role::User;
  std::string text;

  bool operator==(const ChatTurn&) const = default;
};

using ChatTranscript = std::vector<ChatTurn>;

struct LearningPlan {
  std::vector<std::string> ordering;
  std::map<std::string, std::int64_t> time_allocations;  // minutes
  std::string strategy_note;
  PlanSource source = PlanSource::LearnerEdited;

  bool operator==(const LearningPlan&) const = default;
};

struct SessionState {
  std::string session_id;
  std::string pack_id;
  Condition condition = Condition::FullSrl;
  TaskStage stage = TaskStage::Introduction;
  std::map<std::string, SubtaskStatus> subtask_status;
  std::map<std::string, SubtaskOutcome> outcomes;
  std::optional<LearningPlan> plan;
  /// Last ordering proposed by the planning agent, shown while planning.
  std::optional<LearningPlan> suggested_plan;
  std::map<std::string, ChatTranscript> transcripts;
  /// Latest reply of the reflection agent.
  std::optional<std::string> reflection;
  std::vector<ScoreReport> assessments;
  std::int64_t clock = 0;
  std::int64_t idle_seconds = 0;
  std::uint64_t event_seq = 0;

  bool operator==(const SessionState&) const = default;

  SubtaskStatus status(std::string_view subtask_id) const;
};

}  // namespace srl
