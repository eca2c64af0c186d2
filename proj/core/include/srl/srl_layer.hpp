#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srl/content.hpp"
#include "srl/state.hpp"

namespace srl {

enum class SrlPhase { Forethought, Performance, Reflection };

std::string_view to_string(SrlPhase p) noexcept;

/// Planning and Introduction are Forethought, TaskProcess is Performance,
/// Review is Reflection.
SrlPhase current_phase(TaskStage stage) noexcept;

/// Throws InvalidOrdering when `ordering` is not a dependency-respecting
/// permutation of the pack's subtasks.
void check_plan_ordering(const ContentPack& pack, const std::vector<std::string>& ordering);

/// Stores a plan. Requires stage Planning under FullSrl (PhaseError),
/// a dependency-respecting permutation (InvalidOrdering) and an allocation
/// of at least one minute per subtask (InvalidPlan).
SessionState record_plan(const ContentPack& pack, SessionState s, LearningPlan plan);

/// Advances the session clock and attributes the interval to the active
/// subtask, or to idle time when none is given. Throws NotActiveError.
SessionState tick_time(SessionState s, const std::optional<std::string>& active_subtask,
                       std::int64_t elapsed_seconds);

struct SubtaskBudget {
  std::string subtask_id;
  std::int64_t allocated_minutes = 0;
  std::int64_t consumed_seconds = 0;
  /// allocated * 60 - consumed; negative when over budget.
  std::int64_t remaining_seconds = 0;

  bool operator==(const SubtaskBudget&) const = default;
};

struct TimeBudgetView {
  std::vector<SubtaskBudget> subtasks;  // plan order
  std::int64_t total_allocated_minutes = 0;
  std::int64_t total_consumed_seconds = 0;
  std::int64_t total_remaining_seconds = 0;

  bool operator==(const TimeBudgetView&) const = default;
};

/// Requires a recorded plan; nullopt otherwise.
std::optional<TimeBudgetView> time_budget_view(const SessionState& s);

struct SubtaskMetrics {
  std::string subtask_id;
  SubtaskKind kind = SubtaskKind::Knowledge;
  std::int64_t time_spent_seconds = 0;
  std::int64_t attempts = 0;
  bool complete = false;
  std::map<std::string, double> quality;

  bool operator==(const SubtaskMetrics&) const = default;
};

struct MonitorMetrics {
  std::vector<SubtaskMetrics> subtasks;  // declaration order
  double completion_rate = 0.0;
  std::int64_t attributed_seconds = 0;
  std::int64_t idle_seconds = 0;
  std::int64_t session_seconds = 0;

  bool operator==(const MonitorMetrics&) const = default;
};

MonitorMetrics monitor_snapshot(const ContentPack& pack, const SessionState& s);

}  // namespace srl
