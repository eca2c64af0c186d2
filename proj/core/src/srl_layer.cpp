#include "srl/srl_layer.hpp"

#include <algorithm>
#include <set>

#include "srl/error.hpp"

namespace srl {

std::string_view to_string(SrlPhase p) noexcept {
  switch (p) {
    case SrlPhase::Forethought: return "forethought";
    case SrlPhase::Performance: return "performance";
    case SrlPhase::Reflection: return "reflection";
  }
  return "?";
}

SrlPhase current_phase(TaskStage stage) noexcept {
  switch (stage) {
    case TaskStage::Introduction:
    case TaskStage::Planning: return SrlPhase::Forethought;
    case TaskStage::TaskProcess: return SrlPhase::Performance;
    case TaskStage::Review: return SrlPhase::Reflection;
  }
  return SrlPhase::Forethought;
}

void check_plan_ordering(const ContentPack& pack, const std::vector<std::string>& ordering) {
  const auto subs = pack.all_subtasks();
  std::set<std::string> expected;
  for (const auto* sub : subs) expected.insert(sub->id);
  const std::set<std::string> given(ordering.begin(), ordering.end());
  if (given.size() != ordering.size() || given != expected) {
    raise(ErrorCode::InvalidOrdering, "plan ordering must list every subtask exactly once");
  }
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < ordering.size(); ++i) position[ordering[i]] = i;
  for (const auto& id : ordering) {
    for (const auto& dep : pack.effective_dependencies(id)) {
      if (position.at(dep) > position.at(id)) {
        raise(ErrorCode::InvalidOrdering,
              "'" + id + "' is planned before its dependency '" + dep + "'");
      }
    }
  }
}

SessionState record_plan(const ContentPack& pack, SessionState s, LearningPlan plan) {
  if (s.condition != Condition::FullSrl) {
    raise(ErrorCode::PhaseError, "learning plans are not part of this session's condition");
  }
  if (s.stage != TaskStage::Planning) {
    raise(ErrorCode::PhaseError, "plans can only be recorded during the planning stage");
  }
  check_plan_ordering(pack, plan.ordering);
  for (const auto& id : plan.ordering) {
    auto it = plan.time_allocations.find(id);
    if (it == plan.time_allocations.end() || it->second < 1) {
      raise(ErrorCode::InvalidPlan, "subtask '" + id + "' needs an allocation of at least 1 minute");
    }
  }
  if (plan.time_allocations.size() != plan.ordering.size()) {
    raise(ErrorCode::InvalidPlan, "time allocations name subtasks outside the plan");
  }
  s.plan = std::move(plan);
  return s;
}

SessionState tick_time(SessionState s, const std::optional<std::string>& active_subtask,
                       std::int64_t elapsed_seconds) {
  if (elapsed_seconds <= 0) raise(ErrorCode::InvalidArgument, "elapsed seconds must be positive");
  if (active_subtask) {
    const auto st = s.status(*active_subtask);
    if (!s.subtask_status.count(*active_subtask) ||
        (st != SubtaskStatus::Available && st != SubtaskStatus::InProgress)) {
      raise(ErrorCode::NotActiveError, "subtask '" + *active_subtask + "' is not active");
    }
    auto& rec = s.outcomes[*active_subtask];
    rec.subtask_id = *active_subtask;
    rec.time_spent_seconds += elapsed_seconds;
  } else {
    s.idle_seconds += elapsed_seconds;
  }
  s.clock += elapsed_seconds;
  return s;
}

std::optional<TimeBudgetView> time_budget_view(const SessionState& s) {
  if (!s.plan) return std::nullopt;
  TimeBudgetView view;
  for (const auto& id : s.plan->ordering) {
    SubtaskBudget b;
    b.subtask_id = id;
    if (auto it = s.plan->time_allocations.find(id); it != s.plan->time_allocations.end()) {
      b.allocated_minutes = it->second;
    }
    if (auto it = s.outcomes.find(id); it != s.outcomes.end()) {
      b.consumed_seconds = it->second.time_spent_seconds;
    }
    b.remaining_seconds = b.allocated_minutes * 60 - b.consumed_seconds;
    view.total_allocated_minutes += b.allocated_minutes;
    view.total_consumed_seconds += b.consumed_seconds;
    view.total_remaining_seconds += b.remaining_seconds;
    view.subtasks.push_back(std::move(b));
  }
  return view;
}

MonitorMetrics monitor_snapshot(const ContentPack& pack, const SessionState& s) {
  MonitorMetrics m;
  std::size_t complete = 0;
  const auto subs = pack.all_subtasks();
  for (const auto* sub : subs) {
    SubtaskMetrics sm;
    sm.subtask_id = sub->id;
    sm.kind = sub->kind;
    sm.complete = s.status(sub->id) == SubtaskStatus::Complete;
    if (auto it = s.outcomes.find(sub->id); it != s.outcomes.end()) {
      sm.time_spent_seconds = it->second.time_spent_seconds;
      sm.attempts = it->second.attempts;
      sm.quality = it->second.quality;
    }
    if (sm.complete) ++complete;
    m.attributed_seconds += sm.time_spent_seconds;
    m.subtasks.push_back(std::move(sm));
  }
  m.completion_rate = subs.empty() ? 0.0 : static_cast<double>(complete) / static_cast<double>(subs.size());
  m.idle_seconds = s.idle_seconds;
  m.session_seconds = s.clock;
  return m;
}

}  // namespace srl
