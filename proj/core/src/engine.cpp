#include "srl/engine.hpp"

#include <algorithm>

#include "srl/error.hpp"
#include "srl/text.hpp"

namespace srl {

std::string_view to_string(TaskStage s) noexcept {
  switch (s) {
    case TaskStage::Introduction: return "introduction";
    case TaskStage::Planning: return "planning";
    case TaskStage::TaskProcess: return "task_process";
    case TaskStage::Review: return "review";
  }
  return "?";
}

std::string_view to_string(Condition c) noexcept {
  return c == Condition::FullSrl ? "full_srl" : "no_srl";
}

std::string_view to_string(SubtaskStatus s) noexcept {
  switch (s) {
    case SubtaskStatus::Locked: return "locked";
    case SubtaskStatus::Available: return "available";
    case SubtaskStatus::InProgress: return "in_progress";
    case SubtaskStatus::Complete: return "complete";
  }
  return "?";
}

std::string_view to_string(PlanSource s) noexcept {
  return s == PlanSource::AgentSuggested ? "agent_suggested" : "learner_edited";
}

std::optional<TaskStage> task_stage_from(std::string_view s) noexcept {
  for (auto v : {TaskStage::Introduction, TaskStage::Planning, TaskStage::TaskProcess,
                 TaskStage::Review}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<Condition> condition_from(std::string_view s) noexcept {
  if (s == "full_srl") return Condition::FullSrl;
  if (s == "no_srl") return Condition::NoSrl;
  return std::nullopt;
}

std::optional<SubtaskStatus> subtask_status_from(std::string_view s) noexcept {
  for (auto v : {SubtaskStatus::Locked, SubtaskStatus::Available, SubtaskStatus::InProgress,
                 SubtaskStatus::Complete}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<PlanSource> plan_source_from(std::string_view s) noexcept {
  if (s == "agent_suggested") return PlanSource::AgentSuggested;
  if (s == "learner_edited") return PlanSource::LearnerEdited;
  return std::nullopt;
}

SubtaskStatus SessionState::status(std::string_view subtask_id) const {
  auto it = subtask_status.find(std::string(subtask_id));
  return it == subtask_status.end() ? SubtaskStatus::Locked : it->second;
}

namespace {

double indicator(const SubtaskOutcome& o, const char* name) {
  auto it = o.quality.find(name);
  return it == o.quality.end() ? 0.0 : it->second;
}

bool has_text(const SubtaskOutcome& o) {
  return o.artifact_text && !trim(*o.artifact_text).empty();
}

}  // namespace

bool evaluate_completion(const CompletionCriteria& criteria, SubtaskKind kind,
                         const SubtaskOutcome& outcome) {
  if (!rule_compatible(kind, criteria.rule)) {
    raise(ErrorCode::IncompatibleRule, "rule " + std::string(to_string(criteria.rule)) +
                                           " cannot gate a " + std::string(to_string(kind)) +
                                           " subtask");
  }
  const auto n = static_cast<double>(criteria.threshold);
  switch (criteria.rule) {
    case CompletionRule::AllQuestionsCorrect: {
      const double total = indicator(outcome, "quiz_question_count");
      return total > 0 && indicator(outcome, "quiz_correct_count") >= total;
    }
    case CompletionRule::MinQuestionsCorrect:
      return indicator(outcome, "quiz_correct_count") >= n;
    case CompletionRule::MinWords:
      return indicator(outcome, "word_count") >= n;
    case CompletionRule::MinChatTurns:
      return indicator(outcome, "chat_turns") >= n;
    case CompletionRule::SummarySubmitted:
    case CompletionRule::GoalRecorded:
      return has_text(outcome);
  }
  return false;
}

TaskEngine::TaskEngine(std::shared_ptr<const ContentPack> pack)
    : pack_(std::move(pack)), order_(global_order(*pack_)) {}

const SubtaskDef& TaskEngine::subtask(std::string_view subtask_id) const {
  const auto* sub = pack_->find_subtask(subtask_id);
  if (!sub) raise(ErrorCode::UnknownSubtask, "unknown subtask '" + std::string(subtask_id) + "'");
  return *sub;
}

SessionState TaskEngine::start_session(Condition condition, std::string session_id) const {
  SessionState s;
  s.session_id = std::move(session_id);
  s.pack_id = pack_->pack_id;
  s.condition = condition;
  s.stage = TaskStage::Introduction;
  for (const auto* sub : pack_->all_subtasks()) s.subtask_status[sub->id] = SubtaskStatus::Locked;
  return s;
}

std::optional<TaskStage> TaskEngine::next_stage(const SessionState& s) const {
  switch (s.stage) {
    case TaskStage::Introduction:
      return s.condition == Condition::NoSrl ? TaskStage::TaskProcess : TaskStage::Planning;
    case TaskStage::Planning: return TaskStage::TaskProcess;
    case TaskStage::TaskProcess: return TaskStage::Review;
    case TaskStage::Review: return std::nullopt;
  }
  return std::nullopt;
}

bool TaskEngine::stage_gate_open(const SessionState& s) const {
  switch (s.stage) {
    case TaskStage::Introduction: return true;
    case TaskStage::Planning: return s.condition == Condition::NoSrl || s.plan.has_value();
    case TaskStage::TaskProcess: return all_complete(s);
    case TaskStage::Review: return false;
  }
  return false;
}

SessionState TaskEngine::advance_stage(SessionState s) const {
  const auto next = next_stage(s);
  if (!next) raise(ErrorCode::TerminalError, "session is already in the review stage");
  if (!stage_gate_open(s)) {
    raise(ErrorCode::StageGateError,
          s.stage == TaskStage::Planning
              ? std::string("record a learning plan before leaving the planning stage")
              : std::string("complete every subtask before leaving the task process stage"));
  }
  s.stage = *next;
  if (s.stage == TaskStage::TaskProcess) unlock_ready(s);
  return s;
}

bool TaskEngine::dependencies_complete(const SessionState& s, std::string_view subtask_id) const {
  const auto deps = pack_->effective_dependencies(subtask_id);
  return std::all_of(deps.begin(), deps.end(), [&](const std::string& d) {
    return s.status(d) == SubtaskStatus::Complete;
  });
}

void TaskEngine::unlock_ready(SessionState& s) const {
  if (s.stage != TaskStage::TaskProcess) return;
  for (const auto& id : order_) {
    auto& st = s.subtask_status[id];
    if (st == SubtaskStatus::Locked && dependencies_complete(s, id)) st = SubtaskStatus::Available;
  }
}

SessionState TaskEngine::start_subtask(SessionState s, std::string_view subtask_id) const {
  subtask(subtask_id);
  auto& st = s.subtask_status[std::string(subtask_id)];
  if (st == SubtaskStatus::InProgress) return s;
  if (st != SubtaskStatus::Available) {
    raise(ErrorCode::NotAvailableError,
          "subtask '" + std::string(subtask_id) + "' is " + std::string(to_string(st)));
  }
  st = SubtaskStatus::InProgress;
  return s;
}

namespace {

void check_open(const SessionState& s, std::string_view id) {
  const auto st = s.status(id);
  if (st != SubtaskStatus::Available && st != SubtaskStatus::InProgress) {
    raise(ErrorCode::NotAvailableError,
          "subtask '" + std::string(id) + "' is " + std::string(to_string(st)));
  }
}

void check_indicators(const SubtaskDef& sub, const SubtaskOutcome& outcome) {
  const auto allowed = quality_indicators(sub.kind);
  for (const auto& [name, value] : outcome.quality) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      raise(ErrorCode::InvalidPayload, "quality indicator '" + name + "' is not defined for " +
                                           std::string(to_string(sub.kind)) + " subtasks");
    }
    if (value < 0) raise(ErrorCode::InvalidPayload, "quality indicator '" + name + "' is negative");
  }
}

SubtaskOutcome& tracked(SessionState& s, std::string_view id) {
  auto& rec = s.outcomes[std::string(id)];
  rec.subtask_id = std::string(id);
  return rec;
}

}  // namespace

SessionState TaskEngine::complete_subtask(SessionState s, std::string_view subtask_id,
                                          SubtaskOutcome outcome) const {
  const auto& sub = subtask(subtask_id);
  check_open(s, subtask_id);
  check_indicators(sub, outcome);
  if (!evaluate_completion(sub.completion, sub.kind, outcome)) {
    raise(ErrorCode::CriteriaError, "subtask '" + sub.id + "' does not meet its completion rule " +
                                        std::string(to_string(sub.completion.rule)));
  }
  auto& rec = tracked(s, subtask_id);
  rec.quality = std::move(outcome.quality);
  rec.artifact_text = std::move(outcome.artifact_text);
  rec.attempts += 1;
  s.subtask_status[sub.id] = SubtaskStatus::Complete;
  unlock_ready(s);
  return s;
}

SessionState TaskEngine::record_failed_attempt(SessionState s, std::string_view subtask_id,
                                               SubtaskOutcome outcome) const {
  const auto& sub = subtask(subtask_id);
  check_open(s, subtask_id);
  check_indicators(sub, outcome);
  auto& rec = tracked(s, subtask_id);
  rec.quality = std::move(outcome.quality);
  rec.artifact_text = std::move(outcome.artifact_text);
  rec.attempts += 1;
  return s;
}

SubmitResult TaskEngine::submit_subtask(SessionState s, std::string_view subtask_id,
                                        SubtaskOutcome outcome) const {
  const auto& sub = subtask(subtask_id);
  check_open(s, subtask_id);
  check_indicators(sub, outcome);
  if (evaluate_completion(sub.completion, sub.kind, outcome)) {
    return {complete_subtask(std::move(s), subtask_id, std::move(outcome)), true};
  }
  return {record_failed_attempt(std::move(s), subtask_id, std::move(outcome)), false};
}

std::vector<std::string> TaskEngine::available_subtasks(const SessionState& s) const {
  std::vector<std::string> out;
  if (s.stage != TaskStage::TaskProcess) return out;
  for (const auto& id : order_) {
    if (s.status(id) == SubtaskStatus::Available) out.push_back(id);
  }
  return out;
}

bool TaskEngine::task_complete(const SessionState& s, std::string_view task_id) const {
  const auto* task = pack_->find_task(task_id);
  if (!task) raise(ErrorCode::UnknownTask, "unknown task '" + std::string(task_id) + "'");
  return std::all_of(task->subtasks.begin(), task->subtasks.end(), [&](const SubtaskDef& sub) {
    return s.status(sub.id) == SubtaskStatus::Complete;
  });
}

bool TaskEngine::all_complete(const SessionState& s) const {
  return std::all_of(order_.begin(), order_.end(), [&](const std::string& id) {
    return s.status(id) == SubtaskStatus::Complete;
  });
}

}  // namespace srl
