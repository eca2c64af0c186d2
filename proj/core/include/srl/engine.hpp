#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "srl/content.hpp"
#include "srl/state.hpp"

namespace srl {

/// Pure predicate over an outcome's quality indicators and artifact text.
/// Thresholds are inclusive. Throws IncompatibleRule when `rule` cannot gate
/// a subtask of `kind`.
bool evaluate_completion(const CompletionCriteria& criteria, SubtaskKind kind,
                         const SubtaskOutcome& outcome);

struct SubmitResult {
  SessionState state;
  bool completed = false;
};

/// Session state machine over one content pack. Operations take the state by
/// value and return the successor; failures throw and leave the caller's
/// state untouched. No I/O and no wall clock.
class TaskEngine {
 public:
  explicit TaskEngine(std::shared_ptr<const ContentPack> pack);

  const ContentPack& pack() const noexcept { return *pack_; }
  const std::shared_ptr<const ContentPack>& pack_ptr() const noexcept { return pack_; }

  SessionState start_session(Condition condition, std::string session_id) const;

  /// Introduction -> Planning -> TaskProcess -> Review. NoSrl sessions skip
  /// Planning. Throws StageGateError or TerminalError.
  SessionState advance_stage(SessionState s) const;

  /// The stage advance_stage would move to, or nullopt at Review.
  std::optional<TaskStage> next_stage(const SessionState& s) const;

  /// Whether the current stage's exit condition holds.
  bool stage_gate_open(const SessionState& s) const;

  SessionState start_subtask(SessionState s, std::string_view subtask_id) const;

  /// Completes a subtask whose criteria pass on `outcome`. Quality and
  /// artifact come from `outcome`; time and attempts come from the session's
  /// own tracking. Throws NotAvailableError or CriteriaError.
  SessionState complete_subtask(SessionState s, std::string_view subtask_id,
                                SubtaskOutcome outcome) const;

  /// Records a failed attempt: attempts + 1, the subtask stays open.
  SessionState record_failed_attempt(SessionState s, std::string_view subtask_id,
                                     SubtaskOutcome outcome) const;

  /// complete_subtask when the criteria pass, record_failed_attempt otherwise.
  SubmitResult submit_subtask(SessionState s, std::string_view subtask_id,
                              SubtaskOutcome outcome) const;

  /// Status Available only, in global topological-then-declaration order.
  std::vector<std::string> available_subtasks(const SessionState& s) const;

  bool task_complete(const SessionState& s, std::string_view task_id) const;
  bool all_complete(const SessionState& s) const;

  const SubtaskDef& subtask(std::string_view subtask_id) const;

 private:
  void unlock_ready(SessionState& s) const;
  bool dependencies_complete(const SessionState& s, std::string_view subtask_id) const;

  std::shared_ptr<const ContentPack> pack_;
  std::vector<std::string> order_;
};

}  // namespace srl
