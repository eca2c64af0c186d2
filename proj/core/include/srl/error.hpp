#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srl {

enum class ErrorCode {
  // content-store
  ParseError,
  SchemaError,
  DanglingRef,
  CycleError,
  UnknownTask,
  // task-engine
  StageGateError,
  TerminalError,
  NotAvailableError,
  CriteriaError,
  IncompatibleRule,
  UnknownSubtask,
  // srl-layer
  PhaseError,
  InvalidOrdering,
  InvalidPlan,
  NotActiveError,
  // agent-orchestrator
  FeatureDisabled,
  PhaseMismatch,
  MissingPlaceholder,
  NoTemplate,
  MissingTags,
  NotPermutation,
  CorrectAnswerError,
  // llm-gateway
  TimeoutError,
  AuthError,
  RateLimitError,
  MalformedResponse,
  UpstreamError,
  ConfigError,
  // assessment
  LengthMismatch,
  OutOfRange,
  UnmappedItem,
  WrongInstrument,
  // session-service
  UnknownSession,
  UnknownPack,
  UnknownInstrument,
  InvalidPayload,
  ReplayError,
  IoError,
  // sim-harness
  ScriptError,
  EmptyGroup,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code; the
/// HTTP layer maps codes to statuses with http_status().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

int http_status(ErrorCode code) noexcept;

}  // namespace srl
