#include "srl/error.hpp"

namespace srl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DanglingRef: return "DanglingRef";
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::StageGateError: return "StageGateError";
    case ErrorCode::TerminalError: return "TerminalError";
    case ErrorCode::NotAvailableError: return "NotAvailableError";
    case ErrorCode::CriteriaError: return "CriteriaError";
    case ErrorCode::IncompatibleRule: return "IncompatibleRule";
    case ErrorCode::UnknownSubtask: return "UnknownSubtask";
    case ErrorCode::PhaseError: return "PhaseError";
    case ErrorCode::InvalidOrdering: return "InvalidOrdering";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::NotActiveError: return "NotActiveError";
    case ErrorCode::FeatureDisabled: return "FeatureDisabled";
    case ErrorCode::PhaseMismatch: return "PhaseMismatch";
    case ErrorCode::MissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::NoTemplate: return "NoTemplate";
    case ErrorCode::MissingTags: return "MissingTags";
    case ErrorCode::NotPermutation: return "NotPermutation";
    case ErrorCode::CorrectAnswerError: return "CorrectAnswerError";
    case ErrorCode::TimeoutError: return "TimeoutError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RateLimitError: return "RateLimitError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::UpstreamError: return "UpstreamError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnmappedItem: return "UnmappedItem";
    case ErrorCode::WrongInstrument: return "WrongInstrument";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownPack: return "UnknownPack";
    case ErrorCode::UnknownInstrument: return "UnknownInstrument";
    case ErrorCode::InvalidPayload: return "InvalidPayload";
    case ErrorCode::ReplayError: return "ReplayError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ScriptError: return "ScriptError";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownPack:
    case ErrorCode::UnknownInstrument:
    case ErrorCode::UnknownTask:
    case ErrorCode::UnknownSubtask:
      return 404;
    case ErrorCode::StageGateError:
    case ErrorCode::TerminalError:
    case ErrorCode::NotAvailableError:
    case ErrorCode::CriteriaError:
    case ErrorCode::PhaseError:
    case ErrorCode::NotActiveError:
    case ErrorCode::FeatureDisabled:
    case ErrorCode::PhaseMismatch:
    case ErrorCode::CorrectAnswerError:
      return 409;
    case ErrorCode::TimeoutError:
    case ErrorCode::AuthError:
    case ErrorCode::RateLimitError:
    case ErrorCode::MalformedResponse:
    case ErrorCode::UpstreamError:
      return 502;
    case ErrorCode::IoError:
    case ErrorCode::ReplayError:
    case ErrorCode::NoTemplate:
    case ErrorCode::MissingPlaceholder:
    case ErrorCode::ConfigError:
      return 500;
    default:
      return 422;
  }
}

}  // namespace srl
