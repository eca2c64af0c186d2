#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srl/api_router.hpp"
#include "srl/assessment.hpp"
#include "srl/content.hpp"
#include "srl/events.hpp"
#include "srl/state.hpp"

namespace srl {

/// One scripted step. `op` is the script's "do" value; `args` keeps the
/// remaining fields.
struct ScriptAction {
  std::string op;
  nlohmann::json args = nlohmann::json::object();
};

struct LearnerScript {
  std::string script_id;
  Condition condition = Condition::FullSrl;
  std::int64_t seed = 0;
  std::vector<ScriptAction> actions;
};

LearnerScript script_from_json(const nlohmann::json& j);
LearnerScript load_script(const std::filesystem::path& path);

/// Throws ScriptError for unknown operations, SRL-only operations in a NoSrl
/// script, and references to subtasks or questions the pack lacks.
void validate_script(const LearnerScript& script, const ContentPack& pack);

struct SessionReport {
  std::string session_id;
  std::string script_id;
  Condition condition = Condition::FullSrl;
  std::int64_t seed = 0;
  std::string final_stage;
  double completion_rate = 0.0;
  std::int64_t total_seconds = 0;
  std::map<std::string, std::int64_t> subtask_seconds;
  std::map<std::string, std::int64_t> agent_invocations;  // every AgentKind, zero when unused
  std::vector<ScoreReport> assessments;

  bool operator==(const SessionReport&) const = default;
};

nlohmann::json session_report_to_json(const SessionReport& r);
SessionReport session_report_from_json(const nlohmann::json& j);

/// Metrics recomputed from nothing but an exported log.
SessionReport report_from_events(const ContentPack& pack, const std::vector<SessionEvent>& events);

/// Issues API calls for the harness, either in-process or over HTTP.
class SessionDriver {
 public:
  virtual ~SessionDriver() = default;
  virtual ApiResponse call(const std::string& method, const std::string& path, const nlohmann::json& body) = 0;
};

class InProcessDriver final : public SessionDriver {
 public:
  explicit InProcessDriver(SessionService& service) : router_(service) {}
  ApiResponse call(const std::string& method, const std::string& path, const nlohmann::json& body) override;

 private:
  ApiRouter router_;
};

class HttpDriver final : public SessionDriver {
 public:
  explicit HttpDriver(std::string base_url, double timeout_seconds = 30.0);
  ApiResponse call(const std::string& method, const std::string& path, const nlohmann::json& body) override;

 private:
  std::string base_url_;
  double timeout_seconds_;
};

struct RunResult {
  SessionReport report;
  std::string events_jsonl;
  /// Embedded invariant checks that failed; empty on a clean run.
  std::vector<std::string> check_failures;

  bool ok() const noexcept { return check_failures.empty(); }
};

/// Runs a script through `driver`. Quiz answers marked incorrect are
/// sampled from an rng seeded with `seed`. Once every subtask is complete
/// the session is moved on to Review. Throws ScriptError, naming the
/// action index, when an action is rejected.
RunResult run_script(const LearnerScript& script, const ContentPack& pack, std::int64_t seed,
                     SessionDriver& driver);

/// In-process run against a fresh service with the mock gateway seeded by
/// `seed` and session ids "sess-<seed>-<n>".
RunResult run_script(const LearnerScript& script, std::shared_ptr<const ContentPack> pack, std::int64_t seed,
                     const std::map<std::string, Instrument>& instruments);

struct MetricSummary {
  Condition condition = Condition::FullSrl;
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 when n == 1.
  double sd = 0.0;
};

/// Per-condition mean and SD of completion_rate, total_seconds and each
/// instrument's overall score. Throws EmptyGroup unless both conditions
/// have at least one report.
std::vector<MetricSummary> compare_conditions(const std::vector<SessionReport>& reports);

std::string summary_csv(const std::vector<MetricSummary>& rows);

}  // namespace srl
