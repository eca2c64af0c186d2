#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "srl/assessment.hpp"
#include "srl/content.hpp"
#include "srl/engine.hpp"
#include "srl/events.hpp"
#include "srl/gateway.hpp"
#include "srl/orchestrator.hpp"
#include "srl/state.hpp"

namespace srl {

struct ServiceOptions {
  /// Where <session>.jsonl logs and snapshots live; empty keeps sessions in
  /// memory only.
  std::filesystem::path data_dir;
  /// Write a snapshot after this many events (0 disables snapshots).
  std::size_t snapshot_every = 50;
  /// Period of the server-side ticker in seconds; 0 leaves it off.
  std::int64_t ticker_seconds = 0;
  /// Session id source; random 16-hex-digit ids when unset.
  std::function<std::string()> id_generator;
};

struct ServiceConfig {
  std::filesystem::path pack_dir;
  std::filesystem::path instrument_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  ProviderConfig gateway;
  ServiceOptions options;
};

/// Reads a JSON config file. Relative paths resolve against the file's
/// directory; gateway settings start from the environment and are then
/// overlaid by the file's "gateway" object.
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Every *.json pack in a directory, keyed by pack_id.
std::map<std::string, std::shared_ptr<const ContentPack>> load_packs(const std::filesystem::path& dir);

/// Session lifecycle over event-sourced state. Each session has a
/// reader/writer lock: interactions are applied one at a time in event_seq
/// order, while views and exports read a consistent snapshot.
class SessionService {
 public:
  SessionService(std::map<std::string, std::shared_ptr<const ContentPack>> packs,
                 std::map<std::string, Instrument> instruments, std::shared_ptr<LlmGateway> gateway,
                 ServiceOptions options = {});
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  static std::unique_ptr<SessionService> from_config(const ServiceConfig& cfg);

  std::string open_session(const std::string& pack_id, Condition condition);

  nlohmann::json view(const std::string& id) const;
  SessionState state(const std::string& id) const;
  std::vector<SessionEvent> events(const std::string& id) const;
  std::string export_events(const std::string& id) const;
  std::vector<std::string> session_ids() const;

  nlohmann::json advance(const std::string& id);
  /// Asks the planning agent for an ordering; falls back to the topological
  /// order when its reply cannot be parsed.
  nlohmann::json plan_request(const std::string& id);
  /// Body: {"ordering": [...], "time_allocations"?: {...}, "strategy_note"?: "..."}.
  nlohmann::json record_plan(const std::string& id, const nlohmann::json& body);
  nlohmann::json start_subtask(const std::string& id, const std::string& subtask_id);
  /// Quiz: {"answers": {question_id: answer}}; Discussion: {}; others:
  /// {"text": "..."}. Quality indicators are computed here, not taken from
  /// the client.
  nlohmann::json submit_subtask(const std::string& id, const std::string& subtask_id,
                                const nlohmann::json& body);
  /// Body carries "kind" (an interaction kind) plus kind-specific fields.
  nlohmann::json chat(const std::string& id, const nlohmann::json& body);
  /// Body: {"seconds": n, "subtask_id"?: "..."}.
  nlohmann::json tick(const std::string& id, const nlohmann::json& body);

  ScoreReport score_assessment(const std::string& instrument_id, ResponseSheet sheet,
                               const std::optional<std::string>& session_id = std::nullopt);

  /// Reloads every session log under data_dir; returns how many were loaded.
  std::size_t recover();

  /// One ticker round: advances the clock of every TaskProcess session.
  void tick_all(std::int64_t seconds);

  const ContentPack& pack(const std::string& pack_id) const;
  const std::map<std::string, Instrument>& instruments() const noexcept { return instruments_; }

 private:
  struct Session;
  struct Draft {
    EventKind kind;
    nlohmann::json payload;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  void commit(Session& s, std::vector<Draft> drafts);
  void persist(Session& s, const std::vector<SessionEvent>& fresh);
  std::string new_id();

  nlohmann::json run_agent(Session& s, InteractionKind interaction, const nlohmann::json& body);
  std::optional<std::string> auto_hint(Session& s, const SubtaskDef& sub, const nlohmann::json& answers);

  std::map<std::string, std::shared_ptr<const ContentPack>> packs_;
  std::map<std::string, std::shared_ptr<const TaskEngine>> engines_;
  std::map<std::string, Instrument> instruments_;
  std::shared_ptr<LlmGateway> gateway_;
  ServiceOptions options_;

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mu_;
  std::uint64_t id_state_ = 0;

  std::mutex ticker_mu_;
  std::condition_variable ticker_cv_;
  bool stopping_ = false;
  std::thread ticker_;
};

}  // namespace srl
