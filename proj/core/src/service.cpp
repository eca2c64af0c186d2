#include "srl/service.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "srl/error.hpp"
#include "srl/json_reader.hpp"
#include "srl/quiz.hpp"
#include "srl/text.hpp"
#include "srl/view.hpp"

namespace srl {

namespace fs = std::filesystem;
using nlohmann::json;

struct SessionService::Session {
  std::string id;
  std::shared_ptr<const TaskEngine> engine;
  mutable std::shared_mutex mu;
  SessionState state;
  std::vector<SessionEvent> log;
  std::size_t since_snapshot = 0;
};

ServiceConfig load_service_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  ObjectReader r(j, "config", ErrorCode::ConfigError);
  ServiceConfig cfg;
  cfg.pack_dir = resolve(r.str("pack_dir"));
  cfg.instrument_dir = resolve(r.str("instrument_dir"));
  if (r.optional("data_dir")) cfg.options.data_dir = resolve(r.str("data_dir"));
  if (r.optional("host")) cfg.host = r.str("host");
  if (r.optional("port")) cfg.port = static_cast<int>(r.integer("port"));
  if (r.optional("snapshot_every")) cfg.options.snapshot_every = static_cast<std::size_t>(r.integer("snapshot_every"));
  if (r.optional("ticker_seconds")) cfg.options.ticker_seconds = r.integer("ticker_seconds");
  cfg.gateway = config_from_env();
  if (const auto* g = r.optional("gateway")) cfg.gateway = config_from_json(*g, cfg.gateway);
  r.finish();
  if (cfg.port <= 0 || cfg.port > 65535) raise(ErrorCode::ConfigError, "port out of range");
  if (cfg.options.ticker_seconds < 0) raise(ErrorCode::ConfigError, "ticker_seconds must be non-negative");
  validate_config(cfg.gateway);
  return cfg;
}

std::map<std::string, std::shared_ptr<const ContentPack>> load_packs(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) raise(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::map<std::string, std::shared_ptr<const ContentPack>> out;
  for (const auto& f : files) {
    auto pack = std::make_shared<const ContentPack>(load_pack(f));
    const auto id = pack->pack_id;
    if (!out.emplace(id, std::move(pack)).second) {
      raise(ErrorCode::SchemaError, "duplicate pack id '" + id + "' in " + f.string());
    }
  }
  return out;
}

SessionService::SessionService(std::map<std::string, std::shared_ptr<const ContentPack>> packs,
                               std::map<std::string, Instrument> instruments,
                               std::shared_ptr<LlmGateway> gateway, ServiceOptions options)
    : packs_(std::move(packs)),
      instruments_(std::move(instruments)),
      gateway_(std::move(gateway)),
      options_(std::move(options)) {
  if (!gateway_) raise(ErrorCode::ConfigError, "a session service needs a gateway");
  for (const auto& [id, pack] : packs_) engines_[id] = std::make_shared<const TaskEngine>(pack);
  if (!options_.data_dir.empty()) {
    std::error_code ec;
    fs::create_directories(options_.data_dir / "sessions", ec);
    if (ec) raise(ErrorCode::IoError, "cannot create " + options_.data_dir.string() + ": " + ec.message());
  }
  if (options_.ticker_seconds > 0) {
    ticker_ = std::thread([this] {
      std::unique_lock lock(ticker_mu_);
      while (!ticker_cv_.wait_for(lock, std::chrono::seconds(options_.ticker_seconds), [this] { return stopping_; })) {
        lock.unlock();
        tick_all(options_.ticker_seconds);
        lock.lock();
      }
    });
  }
}

SessionService::~SessionService() {
  {
    std::lock_guard lock(ticker_mu_);
    stopping_ = true;
  }
  ticker_cv_.notify_all();
  if (ticker_.joinable()) ticker_.join();
}

std::unique_ptr<SessionService> SessionService::from_config(const ServiceConfig& cfg) {
  std::shared_ptr<LlmGateway> gw = make_gateway(cfg.gateway);
  auto svc = std::make_unique<SessionService>(load_packs(cfg.pack_dir), load_instruments(cfg.instrument_dir),
                                              std::move(gw), cfg.options);
  svc->recover();
  return svc;
}

const ContentPack& SessionService::pack(const std::string& pack_id) const {
  auto it = packs_.find(pack_id);
  if (it == packs_.end()) raise(ErrorCode::UnknownPack, "unknown pack '" + pack_id + "'");
  return *it->second;
}

std::string SessionService::new_id() {
  if (options_.id_generator) return options_.id_generator();
  std::lock_guard lock(id_mu_);
  if (id_state_ == 0) {
    std::random_device rd;
    id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::mt19937_64 rng(id_state_++);
  auto v = rng();
  std::string id(16, '0');
  for (auto& c : id) {
    c = hex[v & 0xf];
    v >>= 4;
  }
  return id;
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) raise(ErrorCode::UnknownSession, "unknown session '" + id + "'");
  return it->second;
}

void SessionService::persist(Session& s, const std::vector<SessionEvent>& fresh) {
  if (options_.data_dir.empty()) return;
  const auto path = options_.data_dir / "sessions" / (s.id + ".jsonl");
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << events_to_jsonl(fresh);
  out.flush();
  if (!out) raise(ErrorCode::IoError, "cannot append to " + path.string());
}

void SessionService::commit(Session& s, std::vector<Draft> drafts) {
  SessionState next = s.state;
  std::vector<SessionEvent> fresh;
  for (auto& d : drafts) {
    SessionEvent ev;
    ev.event_seq = (s.log.empty() && fresh.empty()) ? 0 : next.event_seq + 1;
    ev.session_id = s.id;
    ev.kind = d.kind;
    ev.payload = std::move(d.payload);
    ev.timestamp = ev.event_seq == 0 ? 0 : next.clock;
    if (ev.kind == EventKind::TimeTicked) ev.timestamp += ev.payload.at("seconds").get<std::int64_t>();
    next = apply_event(*s.engine, std::move(next), ev);
    fresh.push_back(std::move(ev));
  }
  persist(s, fresh);
  s.since_snapshot += fresh.size();
  s.log.insert(s.log.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
  s.state = std::move(next);
  if (!options_.data_dir.empty() && options_.snapshot_every > 0 && s.since_snapshot >= options_.snapshot_every) {
    const auto dir = options_.data_dir / "sessions";
    const auto tmp = dir / (s.id + ".snapshot.json.tmp");
    {
      std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
      out << state_to_json(s.state).dump();
      if (!out) return;  // the log stays authoritative
    }
    std::error_code ec;
    fs::rename(tmp, dir / (s.id + ".snapshot.json"), ec);
    if (!ec) s.since_snapshot = 0;
  }
}

std::string SessionService::open_session(const std::string& pack_id, Condition condition) {
  pack(pack_id);
  auto session = std::make_shared<Session>();
  session->engine = engines_.at(pack_id);
  std::unique_lock lock(sessions_mu_);
  for (int tries = 0;; ++tries) {
    session->id = new_id();
    if (!sessions_.count(session->id)) break;
    if (tries > 16) raise(ErrorCode::InvalidArgument, "session id '" + session->id + "' already exists");
  }
  commit(*session, {{EventKind::SessionStarted,
                     json{{"pack_id", pack_id}, {"condition", std::string(to_string(condition))}}}});
  sessions_.emplace(session->id, session);
  return session->id;
}

json SessionService::view(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->mu);
  return build_view(*s->engine, s->state);
}

SessionState SessionService::state(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->mu);
  return s->state;
}

std::vector<SessionEvent> SessionService::events(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->mu);
  return s->log;
}

std::string SessionService::export_events(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->mu);
  return events_to_jsonl(s->log);
}

std::vector<std::string> SessionService::session_ids() const {
  std::shared_lock lock(sessions_mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

json SessionService::advance(const std::string& id) {
  auto s = find(id);
  std::unique_lock lock(s->mu);
  const auto from = s->state.stage;
  const auto to = s->engine->next_stage(s->state);
  commit(*s, {{EventKind::StageAdvanced,
               json{{"from", std::string(to_string(from))},
                    {"to", to ? json(std::string(to_string(*to))) : json(nullptr)}}}});
  return json{{"stage", std::string(to_string(s->state.stage))}, {"event_seq", s->state.event_seq}};
}

json SessionService::plan_request(const std::string& id) {
  return chat(id, json{{"kind", "plan_request"}});
}

json SessionService::record_plan(const std::string& id, const json& body) {
  auto s = find(id);
  std::unique_lock lock(s->mu);
  const auto& pk = s->engine->pack();
  ObjectReader r(body, "plan", ErrorCode::InvalidPayload);
  LearningPlan plan;
  plan.ordering = r.strings("ordering");
  if (const auto* alloc = r.optional("time_allocations")) {
    if (!alloc->is_object()) r.fail("time_allocations", "must be an object of minutes");
    for (const auto& [k, v] : alloc->items()) {
      if (!v.is_number_integer()) r.fail("time_allocations", k + " must be an integer");
      plan.time_allocations[k] = v.get<std::int64_t>();
    }
  } else {
    for (const auto& sid : plan.ordering) {
      if (const auto* sub = pk.find_subtask(sid)) plan.time_allocations[sid] = sub->estimated_minutes;
    }
  }
  plan.strategy_note = r.str_or("strategy_note", "");
  r.finish();
  const auto& sug = s->state.suggested_plan;
  plan.source = sug && sug->ordering == plan.ordering && sug->time_allocations == plan.time_allocations
                    ? PlanSource::AgentSuggested
                    : PlanSource::LearnerEdited;
  commit(*s, {{EventKind::PlanRecorded, json{{"plan", plan_to_json(plan)}}}});
  return json{{"plan", plan_to_json(*s->state.plan)}, {"event_seq", s->state.event_seq}};
}

json SessionService::start_subtask(const std::string& id, const std::string& subtask_id) {
  auto s = find(id);
  std::unique_lock lock(s->mu);
  s->engine->subtask(subtask_id);
  if (s->state.status(subtask_id) != SubtaskStatus::InProgress) {
    commit(*s, {{EventKind::SubtaskStarted, json{{"subtask_id", subtask_id}}}});
  }
  return json{{"subtask_id", subtask_id},
              {"status", std::string(to_string(s->state.status(subtask_id)))},
              {"content", subtask_content(s->engine->pack(), s->engine->subtask(subtask_id))}};
}

namespace {

std::size_t user_turns(const SessionState& st, const std::string& channel) {
  auto it = st.transcripts.find(channel);
  if (it == st.transcripts.end()) return 0;
  return static_cast<std::size_t>(std::count_if(it->second.begin(), it->second.end(),
                                                [](const ChatTurn& t) { return t.role == ChatTurn::Role::User; }));
}

const json* answer_for(const json& answers, const QuestionDef& q, std::size_t index) {
  if (answers.is_object()) {
    auto it = answers.find(q.id);
    return it == answers.end() ? nullptr : &*it;
  }
  if (answers.is_array() && index < answers.size()) return &answers[index];
  return nullptr;
}

bool srl_on(const SessionState& st, const ContentPack& pk) {
  return st.condition == Condition::FullSrl && pk.enhancement.srl_enabled;
}

}  // namespace

json SessionService::submit_subtask(const std::string& id, const std::string& subtask_id, const json& body) {
  auto s = find(id);
  std::unique_lock lock(s->mu);
  const auto& pk = s->engine->pack();
  const auto& sub = s->engine->subtask(subtask_id);
  if (!body.is_object()) raise(ErrorCode::InvalidPayload, "submission body must be an object");

  SubtaskOutcome outcome;
  outcome.subtask_id = sub.id;
  json answers_record = nullptr;
  json answers = nullptr;
  switch (sub.kind) {
    case SubtaskKind::Quiz: {
      auto it = body.find("answers");
      if (it == body.end()) raise(ErrorCode::InvalidPayload, "quiz submissions need answers");
      answers = *it;
      const auto questions = pk.quiz_questions(sub);
      std::int64_t correct = 0;
      answers_record = json::object();
      for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto* a = answer_for(answers, *questions[i], i);
        if (!a) raise(ErrorCode::InvalidPayload, "no answer for question '" + questions[i]->id + "'");
        const auto parsed = answer_from_json(*questions[i], *a);
        const bool ok = is_correct(*questions[i], parsed);
        correct += ok ? 1 : 0;
        answers_record[questions[i]->id] = {{"answer", answer_to_json(parsed)}, {"correct", ok}};
      }
      outcome.quality = {{"quiz_correct_count", static_cast<double>(correct)},
                         {"quiz_question_count", static_cast<double>(questions.size())}};
      break;
    }
    case SubtaskKind::Discussion:
      outcome.quality = {
          {"chat_turns", static_cast<double>(user_turns(s->state, channel_for(AgentKind::Chatting, sub.id)))}};
      break;
    default: {
      auto it = body.find("text");
      if (it == body.end() || !it->is_string()) raise(ErrorCode::InvalidPayload, "submission needs a text field");
      outcome.artifact_text = it->get<std::string>();
      outcome.quality = {{"word_count", static_cast<double>(word_count(*outcome.artifact_text))}};
      break;
    }
  }
  const bool passed = evaluate_completion(sub.completion, sub.kind, outcome);
  const auto before = s->engine->available_subtasks(s->state);

  json submitted{{"subtask_id", sub.id}, {"passed", passed}, {"outcome", outcome_to_json(outcome)}};
  if (!answers_record.is_null()) submitted["answers"] = answers_record;
  std::vector<Draft> drafts{{EventKind::SubtaskSubmitted, std::move(submitted)}};
  if (passed) drafts.push_back({EventKind::SubtaskCompleted, json{{"subtask_id", sub.id}, {"outcome", outcome_to_json(outcome)}}});
  commit(*s, std::move(drafts));

  json res{{"subtask_id", sub.id},
           {"completed", passed},
           {"status", std::string(to_string(s->state.status(sub.id)))},
           {"attempts", s->state.outcomes.at(sub.id).attempts},
           {"quality", outcome.quality}};
  json unlocked = json::array();
  for (const auto& a : s->engine->available_subtasks(s->state)) {
    if (std::find(before.begin(), before.end(), a) == before.end()) unlocked.push_back(a);
  }
  res["unlocked"] = std::move(unlocked);
  if (!answers_record.is_null()) res["answers"] = answers_record;

  if (!passed && sub.kind == SubtaskKind::Quiz && srl_on(s->state, pk) &&
      pk.enhancement.quiz_hint_policy == HintPolicy::OnIncorrect) {
    try {
      if (auto hint = auto_hint(*s, sub, answers)) res["hint"] = *hint;
    } catch (const Error& e) {
      res["hint_error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
  }
  return res;
}

std::optional<std::string> SessionService::auto_hint(Session& s, const SubtaskDef& sub, const json& answers) {
  const auto& pk = s.engine->pack();
  const auto questions = pk.quiz_questions(sub);
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto parsed = answer_from_json(*questions[i], *answer_for(answers, *questions[i], i));
    if (is_correct(*questions[i], parsed)) continue;
    json body{{"subtask_id", sub.id}, {"question_id", questions[i]->id}, {"answer", answer_to_json(parsed)}};
    return run_agent(s, InteractionKind::QuizHelp, body).at("reply").get<std::string>();
  }
  return std::nullopt;
}

json SessionService::chat(const std::string& id, const json& body) {
  auto s = find(id);
  if (!body.is_object()) raise(ErrorCode::InvalidPayload, "chat body must be an object");
  const auto kind_it = body.find("kind");
  if (kind_it == body.end() || !kind_it->is_string()) raise(ErrorCode::InvalidPayload, "chat body needs a kind");
  const auto kind = interaction_kind_from(kind_it->get<std::string>());
  if (!kind) raise(ErrorCode::InvalidPayload, "unknown interaction kind " + kind_it->dump());
  std::unique_lock lock(s->mu);
  return run_agent(*s, *kind, body);
}

namespace {

std::string body_str(const json& body, const char* key, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) raise(ErrorCode::InvalidPayload, std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) raise(ErrorCode::InvalidPayload, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

void require_kind(const SubtaskDef& sub, std::initializer_list<SubtaskKind> kinds, InteractionKind interaction) {
  if (std::find(kinds.begin(), kinds.end(), sub.kind) == kinds.end()) {
    raise(ErrorCode::InvalidPayload, std::string(to_string(interaction)) + " does not apply to " +
                                         std::string(to_string(sub.kind)) + " subtask '" + sub.id + "'");
  }
}

}  // namespace

json SessionService::run_agent(Session& s, InteractionKind interaction, const json& body) {
  const auto& pk = s.engine->pack();
  const auto agent = select_agent(s.state, interaction, pk.enhancement);
  AgentContext ctx;
  std::string user_turn;
  std::optional<std::string> sid;

  if (interaction == InteractionKind::PlanRequest) {
    ctx = planning_context(pk, s.state);
    user_turn = "Requested a task plan.";
  } else if (interaction == InteractionKind::ReflectionRequest) {
    ctx = reflection_context(pk, s.state);
    user_turn = "Requested a learning reflection.";
  } else {
    sid = body_str(body, "subtask_id", true);
    const auto& sub = s.engine->subtask(*sid);
    if (s.state.status(sub.id) == SubtaskStatus::Locked) {
      raise(ErrorCode::NotAvailableError, "subtask '" + sub.id + "' is locked");
    }
    switch (interaction) {
      case InteractionKind::DiscussionMessage: {
        require_kind(sub, {SubtaskKind::Discussion}, interaction);
        const auto message = body_str(body, "message", true);
        if (trim(message).empty()) raise(ErrorCode::InvalidPayload, "message is empty");
        const auto* persona = pk.find_persona(sub.content_ref);
        ctx = chatting_context(*persona, s.state, sub.id, message);
        user_turn = message;
        break;
      }
      case InteractionKind::PaperHelp: {
        require_kind(sub, {SubtaskKind::Paper, SubtaskKind::Review}, interaction);
        const auto* doc = pk.find_paper(sub.content_ref);
        PaperHelpInput in;
        in.question = body_str(body, "question", false);
        if (in.question.empty()) in.question = doc->question;
        in.summary = body_str(body, "summary", false);
        in.paper_content = doc->content;
        ctx = paper_review_context(s.state, sub.id, in);
        user_turn = "Asked for help reviewing " + doc->title + ".";
        break;
      }
      case InteractionKind::WritingHelp: {
        require_kind(sub, {SubtaskKind::WritingGoal, SubtaskKind::Report}, interaction);
        const auto* doc = pk.find_paper(sub.content_ref);
        WritingHelpInput in;
        in.title = body_str(body, "title", false);
        in.body = body_str(body, "body", false);
        in.question = body_str(body, "question", false);
        if (in.question.empty()) in.question = doc->question;
        ctx = writing_context(pk, s.state, sub.id, in);
        user_turn = "Asked for writing guidance.";
        break;
      }
      case InteractionKind::QuizHelp: {
        require_kind(sub, {SubtaskKind::Quiz}, interaction);
        const auto qid = body_str(body, "question_id", true);
        const auto questions = pk.quiz_questions(sub);
        auto qit = std::find_if(questions.begin(), questions.end(), [&](const QuestionDef* q) { return q->id == qid; });
        if (qit == questions.end()) raise(ErrorCode::InvalidPayload, "question '" + qid + "' is not part of " + sub.id);
        auto ait = body.find("answer");
        if (ait == body.end()) raise(ErrorCode::InvalidPayload, "quiz help needs the learner's answer");
        ctx = quiz_context(s.state, **qit, answer_from_json(**qit, *ait), sub.id);
        user_turn = "Asked for a hint on question " + qid + ".";
        break;
      }
      default: break;
    }
  }

  const auto channel = channel_for(agent, sid);
  const auto bundle = assemble_prompt(agent, ctx, pk);
  Orchestrator orch(*gateway_);
  const auto res = orch.run(bundle, pk);

  json prompted{{"agent", std::string(to_string(agent))},
                {"interaction", std::string(to_string(interaction))},
                {"channel", channel},
                {"user_turn", user_turn},
                {"prompt", {{"system", bundle.system_text}, {"user", bundle.user_text}}}};
  json replied{{"agent", std::string(to_string(agent))},
               {"channel", channel},
               {"text", res.reply.budgeted_text},
               {"raw_text", res.reply.raw_text},
               {"word_count", res.reply.word_count},
               {"reasked", res.reasked},
               {"truncated", res.truncated},
               {"gateway_calls", res.gateway_calls}};
  json out{{"agent", std::string(to_string(agent))},
           {"channel", channel},
           {"reply", res.reply.budgeted_text},
           {"word_count", res.reply.word_count}};
  if (agent == AgentKind::Planning) {
    std::map<std::string, std::int64_t> minutes;
    for (const auto& id : *res.reply.structured) minutes[id] = pk.find_subtask(id)->estimated_minutes;
    replied["ordering"] = *res.reply.structured;
    replied["time_allocations"] = minutes;
    replied["parse_error"] = res.parse_error ? json(*res.parse_error) : json(nullptr);
    replied["fallback"] = res.fallback;
    out["ordering"] = *res.reply.structured;
    out["time_allocations"] = minutes;
    out["fallback"] = res.fallback;
  }
  commit(s, {{EventKind::AgentPrompted, std::move(prompted)}, {EventKind::AgentReplied, std::move(replied)}});
  out["event_seq"] = s.state.event_seq;
  return out;
}

json SessionService::tick(const std::string& id, const json& body) {
  auto s = find(id);
  if (!body.is_object()) raise(ErrorCode::InvalidPayload, "tick body must be an object");
  auto it = body.find("seconds");
  if (it == body.end() || !it->is_number_integer()) raise(ErrorCode::InvalidPayload, "tick needs integer seconds");
  const auto seconds = it->get<std::int64_t>();
  if (seconds <= 0) raise(ErrorCode::InvalidArgument, "elapsed seconds must be positive");
  json payload{{"seconds", seconds}};
  const auto sid = body_str(body, "subtask_id", false);
  payload["subtask_id"] = sid.empty() ? json(nullptr) : json(sid);
  std::unique_lock lock(s->mu);
  commit(*s, {{EventKind::TimeTicked, std::move(payload)}});
  return json{{"clock", s->state.clock}, {"event_seq", s->state.event_seq}};
}

ScoreReport SessionService::score_assessment(const std::string& instrument_id, ResponseSheet sheet,
                                             const std::optional<std::string>& session_id) {
  auto it = instruments_.find(instrument_id);
  if (it == instruments_.end()) raise(ErrorCode::UnknownInstrument, "unknown instrument '" + instrument_id + "'");
  if (sheet.instrument_id.empty()) sheet.instrument_id = instrument_id;
  if (session_id && sheet.respondent_id.empty()) sheet.respondent_id = *session_id;
  auto report = score(it->second, sheet);
  if (session_id) {
    auto s = find(*session_id);
    std::unique_lock lock(s->mu);
    commit(*s, {{EventKind::AssessmentScored, json{{"report", report_to_json(report)}}}});
  }
  return report;
}

std::size_t SessionService::recover() {
  if (options_.data_dir.empty()) return 0;
  const auto dir = options_.data_dir / "sessions";
  std::vector<fs::path> logs;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".jsonl") logs.push_back(entry.path());
  }
  if (ec) raise(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(logs.begin(), logs.end());
  std::size_t loaded = 0;
  for (const auto& path : logs) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    auto events = events_from_jsonl(buf.str());
    if (events.empty()) continue;
    const auto& first = events.front();
    if (first.kind != EventKind::SessionStarted) {
      raise(ErrorCode::ReplayError, path.string() + " does not begin with SessionStarted");
    }
    const auto pack_id = first.payload.at("pack_id").get<std::string>();
    auto session = std::make_shared<Session>();
    session->id = first.session_id;
    session->engine = engines_.count(pack_id) ? engines_.at(pack_id) : nullptr;
    if (!session->engine) raise(ErrorCode::UnknownPack, path.string() + " uses unknown pack '" + pack_id + "'");

    const auto snap_path = dir / (session->id + ".snapshot.json");
    std::optional<SessionState> snapshot;
    if (fs::exists(snap_path)) {
      try {
        std::ifstream sin(snap_path);
        auto snap = state_from_json(json::parse(sin));
        if (snap.session_id == session->id && snap.event_seq <= events.back().event_seq) snapshot = std::move(snap);
      } catch (const std::exception&) {
        snapshot.reset();  // a damaged snapshot falls back to a full replay
      }
    }
    session->state = snapshot ? replay_from(*session->engine, *snapshot, events) : replay(*session->engine, events);
    session->since_snapshot = snapshot ? events.back().event_seq - snapshot->event_seq : events.size();
    session->log = std::move(events);
    std::unique_lock lock(sessions_mu_);
    sessions_[session->id] = std::move(session);
    ++loaded;
  }
  return loaded;
}

void SessionService::tick_all(std::int64_t seconds) {
  for (const auto& id : session_ids()) {
    auto s = find(id);
    std::unique_lock lock(s->mu);
    if (s->state.stage != TaskStage::TaskProcess) continue;
    std::vector<std::string> active;
    for (const auto& [sid, st] : s->state.subtask_status) {
      if (st == SubtaskStatus::InProgress) active.push_back(sid);
    }
    json payload{{"seconds", seconds}, {"subtask_id", active.size() == 1 ? json(active.front()) : json(nullptr)}};
    try {
      commit(*s, {{EventKind::TimeTicked, std::move(payload)}});
    } catch (const Error&) {
      // a failed tick leaves the session unchanged
    }
  }
}

}  // namespace srl
