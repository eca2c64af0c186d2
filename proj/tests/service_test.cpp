#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "service_support.hpp"
#include "srl/api_router.hpp"
#include "srl/http_server.hpp"
#include "srl/text.hpp"
#include "srl/view.hpp"

using namespace srl;
using namespace srltest;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("srlkit-svc-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

class FailingGateway final : public LlmGateway {
 public:
  CompletionResult complete(const std::vector<ChatMessage>&) override {
    raise(ErrorCode::UpstreamError, "upstream unavailable");
  }
};

// Keys that would reveal an answer key if they leaked into a view.
void collect_keys(const json& j, std::set<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      out.insert(k);
      collect_keys(v, out);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_keys(v, out);
  }
}

const json& subtask_view(const json& view, const std::string& sid) {
  for (const auto& t : view.at("tasks")) {
    for (const auto& s : t.at("subtasks")) {
      if (s.at("id") == sid) return s;
    }
  }
  throw std::runtime_error("no subtask " + sid);
}

std::string to_task_process(SessionService& svc, Condition cond) {
  const auto id = svc.open_session("full-coverage", cond);
  svc.advance(id);
  if (cond == Condition::FullSrl) {
    svc.record_plan(id, json{{"ordering", global_order(svc.pack("full-coverage"))}});
    svc.advance(id);
  }
  return id;
}

}  // namespace

TEST_CASE("FullSrl session runs to review with a bounded reflection") {
  auto svc = make_service(5);
  const auto id = drive_full_session(*svc, Condition::FullSrl);
  const auto st = svc->state(id);
  CHECK(st.stage == TaskStage::Review);
  REQUIRE(st.reflection);
  CHECK(word_count(*st.reflection) <= 30);
  CHECK(word_count(*st.reflection) > 0);
  REQUIRE(st.plan);
  const auto v = svc->view(id);
  CHECK(v.at("reflection") == *st.reflection);
  CHECK(v.at("can_advance") == false);
  CHECK(v.at("next_stage").is_null());
  CHECK(v.at("monitor").at("completion_rate") == 1.0);
  CHECK(v.contains("time_budget"));
  CHECK(v.at("transcripts").contains(channel_for(AgentKind::Reflection, std::nullopt)));

  std::set<std::string> agents;
  for (const auto& e : svc->events(id)) {
    if (e.kind == EventKind::AgentReplied) agents.insert(e.payload.at("agent").get<std::string>());
  }
  for (auto a : {AgentKind::Planning, AgentKind::QuizTutor, AgentKind::PaperReview, AgentKind::Chatting, AgentKind::Writing, AgentKind::Reflection}) {
    CHECK_MESSAGE(agents.count(std::string(to_string(a))) == 1, to_string(a));
  }
}

TEST_CASE("NoSrl sessions skip planning and refuse SRL agents") {
  auto svc = make_service(5);
  const auto id = svc->open_session("full-coverage", Condition::NoSrl);
  CHECK(svc->advance(id).at("stage") == "task_process");
  const auto v = svc->view(id);
  for (const char* k : {"plan", "suggested_plan", "time_budget", "reflection"}) CHECK_FALSE(v.contains(k));

  CHECK(error_of([&] { svc->plan_request(id); }) == ErrorCode::FeatureDisabled);
  CHECK(error_of([&] { svc->chat(id, json{{"kind", "paper_help"}, {"subtask_id", "P1"}}); }) ==
        ErrorCode::FeatureDisabled);
  CHECK(error_of([&] { svc->chat(id, json{{"kind", "writing_help"}, {"subtask_id", "W1"}}); }) ==
        ErrorCode::FeatureDisabled);
  CHECK(error_of([&] {
          svc->chat(id, json{{"kind", "quiz_help"}, {"subtask_id", "Q1"}, {"question_id", "QT1"}, {"answer", true}});
        }) == ErrorCode::FeatureDisabled);
  CHECK(error_of([&] { svc->chat(id, json{{"kind", "reflection_request"}}); }) == ErrorCode::FeatureDisabled);

  const auto full = drive_full_session(*svc, Condition::NoSrl);
  for (const auto& e : svc->events(full)) {
    if (e.kind == EventKind::AgentReplied) CHECK(e.payload.at("agent") == "chatting");
    if (e.kind == EventKind::StageAdvanced) CHECK(e.payload.at("to") != "planning");
  }
  CHECK(svc->state(full).stage == TaskStage::Review);
  CHECK_FALSE(svc->state(full).reflection);
}

TEST_CASE("views never carry answer keys and hide locked content") {
  auto svc = make_service();
  const auto id = to_task_process(*svc, Condition::FullSrl);
  svc->start_subtask(id, "K1");
  svc->submit_subtask(id, "K1", json{{"text", "a summary"}});
  const auto v = svc->view(id);
  std::set<std::string> keys;
  collect_keys(v, keys);
  for (const char* k : {"correct", "truth", "pairs", "ordered_items", "answers"}) CHECK_MESSAGE(keys.count(k) == 0, k);

  const auto& q1 = subtask_view(v, "Q1");
  CHECK(q1.at("status") == "available");
  const auto& pack = svc->pack("full-coverage");
  for (const auto& q : q1.at("content").at("questions")) {
    const auto* def = pack.find_question(q.at("id").get<std::string>());
    REQUIRE(def);
    if (def->form == QuestionForm::Ordering) {
      auto sorted = def->ordered_items;
      std::sort(sorted.begin(), sorted.end());
      CHECK(q.at("items") == sorted);
    }
    if (def->form == QuestionForm::Matching) {
      CHECK(std::is_sorted(q.at("right").begin(), q.at("right").end()));
    }
  }

  const auto& rp1 = subtask_view(v, "RP1");
  CHECK(rp1.at("status") == "locked");
  CHECK_FALSE(rp1.contains("content"));
  CHECK(rp1.contains("title"));
  CHECK(error_of([&] { svc->start_subtask(id, "RP1"); }) == ErrorCode::NotAvailableError);
  CHECK(error_of([&] { svc->chat(id, json{{"kind", "writing_help"}, {"subtask_id", "RP1"}}); }) ==
        ErrorCode::NotAvailableError);
  CHECK(error_of([&] { svc->chat(id, json{{"kind", "writing_help"}, {"subtask_id", "K1"}}); }) ==
        ErrorCode::InvalidPayload);
}

TEST_CASE("submit responses and automatic quiz hints") {
  auto svc = make_service(9);
  const auto& pack = svc->pack("full-coverage");
  const auto& quiz = *pack.find_subtask("Q1");
  const auto id = to_task_process(*svc, Condition::FullSrl);
  svc->start_subtask(id, "K1");
  const auto k = svc->submit_subtask(id, "K1", json{{"text", "a short summary"}});
  CHECK(k.at("completed") == true);
  CHECK(k.at("status") == "complete");
  CHECK(k.at("attempts") == 1);
  CHECK(k.at("quality").at("word_count") == 3.0);
  CHECK(k.at("unlocked") == json::array({"Q1"}));

  svc->start_subtask(id, "Q1");
  const auto wrong = svc->submit_subtask(id, "Q1", json{{"answers", quiz_answers(pack, quiz, false)}});
  CHECK(wrong.at("completed") == false);
  CHECK(wrong.at("status") == "in_progress");
  CHECK(wrong.at("attempts") == 1);
  CHECK(wrong.at("quality").at("quiz_correct_count") == 0.0);
  REQUIRE(wrong.contains("hint"));
  CHECK(word_count(wrong.at("hint").get<std::string>()) <= 20);
  for (const auto& [qid, rec] : wrong.at("answers").items()) CHECK(rec.at("correct") == false);

  const auto right = svc->submit_subtask(id, "Q1", json{{"answers", quiz_answers(pack, quiz, true)}});
  CHECK(right.at("completed") == true);
  CHECK(right.at("attempts") == 2);
  CHECK_FALSE(right.contains("hint"));
  CHECK(right.at("unlocked") == json::array());
  CHECK(error_of([&] { svc->start_subtask(id, "Q1"); }) == ErrorCode::NotAvailableError);

  CHECK(error_of([&] { svc->submit_subtask(id, "R1", json{{"text", "early"}}); }) ==
        ErrorCode::NotAvailableError);
  svc->start_subtask(id, "P1");
  CHECK(error_of([&] { svc->submit_subtask(id, "P1", json::object()); }) == ErrorCode::InvalidPayload);
  CHECK(error_of([&] { svc->submit_subtask(id, "P1", json::array()); }) == ErrorCode::InvalidPayload);
  CHECK(error_of([&] { svc->submit_subtask(id, "ZZ", json::object()); }) == ErrorCode::UnknownSubtask);
}

TEST_CASE("a failing gateway still records the submission") {
  SessionService svc(both_packs(), load_instruments(data_dir() / "instruments"), std::make_shared<FailingGateway>(),
                     counting_ids());
  const auto& pack = svc.pack("full-coverage");
  const auto id = to_task_process(svc, Condition::FullSrl);
  svc.start_subtask(id, "K1");
  svc.submit_subtask(id, "K1", json{{"text", "done"}});
  svc.start_subtask(id, "Q1");
  const auto before = svc.state(id).event_seq;
  const auto res = svc.submit_subtask(id, "Q1", json{{"answers", quiz_answers(pack, *pack.find_subtask("Q1"), false)}});
  CHECK_FALSE(res.contains("hint"));
  REQUIRE(res.contains("hint_error"));
  CHECK(res.at("hint_error").at("code") == "UpstreamError");
  CHECK(svc.state(id).event_seq == before + 1);
  CHECK(svc.state(id).outcomes.at("Q1").attempts == 1);

  const auto plan_id = svc.open_session("full-coverage", Condition::FullSrl);
  svc.advance(plan_id);
  CHECK(error_of([&] { svc.plan_request(plan_id); }) == ErrorCode::UpstreamError);
  CHECK(svc.state(plan_id).event_seq == 1);
}

TEST_CASE("stage and request errors") {
  auto svc = make_service();
  const auto id = svc->open_session("full-coverage", Condition::FullSrl);
  CHECK(error_of([&] { svc->start_subtask(id, "K1"); }) == ErrorCode::NotAvailableError);
  CHECK(error_of([&] { svc->plan_request(id); }) == ErrorCode::PhaseMismatch);
  svc->advance(id);
  CHECK(error_of([&] { svc->advance(id); }) == ErrorCode::StageGateError);
  CHECK(error_of([&] { svc->record_plan(id, json{{"ordering", {"Q1", "K1"}}}); }).has_value());
  CHECK(error_of([&] { svc->record_plan(id, json{{"ordering", "K1"}}); }) == ErrorCode::InvalidPayload);
  CHECK(error_of([&] { svc->record_plan(id, json{{"ordering", global_order(svc->pack("full-coverage"))}, {"extra", 1}}); }) ==
        ErrorCode::InvalidPayload);

  const auto suggested = svc->plan_request(id);
  CHECK(suggested.at("agent") == "planning");
  CHECK(suggested.at("ordering").size() == 8);
  const auto rec = svc->record_plan(id, json{{"ordering", suggested.at("ordering")},
                                             {"time_allocations", suggested.at("time_allocations")}});
  CHECK(rec.at("plan").at("source") == "agent_suggested");
  auto edited = suggested.at("time_allocations");
  edited["K1"] = 99;
  CHECK(svc->record_plan(id, json{{"ordering", suggested.at("ordering")}, {"time_allocations", edited}})
            .at("plan")
            .at("source") == "learner_edited");

  CHECK(error_of([&] { svc->tick(id, json{{"seconds", 0}}); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { svc->tick(id, json{{"seconds", "5"}}); }) == ErrorCode::InvalidPayload);
  CHECK(error_of([&] { svc->chat(id, json{{"kind", "sing"}}); }) == ErrorCode::InvalidPayload);
  CHECK(error_of([&] { svc->chat(id, json{{"message", "hi"}}); }) == ErrorCode::InvalidPayload);
  CHECK(error_of([&] { svc->view("nobody"); }) == ErrorCode::UnknownSession);
  CHECK(error_of([&] { svc->open_session("nope", Condition::NoSrl); }) == ErrorCode::UnknownPack);
  CHECK(error_of([&] { svc->score_assessment("nope", ResponseSheet{}); }) == ErrorCode::UnknownInstrument);
  CHECK(error_of([&] {
          SessionService bad(both_packs(), {}, nullptr);
        }) == ErrorCode::ConfigError);

  const auto d = to_task_process(*svc, Condition::FullSrl);
  CHECK(error_of([&] { svc->chat(d, json{{"kind", "discussion_message"}, {"subtask_id", "D1"}, {"message", "hi"}}); }) ==
        ErrorCode::NotAvailableError);
}

TEST_CASE("minimal pack sessions work without personas") {
  auto svc = make_service();
  const auto id = svc->open_session("minimal", Condition::FullSrl);
  svc->advance(id);
  const auto plan = svc->plan_request(id);
  CHECK(plan.at("ordering") == json::array({"K1", "Q1"}));
  svc->record_plan(id, json{{"ordering", plan.at("ordering")}});
  svc->advance(id);
  CHECK(svc->view(id).at("available") == json::array({"K1"}));
}

TEST_CASE("sessions persist, snapshot and recover") {
  TempDir dir;
  auto opts = counting_ids("p");
  opts.data_dir = dir.path;
  opts.snapshot_every = 7;
  std::string full, nosrl;
  SessionState full_state, nosrl_state;
  {
    auto svc = make_service(2, opts);
    full = drive_full_session(*svc, Condition::FullSrl);
    nosrl = drive_full_session(*svc, Condition::NoSrl);
    full_state = svc->state(full);
    nosrl_state = svc->state(nosrl);
    std::ifstream in(dir.path / "sessions" / (full + ".jsonl"), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == svc->export_events(full));
  }
  CHECK(fs::exists(dir.path / "sessions" / (full + ".snapshot.json")));

  auto check_recovery = [&] {
    auto svc = make_service(2, opts);
    CHECK(svc->recover() == 2);
    CHECK(svc->state(full) == full_state);
    CHECK(svc->state(nosrl) == nosrl_state);
    CHECK(svc->session_ids() == std::vector<std::string>{full, nosrl});
    svc->tick(full, json{{"seconds", 3}});
    CHECK(svc->state(full).clock == full_state.clock + 3);
  };
  check_recovery();
  // The tick above extended the log; drop it again for the comparisons below.
  {
    auto svc = make_service(2, opts);
    svc->recover();
    full_state = svc->state(full);
  }

  {
    std::ofstream out(dir.path / "sessions" / (full + ".snapshot.json"), std::ios::trunc);
    out << "{\"session_id\": \"p1\", \"trunc";
  }
  check_recovery();

  {
    auto svc = make_service(2, opts);
    svc->recover();
    full_state = svc->state(full);
  }
  {
    std::ofstream out(dir.path / "sessions" / (full + ".snapshot.json"), std::ios::trunc);
    auto wrong = state_to_json(nosrl_state);
    out << wrong.dump();
  }
  check_recovery();

  {
    std::ofstream out(dir.path / "sessions" / "broken.jsonl", std::ios::trunc);
    out << "{\"oops\": 1}\n";
  }
  auto svc = make_service(2, opts);
  CHECK(error_of([&] { svc->recover(); }) == ErrorCode::ReplayError);
}

TEST_CASE("from_config loads packs, instruments and recovers logs") {
  TempDir dir;
  {
    std::ofstream out(dir.path / "server.json");
    out << json{{"pack_dir", (data_dir() / "packs").string()},
                {"instrument_dir", (data_dir() / "instruments").string()},
                {"data_dir", "state"},
                {"port", 9090},
                {"snapshot_every", 3},
                {"gateway", {{"provider", "mock"}, {"seed", 4}}}}
               .dump();
  }
  const auto cfg = load_service_config(dir.path / "server.json");
  CHECK(cfg.options.data_dir == dir.path / "state");
  CHECK(cfg.port == 9090);
  CHECK(cfg.options.snapshot_every == 3);
  CHECK(cfg.gateway.provider == Provider::Mock);
  CHECK(cfg.gateway.seed == 4);
  std::string id;
  {
    auto svc = SessionService::from_config(cfg);
    id = svc->open_session("full-coverage", Condition::NoSrl);
    svc->advance(id);
  }
  auto again = SessionService::from_config(cfg);
  CHECK(again->state(id).stage == TaskStage::TaskProcess);
  CHECK(again->instruments().count("aslq36") == 1);

  const auto example = load_service_config(data_dir() / "server.example.json");
  CHECK(example.pack_dir == data_dir() / "packs");
  CHECK(load_packs(example.pack_dir).size() == 2);

  auto write = [&](const json& j) {
    std::ofstream out(dir.path / "bad.json", std::ios::trunc);
    out << j.dump();
    return dir.path / "bad.json";
  };
  CHECK(error_of([&] { load_service_config(dir.path / "missing.json"); }) == ErrorCode::ConfigError);
  CHECK(error_of([&] { load_service_config(write(json{{"pack_dir", "p"}})); }) == ErrorCode::ConfigError);
  CHECK(error_of([&] {
          load_service_config(write(json{{"pack_dir", "p"}, {"instrument_dir", "i"}, {"port", 70000}}));
        }) == ErrorCode::ConfigError);
  CHECK(error_of([&] {
          load_service_config(write(json{{"pack_dir", "p"}, {"instrument_dir", "i"}, {"colour", "red"}}));
        }) == ErrorCode::ConfigError);
  {
    std::ofstream out(dir.path / "bad.json", std::ios::trunc);
    out << "{";
  }
  CHECK(error_of([&] { load_service_config(dir.path / "bad.json"); }) == ErrorCode::ConfigError);
}

TEST_CASE("sessions are independent under concurrent use") {
  auto svc = make_service(4);
  std::vector<std::string> ids(8);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    threads.emplace_back([&, i] {
      ids[i] = drive_full_session(*svc, i % 2 ? Condition::NoSrl : Condition::FullSrl);
    });
  }
  for (auto& t : threads) t.join();
  threads.clear();
  TaskEngine engine(full_pack());
  for (const auto& id : ids) {
    CHECK(svc->state(id).stage == TaskStage::Review);
    CHECK(replay(engine, svc->events(id)) == svc->state(id));
  }

  const auto shared = svc->open_session("full-coverage", Condition::NoSrl);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        svc->tick(shared, json{{"seconds", 1}});
        (void)svc->view(shared);
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto evs = svc->events(shared);
  CHECK(svc->state(shared).clock == 200);
  CHECK(evs.size() == 201);
  CHECK(replay(engine, evs) == svc->state(shared));
}

TEST_CASE("tick_all only advances sessions in the task process stage") {
  auto svc = make_service();
  const auto intro = svc->open_session("full-coverage", Condition::FullSrl);
  const auto working = to_task_process(*svc, Condition::NoSrl);
  const auto two = to_task_process(*svc, Condition::NoSrl);
  svc->start_subtask(working, "K1");
  svc->tick_all(30);
  svc->tick_all(30);
  CHECK(svc->state(intro).clock == 0);
  CHECK(svc->state(working).clock == 60);
  CHECK(svc->state(working).outcomes.at("K1").time_spent_seconds == 60);
  CHECK(svc->state(two).clock == 60);
  CHECK(svc->view(two).at("monitor").at("idle_seconds") == 60);
}

TEST_CASE("router maps requests and errors") {
  auto svc = make_service();
  ApiRouter router(*svc);
  auto created = router.handle("POST", "/sessions", R"({"pack_id":"full-coverage","condition":"no_srl"})");
  REQUIRE(created.status == 200);
  const auto id = json::parse(created.body).at("session_id").get<std::string>();
  CHECK(json::parse(created.body).at("view").at("condition") == "no_srl");

  auto status_of = [&](std::string_view m, const std::string& p, std::string_view b = "") {
    return router.handle(m, p, b).status;
  };
  auto error_name = [&](std::string_view m, const std::string& p, std::string_view b = "") {
    return json::parse(router.handle(m, p, b).body).value("error", std::string());
  };
  CHECK(status_of("GET", "/sessions") == 405);
  CHECK(error_name("GET", "/sessions") == "MethodNotAllowed");
  CHECK(status_of("GET", "/nowhere") == 404);
  CHECK(error_name("GET", "/nowhere") == "NotFound");
  CHECK(error_name("DELETE", "/sessions/" + id + "/view") == "NotFound");
  CHECK(status_of("POST", "/sessions", "{oops") == 422);
  CHECK(error_name("POST", "/sessions", "{oops") == "InvalidPayload");
  CHECK(error_name("POST", "/sessions", R"({"pack_id":"full-coverage","condition":"maybe"})") == "InvalidPayload");
  CHECK(error_name("POST", "/sessions", R"({"condition":"no_srl"})") == "InvalidPayload");
  CHECK(status_of("POST", "/sessions", R"({"pack_id":"nope"})") == 404);
  CHECK(error_name("GET", "/sessions/ghost/view") == "UnknownSession");
  CHECK(status_of("GET", "/sessions/ghost/view") == 404);

  CHECK(status_of("GET", "/sessions/" + id + "/view?x=1") == 200);
  CHECK(status_of("POST", "/sessions/" + id + "/advance") == 200);
  CHECK(status_of("POST", "/sessions/" + id + "/advance") == 409);
  CHECK(error_name("POST", "/sessions/" + id + "/advance") == "StageGateError");
  CHECK(error_name("POST", "/sessions/" + id + "/plan") == "FeatureDisabled");
  CHECK(status_of("POST", "/sessions/" + id + "/subtasks/K1/start") == 200);
  CHECK(status_of("POST", "/sessions/" + id + "/tick", R"({"seconds": 12, "subtask_id": "K1"})") == 200);
  const auto submit = router.handle("POST", "/sessions/" + id + "/subtasks/K1/submit", R"({"text":"two words"})");
  CHECK(json::parse(submit.body).at("completed") == true);
  CHECK(error_name("POST", "/sessions/" + id + "/subtasks/RP1/start") == "NotAvailableError");
  CHECK(error_name("POST", "/sessions/" + id + "/subtasks/ZZ/start") == "UnknownSubtask");

  const auto events = router.handle("GET", "/sessions/" + id + "/events", "");
  CHECK(events.content_type == "application/x-ndjson");
  CHECK(events.body == svc->export_events(id));

  const auto fs_id = json::parse(router.handle("POST", "/sessions", R"({"pack_id":"full-coverage"})").body)
                         .at("session_id")
                         .get<std::string>();
  CHECK(svc->state(fs_id).condition == Condition::FullSrl);
  router.handle("POST", "/sessions/" + fs_id + "/advance", "");
  const auto asked = json::parse(router.handle("POST", "/sessions/" + fs_id + "/plan", "{}").body);
  CHECK(asked.at("agent") == "planning");
  const auto recorded =
      json::parse(router.handle("POST", "/sessions/" + fs_id + "/plan", json{{"ordering", asked.at("ordering")}}.dump()).body);
  CHECK(recorded.at("plan").at("ordering") == asked.at("ordering"));

  const auto scored = router.handle("POST", "/assessments/trust12/score",
                                    json{{"responses", std::vector<int>(12, 4)}, {"session_id", id}}.dump());
  REQUIRE(scored.status == 200);
  CHECK(json::parse(scored.body).at("overall") == 4.0);
  CHECK(svc->events(id).back().kind == EventKind::AssessmentScored);
  CHECK(error_name("POST", "/assessments/trust12/score", R"({"responses":[1,2]})") == "LengthMismatch");
  CHECK(error_name("POST", "/assessments/nope/score", R"({"responses":[1]})") == "UnknownInstrument");
  CHECK(error_name("GET", "/assessments/trust12/score") == "NotFound");
}

TEST_CASE("http server serves the router over a real socket") {
  auto svc = make_service();
  HttpServer server(*svc);
  const int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  auto res = cli.Post("/sessions", R"({"pack_id":"minimal","condition":"no_srl"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto id = json::parse(res->body).at("session_id").get<std::string>();
  auto view = cli.Get("/sessions/" + id + "/view");
  REQUIRE(view);
  CHECK(json::parse(view->body).at("pack_id") == "minimal");
  auto missing = cli.Get("/sessions/ghost/view");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto events = cli.Get("/sessions/" + id + "/events");
  REQUIRE(events);
  CHECK(events->get_header_value("Content-Type").rfind("application/x-ndjson", 0) == 0);
  CHECK(events->body == svc->export_events(id));
  auto bad = cli.Post("/sessions/" + id + "/tick", "not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 422);
  server.stop();
}
