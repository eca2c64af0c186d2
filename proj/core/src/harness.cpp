#include "srl/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "srl/error.hpp"
#include "srl/gateway.hpp"
#include "srl/json_reader.hpp"
#include "srl/orchestrator.hpp"
#include "srl/quiz.hpp"
#include "srl/srl_layer.hpp"
#include "srl/view.hpp"

namespace srl {

using nlohmann::json;

namespace {

const std::set<std::string>& known_ops() {
  static const std::set<std::string> ops = {"advance",      "plan_request", "record_plan", "start",
                                            "tick",         "submit",       "chat",        "paper_help",
                                            "writing_help", "quiz_help",    "reflection_request", "assess"};
  return ops;
}

const std::set<std::string>& srl_only_ops() {
  static const std::set<std::string> ops = {"plan_request", "record_plan", "paper_help",
                                            "writing_help", "quiz_help",   "reflection_request"};
  return ops;
}

[[noreturn]] void script_error(std::size_t index, const std::string& op, const std::string& what) {
  raise(ErrorCode::ScriptError, "action " + std::to_string(index) + " (" + op + "): " + what);
}

std::string arg_str(const ScriptAction& a, std::size_t index, const char* key) {
  auto it = a.args.find(key);
  if (it == a.args.end() || !it->is_string()) script_error(index, a.op, std::string("needs string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

LearnerScript script_from_json(const json& j) {
  ObjectReader r(j, "script", ErrorCode::ScriptError);
  LearnerScript s;
  s.script_id = r.str("script_id");
  const auto cond_text = r.str("condition");
  const auto cond = condition_from(cond_text);
  if (!cond) r.fail("condition", "unknown condition '" + cond_text + "'");
  s.condition = *cond;
  if (r.optional("seed")) s.seed = r.integer("seed");
  r.optional("description");
  const auto& actions = r.array("actions");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!actions[i].is_object() || !actions[i].contains("do") || !actions[i]["do"].is_string()) {
      script_error(i, "?", "every action needs a string 'do' field");
    }
    ScriptAction a;
    a.op = actions[i]["do"].get<std::string>();
    a.args = actions[i];
    a.args.erase("do");
    s.actions.push_back(std::move(a));
  }
  r.finish();
  return s;
}

LearnerScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return script_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void validate_script(const LearnerScript& script, const ContentPack& pack) {
  for (std::size_t i = 0; i < script.actions.size(); ++i) {
    const auto& a = script.actions[i];
    if (!known_ops().count(a.op)) script_error(i, a.op, "unknown operation");
    if (script.condition == Condition::NoSrl && srl_only_ops().count(a.op)) {
      script_error(i, a.op, "not available without SRL features");
    }
    if (a.args.contains("subtask")) {
      const auto sid = arg_str(a, i, "subtask");
      const auto* sub = pack.find_subtask(sid);
      if (!sub) script_error(i, a.op, "unknown subtask '" + sid + "'");
      if (a.op == "submit" && a.args.contains("correct")) {
        if (sub->kind != SubtaskKind::Quiz) script_error(i, a.op, "'correct' applies to quiz subtasks only");
        const auto& c = a.args["correct"];
        if (!c.is_array() || c.size() != pack.quiz_questions(*sub).size()) {
          script_error(i, a.op, "'correct' needs one flag per question");
        }
      }
      if (a.op == "chat" && sub->kind != SubtaskKind::Discussion) script_error(i, a.op, "chat needs a discussion subtask");
      if (a.op == "quiz_help") {
        const auto qid = arg_str(a, i, "question");
        const auto qs = pack.quiz_questions(*sub);
        if (std::none_of(qs.begin(), qs.end(), [&](const QuestionDef* q) { return q->id == qid; })) {
          script_error(i, a.op, "question '" + qid + "' is not part of " + sid);
        }
      }
    } else if (a.op == "start" || a.op == "submit" || a.op == "chat" || a.op == "paper_help" ||
               a.op == "writing_help" || a.op == "quiz_help") {
      script_error(i, a.op, "needs a subtask");
    }
    if (a.op == "tick") {
      auto it = a.args.find("seconds");
      if (it == a.args.end() || !it->is_number_integer() || it->get<std::int64_t>() <= 0) {
        script_error(i, a.op, "needs positive integer seconds");
      }
    }
    if (a.op == "assess") arg_str(a, i, "instrument");
  }
}

json session_report_to_json(const SessionReport& r) {
  json reports = json::array();
  for (const auto& s : r.assessments) reports.push_back(report_to_json(s));
  return json{{"session_id", r.session_id},
              {"script_id", r.script_id},
              {"condition", std::string(to_string(r.condition))},
              {"seed", r.seed},
              {"final_stage", r.final_stage},
              {"completion_rate", r.completion_rate},
              {"total_seconds", r.total_seconds},
              {"subtask_seconds", r.subtask_seconds},
              {"agent_invocations", r.agent_invocations},
              {"assessments", std::move(reports)}};
}

SessionReport session_report_from_json(const json& j) {
  SessionReport r;
  try {
    r.session_id = j.at("session_id").get<std::string>();
    r.script_id = j.value("script_id", std::string());
    const auto cond = condition_from(j.at("condition").get<std::string>());
    if (!cond) raise(ErrorCode::InvalidPayload, "report has an unknown condition");
    r.condition = *cond;
    r.seed = j.value("seed", std::int64_t{0});
    r.final_stage = j.value("final_stage", std::string());
    r.completion_rate = j.at("completion_rate").get<double>();
    r.total_seconds = j.at("total_seconds").get<std::int64_t>();
    r.subtask_seconds = j.value("subtask_seconds", std::map<std::string, std::int64_t>{});
    r.agent_invocations = j.value("agent_invocations", std::map<std::string, std::int64_t>{});
    for (const auto& a : j.value("assessments", json::array())) r.assessments.push_back(report_from_json(a));
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidPayload, std::string("malformed session report: ") + e.what());
  }
  return r;
}

namespace {

std::map<std::string, std::int64_t> zero_agent_counts() {
  std::map<std::string, std::int64_t> m;
  for (auto a : kAllAgentKinds) m[std::string(to_string(a))] = 0;
  return m;
}

}  // namespace

SessionReport report_from_events(const ContentPack& pack, const std::vector<SessionEvent>& events) {
  const TaskEngine engine(std::make_shared<const ContentPack>(pack));
  const auto state = replay(engine, events);
  const auto metrics = monitor_snapshot(pack, state);
  SessionReport r;
  r.session_id = state.session_id;
  r.condition = state.condition;
  r.final_stage = std::string(to_string(state.stage));
  r.completion_rate = metrics.completion_rate;
  r.total_seconds = state.clock;
  for (const auto& m : metrics.subtasks) r.subtask_seconds[m.subtask_id] = m.time_spent_seconds;
  r.agent_invocations = zero_agent_counts();
  for (const auto& ev : events) {
    if (ev.kind == EventKind::AgentReplied) ++r.agent_invocations[ev.payload.at("agent").get<std::string>()];
  }
  r.assessments = state.assessments;
  return r;
}

namespace {

json wrong_answer(const QuestionDef& q, std::mt19937_64& rng, std::size_t index, const std::string& op) {
  LearnerAnswer a;
  switch (q.form) {
    case QuestionForm::MultipleChoice: {
      const auto key = q.correct_option();
      if (!key || q.options.size() < 2) script_error(index, op, "question '" + q.id + "' has no wrong option");
      auto pick = std::uniform_int_distribution<std::size_t>(0, q.options.size() - 2)(rng);
      if (pick >= *key) ++pick;
      a.value = pick;
      break;
    }
    case QuestionForm::TrueFalse: a.value = !q.truth; break;
    case QuestionForm::Ordering: {
      if (q.ordered_items.size() < 2) script_error(index, op, "question '" + q.id + "' cannot be ordered wrongly");
      auto items = q.ordered_items;
      do {
        std::shuffle(items.begin(), items.end(), rng);
      } while (items == q.ordered_items);
      a.value = items;
      break;
    }
    case QuestionForm::Matching: {
      const auto n = q.pairs.size();
      if (n < 2) script_error(index, op, "question '" + q.id + "' cannot be matched wrongly");
      const auto k = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
      std::vector<MatchPair> pairs;
      for (std::size_t i = 0; i < n; ++i) pairs.push_back({q.pairs[i].left, q.pairs[(i + k) % n].right});
      a.value = pairs;
      break;
    }
  }
  return answer_to_json(a);
}

class Runner {
 public:
  Runner(const LearnerScript& script, const ContentPack& pack, std::int64_t seed, SessionDriver& driver)
      : script_(script), pack_(pack), driver_(driver), rng_(static_cast<std::uint64_t>(seed)) {
    live_.script_id = script.script_id;
    live_.condition = script.condition;
    live_.seed = seed;
    live_.agent_invocations = zero_agent_counts();
  }

  RunResult run() {
    auto opened = call("POST", "/sessions",
                       json{{"pack_id", pack_.pack_id}, {"condition", std::string(to_string(script_.condition))}},
                       0, "open");
    id_ = opened.at("session_id").get<std::string>();
    live_.session_id = id_;
    for (std::size_t i = 0; i < script_.actions.size(); ++i) perform(i, script_.actions[i]);

    const auto view = call("GET", path("view"), json::object(), script_.actions.size(), "view");
    RunResult out;
    const auto exported = driver_.call("GET", path("events"), json::object());
    if (exported.status != 200) script_error(script_.actions.size(), "events", exported.body);
    out.events_jsonl = exported.body;

    live_.final_stage = view.at("stage").get<std::string>();
    live_.completion_rate = view.at("monitor").at("completion_rate").get<double>();
    live_.total_seconds = view.at("clock").get<std::int64_t>();
    for (const auto& task : view.at("tasks")) {
      for (const auto& sub : task.at("subtasks")) {
        live_.subtask_seconds[sub.at("id").get<std::string>()] = sub.value("time_spent_seconds", std::int64_t{0});
      }
    }
    out.report = live_;
    check(view, out);
    return out;
  }

 private:
  std::string path(const std::string& tail) const { return "/sessions/" + id_ + "/" + tail; }

  json call(const std::string& method, const std::string& p, const json& body, std::size_t index,
            const std::string& op) {
    const auto res = driver_.call(method, p, body);
    json parsed;
    try {
      parsed = json::parse(res.body);
    } catch (const json::parse_error&) {
      parsed = json{{"message", res.body}};
    }
    if (res.status != 200) {
      script_error(index, op, "HTTP " + std::to_string(res.status) + " " + parsed.value("error", std::string()) +
                                  ": " + parsed.value("message", std::string()));
    }
    return parsed;
  }

  void count_agent(const json& res) {
    if (auto it = res.find("agent"); it != res.end()) ++live_.agent_invocations[it->get<std::string>()];
  }

  void perform(std::size_t i, const ScriptAction& a) {
    const auto& op = a.op;
    if (op == "advance") {
      call("POST", path("advance"), json::object(), i, op);
    } else if (op == "plan_request") {
      count_agent(call("POST", path("plan"), json::object(), i, op));
    } else if (op == "record_plan") {
      record_plan(i, a);
    } else if (op == "start") {
      call("POST", path("subtasks/" + arg_str(a, i, "subtask") + "/start"), json::object(), i, op);
    } else if (op == "tick") {
      json body{{"seconds", a.args.at("seconds")}};
      if (a.args.contains("subtask")) body["subtask_id"] = a.args.at("subtask");
      call("POST", path("tick"), body, i, op);
    } else if (op == "submit") {
      submit(i, a);
    } else if (op == "chat") {
      count_agent(call("POST", path("chat"),
                       json{{"kind", "discussion_message"},
                            {"subtask_id", arg_str(a, i, "subtask")},
                            {"message", arg_str(a, i, "message")}},
                       i, op));
    } else if (op == "paper_help") {
      json body{{"kind", "paper_help"}, {"subtask_id", arg_str(a, i, "subtask")}};
      for (const char* k : {"summary", "question"}) {
        if (a.args.contains(k)) body[k] = a.args.at(k);
      }
      count_agent(call("POST", path("chat"), body, i, op));
    } else if (op == "writing_help") {
      json body{{"kind", "writing_help"}, {"subtask_id", arg_str(a, i, "subtask")}};
      for (const char* k : {"title", "body", "question"}) {
        if (a.args.contains(k)) body[k] = a.args.at(k);
      }
      count_agent(call("POST", path("chat"), body, i, op));
    } else if (op == "quiz_help") {
      const auto sid = arg_str(a, i, "subtask");
      const auto qid = arg_str(a, i, "question");
      const auto* q = pack_.find_question(qid);
      count_agent(call("POST", path("chat"),
                       json{{"kind", "quiz_help"}, {"subtask_id", sid}, {"question_id", qid},
                            {"answer", wrong_answer(*q, rng_, i, op)}},
                       i, op));
    } else if (op == "reflection_request") {
      count_agent(call("POST", path("chat"), json{{"kind", "reflection_request"}}, i, op));
    } else if (op == "assess") {
      json body{{"responses", a.args.value("responses", json::array())}, {"session_id", id_}};
      if (a.args.contains("respondent")) body["respondent_id"] = a.args.at("respondent");
      live_.assessments.push_back(
          report_from_json(call("POST", "/assessments/" + arg_str(a, i, "instrument") + "/score", body, i, op)));
    } else {
      script_error(i, op, "unknown operation");
    }
  }

  void record_plan(std::size_t i, const ScriptAction& a) {
    const auto view = call("GET", path("view"), json::object(), i, a.op);
    std::vector<std::string> ordering;
    std::map<std::string, std::int64_t> minutes;
    const auto& suggested = view.contains("suggested_plan") ? view.at("suggested_plan") : json(nullptr);
    if (a.args.contains("ordering")) {
      ordering = a.args.at("ordering").get<std::vector<std::string>>();
    } else if (a.args.value("use_suggested", true) && !suggested.is_null()) {
      ordering = suggested.at("ordering").get<std::vector<std::string>>();
    } else {
      ordering = global_order(pack_);
    }
    for (const auto& id : ordering) {
      const auto* sub = pack_.find_subtask(id);
      minutes[id] = sub ? sub->estimated_minutes : 1;
    }
    if (a.args.contains("minutes")) {
      for (const auto& [k, v] : a.args.at("minutes").items()) minutes[k] = v.get<std::int64_t>();
    }
    json body{{"ordering", ordering}, {"time_allocations", minutes}};
    if (a.args.contains("note")) body["strategy_note"] = a.args.at("note");
    call("POST", path("plan"), body, i, a.op);
  }

  void submit(std::size_t i, const ScriptAction& a) {
    const auto sid = arg_str(a, i, "subtask");
    const auto* sub = pack_.find_subtask(sid);
    json body = json::object();
    if (sub->kind == SubtaskKind::Quiz) {
      const auto qs = pack_.quiz_questions(*sub);
      json answers = json::object();
      for (std::size_t k = 0; k < qs.size(); ++k) {
        const bool right = !a.args.contains("correct") || a.args.at("correct").at(k).get<bool>();
        answers[qs[k]->id] = right ? answer_to_json(correct_answer(*qs[k])) : wrong_answer(*qs[k], rng_, i, a.op);
      }
      body["answers"] = std::move(answers);
    } else if (sub->kind != SubtaskKind::Discussion) {
      body["text"] = a.args.value("text", std::string());
    }
    const auto res = call("POST", path("subtasks/" + sid + "/submit"), body, i, a.op);
    if (res.contains("hint")) ++live_.agent_invocations[std::string(to_string(AgentKind::QuizTutor))];
    if (res.value("completed", false)) {
      const auto view = call("GET", path("view"), json::object(), i, a.op);
      if (view.at("stage") == "task_process" && view.at("can_advance").get<bool>()) {
        call("POST", path("advance"), json::object(), i, "auto-advance");
      }
    }
  }

  void check(const json& view, RunResult& out) {
    std::vector<SessionEvent> events;
    try {
      events = events_from_jsonl(out.events_jsonl);
      const TaskEngine engine(std::make_shared<const ContentPack>(pack_));
      const auto replayed = replay(engine, events);
      if (build_view(engine, replayed) != view) out.check_failures.push_back("replayed log does not reproduce the live view");
      auto fold = report_from_events(pack_, events);
      fold.script_id = live_.script_id;
      fold.seed = live_.seed;
      if (!(fold == live_)) {
        out.check_failures.push_back("report figures differ from a fold over the exported log: live " +
                                     session_report_to_json(live_).dump() + " vs fold " +
                                     session_report_to_json(fold).dump());
      }
      if (script_.condition == Condition::NoSrl) {
        for (auto agent : kAllAgentKinds) {
          if (is_srl_agent(agent) && fold.agent_invocations[std::string(to_string(agent))] != 0) {
            out.check_failures.push_back("NoSrl session invoked " + std::string(to_string(agent)));
          }
        }
        for (const auto& ev : events) {
          if (ev.kind == EventKind::StageAdvanced && ev.payload.value("to", json()) == "planning") {
            out.check_failures.push_back("NoSrl session entered the planning stage");
          }
        }
      }
    } catch (const Error& e) {
      out.check_failures.push_back(std::string("exported log cannot be replayed: ") + e.what());
    }
  }

  const LearnerScript& script_;
  const ContentPack& pack_;
  SessionDriver& driver_;
  std::mt19937_64 rng_;
  std::string id_;
  SessionReport live_;
};

}  // namespace

RunResult run_script(const LearnerScript& script, const ContentPack& pack, std::int64_t seed, SessionDriver& driver) {
  validate_script(script, pack);
  return Runner(script, pack, seed, driver).run();
}

RunResult run_script(const LearnerScript& script, std::shared_ptr<const ContentPack> pack, std::int64_t seed,
                     const std::map<std::string, Instrument>& instruments) {
  ServiceOptions opts;
  auto counter = std::make_shared<std::int64_t>(0);
  opts.id_generator = [seed, counter] { return "sess-" + std::to_string(seed) + "-" + std::to_string(++*counter); };
  const auto& ref = *pack;
  SessionService service({{pack->pack_id, pack}}, instruments, std::make_shared<MockGateway>(seed), std::move(opts));
  InProcessDriver driver(service);
  return run_script(script, ref, seed, driver);
}

std::vector<MetricSummary> compare_conditions(const std::vector<SessionReport>& reports) {
  std::map<Condition, std::map<std::string, std::vector<double>>> obs;
  std::set<std::string> instruments;
  for (const auto& r : reports) {
    auto& m = obs[r.condition];
    m["completion_rate"].push_back(r.completion_rate);
    m["total_seconds"].push_back(static_cast<double>(r.total_seconds));
    for (const auto& a : r.assessments) {
      m[a.instrument_id + ".overall"].push_back(a.overall);
      instruments.insert(a.instrument_id + ".overall");
    }
  }
  for (auto c : {Condition::FullSrl, Condition::NoSrl}) {
    if (!obs.count(c)) raise(ErrorCode::EmptyGroup, "no reports for condition " + std::string(to_string(c)));
  }
  std::vector<std::string> metrics = {"completion_rate", "total_seconds"};
  metrics.insert(metrics.end(), instruments.begin(), instruments.end());
  std::vector<MetricSummary> out;
  for (auto c : {Condition::FullSrl, Condition::NoSrl}) {
    for (const auto& name : metrics) {
      auto it = obs[c].find(name);
      if (it == obs[c].end()) continue;
      const auto& xs = it->second;
      MetricSummary s;
      s.condition = c;
      s.metric = name;
      s.n = xs.size();
      double sum = 0;
      for (double x : xs) sum += x;
      s.mean = sum / static_cast<double>(xs.size());
      if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string summary_csv(const std::vector<MetricSummary>& rows) {
  auto num = [](double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  std::string out = "condition,metric,n,mean,sd\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.condition)) + "," + r.metric + "," + std::to_string(r.n) + "," + num(r.mean) +
           "," + num(r.sd) + "\n";
  }
  return out;
}

}  // namespace srl
