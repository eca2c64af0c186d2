#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "srl/content.hpp"
#include "srl/error.hpp"
#include "support.hpp"

using nlohmann::json;
using namespace srl;

namespace {

json fixture(const char* name) { return json::parse(srltest::read_file(srltest::data_dir() / "packs" / name)); }

// Independent structural walk over the raw document: required keys, id
// uniqueness and every cross reference. Shares no code with the loader.
std::vector<std::string> walk(const json& doc) {
  std::vector<std::string> problems;
  auto need = [&](const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) {
      problems.push_back(where + " not an object");
      return false;
    }
    bool ok = true;
    for (const char* k : keys) {
      if (!obj.contains(k)) {
        problems.push_back(where + " lacks " + k);
        ok = false;
      }
    }
    return ok;
  };
  if (!need(doc, {"pack_id", "stages", "tasks", "questions", "papers", "personas", "prompts", "enhancement"}, "$")) {
    return problems;
  }
  if (doc["stages"] != json({"introduction", "planning", "task_process", "review"})) problems.push_back("stages");
  std::map<std::string, std::string> docs;
  std::set<std::string> questions, personas, subtask_ids, task_ids;
  for (const auto& p : doc["papers"]) {
    if (need(p, {"id", "kind", "title", "content"}, "paper")) docs[p["id"]] = p["kind"];
  }
  for (const auto& q : doc["questions"]) {
    if (!need(q, {"id", "form", "stem", "topic"}, "question")) continue;
    questions.insert(q["id"].get<std::string>());
    const std::string form = q["form"];
    if (form == "matching" && !(q.contains("pairs") && q["pairs"].size() >= 2)) problems.push_back("pairs");
    if (form == "ordering" && !(q.contains("items") && q["items"].size() >= 2)) problems.push_back("items");
    if (form == "true_false" && !q.contains("truth")) problems.push_back("truth");
    if (form == "multiple_choice") {
      int correct = 0;
      for (const auto& o : q.value("options", json::array())) correct += o.value("correct", false) ? 1 : 0;
      if (correct != 1) problems.push_back("options");
    }
  }
  for (const auto& p : doc["personas"]) {
    if (need(p, {"id", "professor_name", "department", "university", "research_field", "research_directions"},
             "persona")) {
      personas.insert(p["id"].get<std::string>());
    }
  }
  for (const auto& t : doc["tasks"]) {
    if (!need(t, {"id", "title", "description", "depends_on", "subtasks"}, "task")) continue;
    task_ids.insert(t["id"].get<std::string>());
    std::set<std::string> local;
    for (const auto& s : t["subtasks"]) local.insert(s.value("id", ""));
    for (const auto& s : t["subtasks"]) {
      if (!need(s, {"id", "kind", "title", "description", "estimated_minutes", "content_ref", "completion", "depends_on"},
                "subtask")) {
        continue;
      }
      if (!subtask_ids.insert(s["id"].get<std::string>()).second) problems.push_back("duplicate " + s["id"].get<std::string>());
      if (s["estimated_minutes"].get<long>() <= 0) problems.push_back("minutes");
      for (const auto& d : s["depends_on"]) {
        if (!local.count(d.get<std::string>())) problems.push_back("subtask dep " + d.get<std::string>());
      }
      const std::string kind = s["kind"];
      const std::string ref = s["content_ref"];
      if (kind == "quiz") {
        std::string item;
        std::stringstream ss(ref);
        while (std::getline(ss, item, ',')) {
          if (!questions.count(item)) problems.push_back("question ref " + item);
        }
      } else if (kind == "discussion" || kind == "insight") {
        if (!personas.count(ref)) problems.push_back("persona ref " + ref);
      } else {
        const char* want = kind == "knowledge" ? "knowledge" : (kind == "paper" || kind == "review") ? "paper" : "brief";
        if (!docs.count(ref) || docs[ref] != want) problems.push_back("doc ref " + ref);
      }
    }
  }
  for (const auto& t : doc["tasks"]) {
    for (const auto& d : t.value("depends_on", json::array())) {
      if (!task_ids.count(d.get<std::string>())) problems.push_back("task dep");
    }
  }
  return problems;
}

bool loader_accepts(const json& doc) {
  try {
    load_pack_from_string(doc.dump());
    return true;
  } catch (const Error&) {
    return false;
  }
}

ErrorCode loader_code(const json& doc) {
  try {
    load_pack_from_string(doc.dump());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("pack was accepted");
  return ErrorCode::ParseError;
}

json& sub_of(json& doc, const std::string& id) {
  for (auto& t : doc["tasks"]) {
    for (auto& s : t["subtasks"]) {
      if (s["id"] == id) return s;
    }
  }
  throw std::runtime_error("no subtask " + id);
}

// Pack with a single task of n knowledge subtasks and the given prerequisite
// lists (indices). Built in code so cyclic inputs can reach the sorter.
ContentPack chain_pack(const std::vector<std::vector<int>>& prereqs) {
  ContentPack p;
  p.pack_id = "gen";
  p.stages = {"introduction", "planning", "task_process", "review"};
  p.papers.push_back({"D", DocKind::Knowledge, "doc", "text", ""});
  TaskDef t{"T", "task", "", {}, {}};
  for (std::size_t i = 0; i < prereqs.size(); ++i) {
    SubtaskDef s;
    s.id = "S" + std::to_string(i);
    s.kind = SubtaskKind::Knowledge;
    s.title = s.id;
    s.content_ref = "D";
    for (int d : prereqs[i]) s.depends_on.push_back("S" + std::to_string(d));
    t.subtasks.push_back(s);
  }
  p.tasks.push_back(t);
  p.reindex();
  return p;
}

}  // namespace

TEST_CASE("minimal pack loads with both subtasks indexed") {
  const auto pack = load_pack(srltest::data_dir() / "packs" / "minimal.json");
  CHECK(pack.pack_id == "minimal");
  REQUIRE(pack.subtask_count() == 2);
  REQUIRE(pack.find_subtask("K1") != nullptr);
  REQUIRE(pack.find_subtask("Q1") != nullptr);
  CHECK(pack.find_subtask("K1")->kind == SubtaskKind::Knowledge);
  CHECK(pack.find_subtask("Q1")->kind == SubtaskKind::Quiz);
  CHECK(pack.declaration_index("K1") == 0u);
  CHECK(pack.declaration_index("Q1") == 1u);
  CHECK(pack.task_of("Q1")->id == "T1");
  CHECK(pack.quiz_questions(*pack.find_subtask("Q1")).size() == 2);
  CHECK(pack.find_subtask("nope") == nullptr);
}

TEST_CASE("full pack exercises every subtask kind, question form and agent template") {
  const auto& pack = *srltest::full_pack();
  std::set<SubtaskKind> kinds;
  for (const auto* s : pack.all_subtasks()) kinds.insert(s->kind);
  CHECK(kinds.size() == std::size(kAllSubtaskKinds));
  std::set<QuestionForm> forms;
  for (const auto& q : pack.questions) forms.insert(q.form);
  CHECK(forms.size() == 4);
  CHECK(pack.prompts.size() == std::size(kAllAgentKinds));
  CHECK(validate_pack(pack).ok());
}

TEST_CASE("independent walker and loader agree on the fixtures") {
  for (const char* name : {"minimal.json", "full.json"}) {
    const auto doc = fixture(name);
    CHECK_MESSAGE(walk(doc).empty(), name);
    CHECK(loader_accepts(doc));
  }
}

TEST_CASE("walker and loader agree on structural mutations") {
  const auto base = fixture("full.json");
  const std::vector<std::pair<const char*, std::function<void(json&)>>> mutations = {
      {"drop pack_id", [](json& d) { d.erase("pack_id"); }},
      {"stage order", [](json& d) { std::swap(d["stages"][0], d["stages"][1]); }},
      {"dangling question", [](json& d) { sub_of(d, "Q1")["content_ref"] = "QM1,QX9"; }},
      {"dangling persona", [](json& d) { sub_of(d, "D1")["content_ref"] = "PROF-NONE"; }},
      {"doc of wrong kind", [](json& d) { sub_of(d, "K1")["content_ref"] = "DOC-P1"; }},
      {"dependency outside task", [](json& d) { sub_of(d, "D1")["depends_on"] = {"K1"}; }},
      {"unknown task dependency", [](json& d) { d["tasks"][1]["depends_on"] = {"T9"}; }},
      {"duplicate subtask id", [](json& d) { sub_of(d, "RP1")["id"] = "W1"; }},
      {"zero minutes", [](json& d) { sub_of(d, "K1")["estimated_minutes"] = 0; }},
      {"two correct options", [](json& d) {
         for (auto& q : d["questions"]) {
           if (q["form"] == "multiple_choice") q["options"][1]["correct"] = true;
         }
       }},
      {"one ordering item", [](json& d) {
         for (auto& q : d["questions"]) {
           if (q["form"] == "ordering") q["items"] = {"x"};
         }
       }},
  };
  CHECK(walk(base).empty());
  for (const auto& [name, mutate] : mutations) {
    auto doc = base;
    mutate(doc);
    INFO(name);
    CHECK_FALSE(walk(doc).empty());
    CHECK_FALSE(loader_accepts(doc));
  }
}

TEST_CASE("pack json round trip is lossless") {
  for (const char* name : {"minimal.json", "full.json"}) {
    const auto doc = fixture(name);
    const auto pack = pack_from_json(doc);
    CHECK(pack_to_json(pack) == doc);
    CHECK(pack_from_json(pack_to_json(pack)) == pack);
  }
}

TEST_CASE("loader error codes") {
  CHECK_THROWS_AS(load_pack_from_string("{not json"), Error);
  try {
    load_pack_from_string("{not json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  auto doc = fixture("full.json");
  doc["surprise"] = true;
  CHECK(loader_code(doc) == ErrorCode::SchemaError);

  doc = fixture("full.json");
  sub_of(doc, "R1")["content_ref"] = "DOC-MISSING";
  CHECK(loader_code(doc) == ErrorCode::DanglingRef);

  doc = fixture("full.json");
  sub_of(doc, "K1")["depends_on"] = {"Q1"};
  CHECK(loader_code(doc) == ErrorCode::SchemaError);  // cycle K1 <-> Q1

  doc = fixture("full.json");
  sub_of(doc, "K1")["kind"] = "lecture";
  CHECK(loader_code(doc) == ErrorCode::SchemaError);

  CHECK_THROWS_AS(load_pack("/nonexistent/pack.json"), Error);
}

TEST_CASE("validation findings name the problem") {
  auto has = [](const ValidationReport& r, FindingKind k) {
    return std::any_of(r.findings.begin(), r.findings.end(), [&](const Finding& f) { return f.kind == k; });
  };
  const auto base = pack_from_json(fixture("full.json"));

  auto p = base;
  p.tasks[0].subtasks[1].depends_on.clear();  // Q1 no longer paired with K1
  p.reindex();
  CHECK(has(validate_pack(p), FindingKind::Pairing));

  p = base;
  p.tasks[0].subtasks[0].depends_on = {"R1"};
  p.tasks[0].subtasks[3].depends_on = {"P1", "Q1"};
  p.tasks[0].subtasks[1].depends_on = {"K1"};
  p.reindex();
  {
    const auto r = validate_pack(p);
    REQUIRE(has(r, FindingKind::Cycle));
    CHECK(r.summary().find("K1,Q1,R1") != std::string::npos);
  }

  p = base;
  p.tasks[0].depends_on = {"T2"};
  p.reindex();
  CHECK(has(validate_pack(p), FindingKind::Cycle));

  p = base;
  p.tasks[0].subtasks[0].completion = {CompletionRule::MinChatTurns, 2};
  CHECK(has(validate_pack(p), FindingKind::Schema));

  p = base;
  p.tasks[0].subtasks[1].completion = {CompletionRule::MinQuestionsCorrect, 5};
  CHECK(has(validate_pack(p), FindingKind::Schema));

  p = base;
  p.questions.push_back(p.questions[0]);
  p.reindex();
  CHECK(has(validate_pack(p), FindingKind::Duplicate));

  p = base;
  p.prompts[AgentKind::QuizTutor].reply_word_limit = 25;
  CHECK(has(validate_pack(p), FindingKind::Schema));

  p = base;
  p.prompts[AgentKind::Planning].user_template += "\n{mystery}";
  CHECK(has(validate_pack(p), FindingKind::Schema));

  p = base;
  p.prompts[AgentKind::Planning].placeholders.push_back("userQuestion");
  CHECK(has(validate_pack(p), FindingKind::Schema));

  p = base;
  p.enhancement.monitor_sampling_seconds = 0;
  CHECK(has(validate_pack(p), FindingKind::Schema));
}

TEST_CASE("rule compatibility table") {
  CHECK(rule_compatible(SubtaskKind::Knowledge, CompletionRule::SummarySubmitted));
  CHECK_FALSE(rule_compatible(SubtaskKind::Knowledge, CompletionRule::MinWords));
  CHECK(rule_compatible(SubtaskKind::Quiz, CompletionRule::MinQuestionsCorrect));
  CHECK_FALSE(rule_compatible(SubtaskKind::Quiz, CompletionRule::SummarySubmitted));
  CHECK(rule_compatible(SubtaskKind::Report, CompletionRule::MinWords));
  CHECK(rule_compatible(SubtaskKind::Discussion, CompletionRule::MinChatTurns));
  CHECK(rule_compatible(SubtaskKind::WritingGoal, CompletionRule::GoalRecorded));
  CHECK_FALSE(rule_compatible(SubtaskKind::WritingGoal, CompletionRule::MinWords));
  CHECK(paired_prerequisite(SubtaskKind::Insight) == SubtaskKind::Discussion);
  CHECK_FALSE(paired_prerequisite(SubtaskKind::Paper).has_value());
}

TEST_CASE("template tokens") {
  CHECK(template_tokens("a {x} b {y_1} {x} {not a token} {2bad} {") == std::vector<std::string>{"x", "y_1"});
  CHECK(template_tokens("no tokens").empty());
}

TEST_CASE("topological order is the least order by declaration index (brute force oracle)") {
  std::mt19937_64 rng(20240611);
  for (int round = 0; round < 300; ++round) {
    const int n = 1 + static_cast<int>(rng() % 7);
    std::vector<int> hidden(n);
    std::iota(hidden.begin(), hidden.end(), 0);
    std::shuffle(hidden.begin(), hidden.end(), rng);
    std::vector<std::vector<int>> prereqs(n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (hidden[b] < hidden[a] && rng() % 10 < 4) prereqs[a].push_back(b);
      }
    }
    const auto pack = chain_pack(prereqs);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> least;
    std::size_t valid = 0;
    do {
      std::vector<int> pos(n);
      for (int i = 0; i < n; ++i) pos[perm[i]] = i;
      bool ok = true;
      for (int a = 0; a < n && ok; ++a) {
        for (int b : prereqs[a]) ok = ok && pos[b] < pos[a];
      }
      if (ok) {
        if (least.empty()) least = perm;
        ++valid;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    REQUIRE(valid > 0);

    std::vector<std::string> expected;
    for (int i : least) expected.push_back("S" + std::to_string(i));
    CHECK(topological_order(pack, "T") == expected);
    CHECK(global_order(pack) == expected);
    CHECK_NOTHROW(validate_pack(pack));
  }
}

TEST_CASE("cyclic dependencies are reported") {
  const auto pack = chain_pack({{2}, {0}, {1}});
  CHECK_THROWS_AS(topological_order(pack, "T"), Error);
  try {
    topological_order(pack, "T");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CycleError);
  }
  try {
    topological_order(pack, "T9");
    FAIL("expected UnknownTask");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownTask);
  }
}

TEST_CASE("global order honours task dependencies") {
  const auto& pack = *srltest::full_pack();
  const auto order = global_order(pack);
  REQUIRE(order.size() == 8);
  auto pos = [&](const std::string& id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
  for (const char* t1 : {"K1", "Q1", "P1", "R1"}) {
    for (const char* t2 : {"D1", "I1", "W1", "RP1"}) CHECK(pos(t1) < pos(t2));
  }
  const auto deps = pack.effective_dependencies("I1");
  CHECK(std::count(deps.begin(), deps.end(), "D1") == 1);
  CHECK(std::count(deps.begin(), deps.end(), "K1") == 1);
  CHECK(deps.size() == 5);
}

TEST_CASE("word budgets and supported placeholders") {
  CHECK(agent_word_budget(AgentKind::QuizTutor) == 20);
  CHECK(agent_word_budget(AgentKind::Reflection) == 30);
  CHECK(agent_word_budget(AgentKind::PaperReview) == 30);
  CHECK(agent_word_budget(AgentKind::Writing) == 50);
  CHECK_FALSE(agent_word_budget(AgentKind::Planning).has_value());
  CHECK_FALSE(agent_word_budget(AgentKind::Chatting).has_value());
  for (auto a : kAllAgentKinds) {
    const auto& ph = supported_placeholders(a);
    CHECK(std::find(ph.begin(), ph.end(), "chatHistory") != ph.end());
    CHECK(agent_kind_from(to_string(a)) == a);
  }
}
