#include <fstream>
#include <sstream>

#include "srl/content.hpp"
#include "srl/error.hpp"
#include "srl/json_reader.hpp"

namespace srl {

using nlohmann::json;

ObjectReader::ObjectReader(const json& j, std::string path, ErrorCode code)
    : j_(j), path_(std::move(path)), code_(code) {
  if (!j_.is_object()) raise(code_, path_ + ": expected an object");
}

void ObjectReader::fail(std::string_view key, const std::string& what) const {
  raise(code_, path_ + "." + std::string(key) + ": " + what);
}

const json& ObjectReader::required(std::string_view key) {
  auto it = j_.find(key);
  if (it == j_.end()) fail(key, "missing field");
  seen_.emplace(key);
  return *it;
}

const json* ObjectReader::optional(std::string_view key) {
  auto it = j_.find(key);
  if (it == j_.end()) return nullptr;
  seen_.emplace(key);
  return it->is_null() ? nullptr : &*it;
}

std::string ObjectReader::str(std::string_view key) {
  const auto& v = required(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string ObjectReader::str_or(std::string_view key, std::string fallback) {
  const auto* v = optional(key);
  if (!v) return fallback;
  if (!v->is_string()) fail(key, "expected a string");
  return v->get<std::string>();
}

std::int64_t ObjectReader::integer(std::string_view key) {
  const auto& v = required(key);
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<std::int64_t>();
}

bool ObjectReader::boolean(std::string_view key) {
  const auto& v = required(key);
  if (!v.is_boolean()) fail(key, "expected a boolean");
  return v.get<bool>();
}

std::vector<std::string> ObjectReader::strings(std::string_view key) {
  const auto& v = array(key);
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) fail(key, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

const json& ObjectReader::array(std::string_view key) {
  const auto& v = required(key);
  if (!v.is_array()) fail(key, "expected an array");
  return v;
}

const json& ObjectReader::object(std::string_view key) {
  const auto& v = required(key);
  if (!v.is_object()) fail(key, "expected an object");
  return v;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.count(it.key())) fail(it.key(), "unknown field");
  }
}

namespace {

template <typename E>
E enum_field(ObjectReader& r, std::string_view key, std::optional<E> (*parse)(std::string_view) noexcept) {
  const auto text = r.str(key);
  auto v = parse(text);
  if (!v) r.fail(key, "unknown value '" + text + "'");
  return *v;
}

std::string item_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

CompletionCriteria read_completion(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  CompletionCriteria c;
  c.rule = enum_field(r, "rule", completion_rule_from);
  const bool numeric = c.rule == CompletionRule::MinQuestionsCorrect ||
                       c.rule == CompletionRule::MinWords ||
                       c.rule == CompletionRule::MinChatTurns;
  if (numeric) c.threshold = r.integer("n");
  r.finish();
  return c;
}

SubtaskDef read_subtask(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SubtaskDef s;
  s.id = r.str("id");
  s.kind = enum_field(r, "kind", subtask_kind_from);
  s.title = r.str("title");
  s.description = r.str("description");
  s.estimated_minutes = r.integer("estimated_minutes");
  s.content_ref = r.str("content_ref");
  s.completion = read_completion(r.required("completion"), r.child("completion"));
  s.depends_on = r.strings("depends_on");
  r.finish();
  return s;
}

TaskDef read_task(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  TaskDef t;
  t.id = r.str("id");
  t.title = r.str("title");
  t.description = r.str("description");
  t.depends_on = r.strings("depends_on");
  const auto& subs = r.array("subtasks");
  for (std::size_t i = 0; i < subs.size(); ++i) {
    t.subtasks.push_back(read_subtask(subs[i], item_path(r.child("subtasks"), i)));
  }
  r.finish();
  return t;
}

QuestionDef read_question(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  QuestionDef q;
  q.id = r.str("id");
  q.form = enum_field(r, "form", question_form_from);
  q.stem = r.str("stem");
  q.topic = r.str("topic");
  q.concept_tags = r.strings("concept_tags");
  switch (q.form) {
    case QuestionForm::Matching: {
      const auto& pairs = r.array("pairs");
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        ObjectReader pr(pairs[i], item_path(r.child("pairs"), i));
        q.pairs.push_back({pr.str("left"), pr.str("right")});
        pr.finish();
      }
      break;
    }
    case QuestionForm::MultipleChoice: {
      const auto& opts = r.array("options");
      for (std::size_t i = 0; i < opts.size(); ++i) {
        ObjectReader orr(opts[i], item_path(r.child("options"), i));
        q.options.push_back({orr.str("text"), orr.boolean("correct")});
        orr.finish();
      }
      break;
    }
    case QuestionForm::Ordering:
      q.ordered_items = r.strings("items");
      break;
    case QuestionForm::TrueFalse:
      q.statement = r.str("statement");
      q.truth = r.boolean("truth");
      break;
  }
  r.finish();
  return q;
}

PaperDoc read_paper(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PaperDoc p;
  p.id = r.str("id");
  p.kind = enum_field(r, "kind", doc_kind_from);
  p.title = r.str("title");
  p.content = r.str("content");
  p.question = r.str_or("question", "");
  r.finish();
  return p;
}

PersonaDef read_persona(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PersonaDef p;
  p.id = r.str("id");
  p.professor_name = r.str("professor_name");
  p.department = r.str("department");
  p.university = r.str("university");
  p.research_field = r.str("research_field");
  p.research_directions = r.strings("research_directions");
  r.finish();
  return p;
}

PromptTemplateDef read_prompt(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PromptTemplateDef p;
  p.system_template = r.str("system_template");
  p.user_template = r.str("user_template");
  p.placeholders = r.strings("placeholders");
  if (const auto* limit = r.optional("reply_word_limit")) {
    if (!limit->is_number_integer()) r.fail("reply_word_limit", "expected an integer");
    p.reply_word_limit = limit->get<std::int64_t>();
  }
  r.finish();
  return p;
}

}  // namespace

ContentPack pack_from_json(const json& doc) {
  ObjectReader r(doc, "$");
  ContentPack pack;
  pack.pack_id = r.str("pack_id");
  pack.stages = r.strings("stages");
  const auto& tasks = r.array("tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    pack.tasks.push_back(read_task(tasks[i], item_path("$.tasks", i)));
  }
  const auto& questions = r.array("questions");
  for (std::size_t i = 0; i < questions.size(); ++i) {
    pack.questions.push_back(read_question(questions[i], item_path("$.questions", i)));
  }
  const auto& papers = r.array("papers");
  for (std::size_t i = 0; i < papers.size(); ++i) {
    pack.papers.push_back(read_paper(papers[i], item_path("$.papers", i)));
  }
  const auto& personas = r.array("personas");
  for (std::size_t i = 0; i < personas.size(); ++i) {
    pack.personas.push_back(read_persona(personas[i], item_path("$.personas", i)));
  }
  const auto& prompts = r.object("prompts");
  for (auto it = prompts.begin(); it != prompts.end(); ++it) {
    auto agent = agent_kind_from(it.key());
    if (!agent) raise(ErrorCode::SchemaError, "$.prompts." + it.key() + ": unknown agent");
    pack.prompts.emplace(*agent, read_prompt(it.value(), "$.prompts." + it.key()));
  }
  {
    ObjectReader er(r.object("enhancement"), "$.enhancement");
    pack.enhancement.srl_enabled = er.boolean("srl_enabled");
    pack.enhancement.monitor_sampling_seconds = er.integer("monitor_sampling_seconds");
    pack.enhancement.quiz_hint_policy = enum_field(er, "quiz_hint_policy", hint_policy_from);
    er.finish();
  }
  r.finish();
  pack.reindex();
  return pack;
}

json pack_to_json(const ContentPack& pack) {
  json tasks = json::array();
  for (const auto& t : pack.tasks) {
    json subs = json::array();
    for (const auto& s : t.subtasks) {
      json completion = {{"rule", to_string(s.completion.rule)}};
      if (s.completion.rule == CompletionRule::MinQuestionsCorrect ||
          s.completion.rule == CompletionRule::MinWords ||
          s.completion.rule == CompletionRule::MinChatTurns) {
        completion["n"] = s.completion.threshold;
      }
      subs.push_back({{"id", s.id},
                      {"kind", to_string(s.kind)},
                      {"title", s.title},
                      {"description", s.description},
                      {"estimated_minutes", s.estimated_minutes},
                      {"content_ref", s.content_ref},
                      {"completion", completion},
                      {"depends_on", s.depends_on}});
    }
    tasks.push_back({{"id", t.id},
                     {"title", t.title},
                     {"description", t.description},
                     {"depends_on", t.depends_on},
                     {"subtasks", subs}});
  }
  json questions = json::array();
  for (const auto& q : pack.questions) {
    json jq = {{"id", q.id},
               {"form", to_string(q.form)},
               {"stem", q.stem},
               {"topic", q.topic},
               {"concept_tags", q.concept_tags}};
    switch (q.form) {
      case QuestionForm::Matching: {
        json pairs = json::array();
        for (const auto& p : q.pairs) pairs.push_back({{"left", p.left}, {"right", p.right}});
        jq["pairs"] = pairs;
        break;
      }
      case QuestionForm::MultipleChoice: {
        json opts = json::array();
        for (const auto& o : q.options) opts.push_back({{"text", o.text}, {"correct", o.correct}});
        jq["options"] = opts;
        break;
      }
      case QuestionForm::Ordering:
        jq["items"] = q.ordered_items;
        break;
      case QuestionForm::TrueFalse:
        jq["statement"] = q.statement;
        jq["truth"] = q.truth;
        break;
    }
    questions.push_back(std::move(jq));
  }
  json papers = json::array();
  for (const auto& p : pack.papers) {
    json jp = {{"id", p.id}, {"kind", to_string(p.kind)}, {"title", p.title}, {"content", p.content}};
    if (!p.question.empty()) jp["question"] = p.question;
    papers.push_back(std::move(jp));
  }
  json personas = json::array();
  for (const auto& p : pack.personas) {
    personas.push_back({{"id", p.id},
                        {"professor_name", p.professor_name},
                        {"department", p.department},
                        {"university", p.university},
                        {"research_field", p.research_field},
                        {"research_directions", p.research_directions}});
  }
  json prompts = json::object();
  for (const auto& [agent, tpl] : pack.prompts) {
    json jp = {{"system_template", tpl.system_template},
               {"user_template", tpl.user_template},
               {"placeholders", tpl.placeholders}};
    if (tpl.reply_word_limit) jp["reply_word_limit"] = *tpl.reply_word_limit;
    prompts[std::string(to_string(agent))] = std::move(jp);
  }
  return {{"pack_id", pack.pack_id},
          {"stages", pack.stages},
          {"tasks", tasks},
          {"questions", questions},
          {"papers", papers},
          {"personas", personas},
          {"prompts", prompts},
          {"enhancement",
           {{"srl_enabled", pack.enhancement.srl_enabled},
            {"monitor_sampling_seconds", pack.enhancement.monitor_sampling_seconds},
            {"quiz_hint_policy", to_string(pack.enhancement.quiz_hint_policy)}}}};
}

ContentPack load_pack_from_string(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ParseError, std::string("malformed pack document: ") + e.what());
  }
  ContentPack pack = pack_from_json(doc);
  const auto report = validate_pack(pack);
  if (!report.ok()) {
    const bool dangling = std::any_of(report.findings.begin(), report.findings.end(),
                                      [](const Finding& f) { return f.kind == FindingKind::DanglingRef; });
    raise(dangling ? ErrorCode::DanglingRef : ErrorCode::SchemaError,
          "invalid pack '" + pack.pack_id + "': " + report.summary());
  }
  return pack;
}

ContentPack load_pack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::ParseError, "cannot read pack file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_pack_from_string(buf.str());
}

}  // namespace srl
