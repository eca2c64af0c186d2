#include "srl/content.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "srl/error.hpp"
#include "srl/text.hpp"

namespace srl {

std::string_view to_string(SubtaskKind k) noexcept {
  switch (k) {
    case SubtaskKind::Knowledge: return "knowledge";
    case SubtaskKind::Quiz: return "quiz";
    case SubtaskKind::Paper: return "paper";
    case SubtaskKind::Review: return "review";
    case SubtaskKind::Discussion: return "discussion";
    case SubtaskKind::Insight: return "insight";
    case SubtaskKind::WritingGoal: return "writing_goal";
    case SubtaskKind::Report: return "report";
  }
  return "?";
}

std::string_view to_string(CompletionRule r) noexcept {
  switch (r) {
    case CompletionRule::AllQuestionsCorrect: return "all_questions_correct";
    case CompletionRule::MinQuestionsCorrect: return "min_questions_correct";
    case CompletionRule::MinWords: return "min_words";
    case CompletionRule::SummarySubmitted: return "summary_submitted";
    case CompletionRule::MinChatTurns: return "min_chat_turns";
    case CompletionRule::GoalRecorded: return "goal_recorded";
  }
  return "?";
}

std::string_view to_string(QuestionForm f) noexcept {
  switch (f) {
    case QuestionForm::Matching: return "matching";
    case QuestionForm::MultipleChoice: return "multiple_choice";
    case QuestionForm::Ordering: return "ordering";
    case QuestionForm::TrueFalse: return "true_false";
  }
  return "?";
}

std::string_view to_string(DocKind k) noexcept {
  switch (k) {
    case DocKind::Knowledge: return "knowledge";
    case DocKind::Paper: return "paper";
    case DocKind::Brief: return "brief";
  }
  return "?";
}

std::string_view to_string(AgentKind k) noexcept {
  switch (k) {
    case AgentKind::Planning: return "planning";
    case AgentKind::QuizTutor: return "quiz_tutor";
    case AgentKind::PaperReview: return "paper_review";
    case AgentKind::Chatting: return "chatting";
    case AgentKind::Writing: return "writing";
    case AgentKind::Reflection: return "reflection";
  }
  return "?";
}

std::string_view to_string(HintPolicy p) noexcept {
  return p == HintPolicy::OnIncorrect ? "on_incorrect" : "off";
}

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const E (&values)[N]) noexcept {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<SubtaskKind> subtask_kind_from(std::string_view s) noexcept {
  return parse_enum(s, kAllSubtaskKinds);
}

std::optional<CompletionRule> completion_rule_from(std::string_view s) noexcept {
  constexpr CompletionRule all[] = {
      CompletionRule::AllQuestionsCorrect, CompletionRule::MinQuestionsCorrect,
      CompletionRule::MinWords,            CompletionRule::SummarySubmitted,
      CompletionRule::MinChatTurns,        CompletionRule::GoalRecorded};
  return parse_enum(s, all);
}

std::optional<QuestionForm> question_form_from(std::string_view s) noexcept {
  constexpr QuestionForm all[] = {QuestionForm::Matching, QuestionForm::MultipleChoice,
                                  QuestionForm::Ordering, QuestionForm::TrueFalse};
  return parse_enum(s, all);
}

std::optional<DocKind> doc_kind_from(std::string_view s) noexcept {
  constexpr DocKind all[] = {DocKind::Knowledge, DocKind::Paper, DocKind::Brief};
  return parse_enum(s, all);
}

std::optional<AgentKind> agent_kind_from(std::string_view s) noexcept {
  return parse_enum(s, kAllAgentKinds);
}

std::optional<HintPolicy> hint_policy_from(std::string_view s) noexcept {
  constexpr HintPolicy all[] = {HintPolicy::OnIncorrect, HintPolicy::Off};
  return parse_enum(s, all);
}

bool rule_compatible(SubtaskKind kind, CompletionRule rule) noexcept {
  using R = CompletionRule;
  switch (kind) {
    case SubtaskKind::Knowledge:
    case SubtaskKind::Paper:
      return rule == R::SummarySubmitted;
    case SubtaskKind::Quiz:
      return rule == R::AllQuestionsCorrect || rule == R::MinQuestionsCorrect;
    case SubtaskKind::Review:
    case SubtaskKind::Insight:
    case SubtaskKind::Report:
      return rule == R::SummarySubmitted || rule == R::MinWords;
    case SubtaskKind::Discussion:
      return rule == R::MinChatTurns;
    case SubtaskKind::WritingGoal:
      return rule == R::GoalRecorded;
  }
  return false;
}

std::optional<SubtaskKind> paired_prerequisite(SubtaskKind kind) noexcept {
  switch (kind) {
    case SubtaskKind::Quiz: return SubtaskKind::Knowledge;
    case SubtaskKind::Review: return SubtaskKind::Paper;
    case SubtaskKind::Insight: return SubtaskKind::Discussion;
    case SubtaskKind::Report: return SubtaskKind::WritingGoal;
    default: return std::nullopt;
  }
}

std::vector<std::string_view> quality_indicators(SubtaskKind kind) {
  switch (kind) {
    case SubtaskKind::Quiz: return {"quiz_correct_count", "quiz_question_count"};
    case SubtaskKind::Discussion: return {"chat_turns"};
    default: return {"word_count"};
  }
}

std::optional<std::size_t> QuestionDef::correct_option() const {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (!options[i].correct) continue;
    if (found) return std::nullopt;
    found = i;
  }
  return found;
}

std::optional<std::int64_t> agent_word_budget(AgentKind agent) noexcept {
  switch (agent) {
    case AgentKind::QuizTutor: return 20;
    case AgentKind::Reflection:
    case AgentKind::PaperReview: return 30;
    case AgentKind::Writing: return 50;
    default: return std::nullopt;
  }
}

std::vector<std::string> template_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = text.find('{', i)) != std::string_view::npos) {
    std::size_t j = i + 1;
    auto ident_start = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9'); };
    if (j < text.size() && ident_start(text[j])) {
      while (j < text.size() && ident_char(text[j])) ++j;
      if (j < text.size() && text[j] == '}') {
        std::string name(text.substr(i + 1, j - i - 1));
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
        i = j + 1;
        continue;
      }
    }
    ++i;
  }
  return out;
}

const std::vector<std::string>& supported_placeholders(AgentKind agent) {
  static const std::map<AgentKind, std::vector<std::string>> table = {
      {AgentKind::Planning, {"chatHistory", "subtaskList"}},
      {AgentKind::Reflection, {"chatHistory", "taskTitle", "taskDescription", "subtaskOutcomes"}},
      {AgentKind::QuizTutor, {"chatHistory", "questionType", "questionDetails"}},
      {AgentKind::Chatting,
       {"chatHistory", "professorName", "department", "university", "researchField",
        "specificArea", "researchDirections", "userQuestion"}},
      {AgentKind::PaperReview, {"chatHistory", "combinedInput"}},
      {AgentKind::Writing, {"chatHistory", "referenceContent", "title", "body", "question"}},
  };
  return table.at(agent);
}

bool ContentPack::operator==(const ContentPack& o) const {
  return pack_id == o.pack_id && stages == o.stages && tasks == o.tasks &&
         questions == o.questions && papers == o.papers && personas == o.personas &&
         prompts == o.prompts && enhancement == o.enhancement;
}

void ContentPack::reindex() {
  subtask_index_.clear();
  task_index_.clear();
  question_index_.clear();
  paper_index_.clear();
  persona_index_.clear();
  declaration_.clear();
  std::size_t decl = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    task_index_.try_emplace(tasks[t].id, t);
    for (std::size_t s = 0; s < tasks[t].subtasks.size(); ++s) {
      const auto& id = tasks[t].subtasks[s].id;
      subtask_index_.try_emplace(id, SubtaskLocation{t, s});
      declaration_.try_emplace(id, decl++);
    }
  }
  for (std::size_t i = 0; i < questions.size(); ++i) question_index_.try_emplace(questions[i].id, i);
  for (std::size_t i = 0; i < papers.size(); ++i) paper_index_.try_emplace(papers[i].id, i);
  for (std::size_t i = 0; i < personas.size(); ++i) persona_index_.try_emplace(personas[i].id, i);
}

const SubtaskDef* ContentPack::find_subtask(std::string_view id) const {
  auto it = subtask_index_.find(std::string(id));
  if (it == subtask_index_.end()) return nullptr;
  return &tasks[it->second.task].subtasks[it->second.subtask];
}

const TaskDef* ContentPack::find_task(std::string_view id) const {
  auto it = task_index_.find(std::string(id));
  return it == task_index_.end() ? nullptr : &tasks[it->second];
}

const TaskDef* ContentPack::task_of(std::string_view subtask_id) const {
  auto it = subtask_index_.find(std::string(subtask_id));
  return it == subtask_index_.end() ? nullptr : &tasks[it->second.task];
}

const QuestionDef* ContentPack::find_question(std::string_view id) const {
  auto it = question_index_.find(std::string(id));
  return it == question_index_.end() ? nullptr : &questions[it->second];
}

const PaperDoc* ContentPack::find_paper(std::string_view id) const {
  auto it = paper_index_.find(std::string(id));
  return it == paper_index_.end() ? nullptr : &papers[it->second];
}

const PersonaDef* ContentPack::find_persona(std::string_view id) const {
  auto it = persona_index_.find(std::string(id));
  return it == persona_index_.end() ? nullptr : &personas[it->second];
}

std::vector<const SubtaskDef*> ContentPack::all_subtasks() const {
  std::vector<const SubtaskDef*> out;
  for (const auto& t : tasks) {
    for (const auto& s : t.subtasks) out.push_back(&s);
  }
  return out;
}

std::size_t ContentPack::subtask_count() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.subtasks.size();
  return n;
}

std::optional<std::size_t> ContentPack::declaration_index(std::string_view subtask_id) const {
  auto it = declaration_.find(std::string(subtask_id));
  if (it == declaration_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> split_question_refs(std::string_view content_ref) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= content_ref.size()) {
    auto comma = content_ref.find(',', start);
    auto piece = trim(content_ref.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start));
    out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<const QuestionDef*> ContentPack::quiz_questions(const SubtaskDef& quiz) const {
  std::vector<const QuestionDef*> out;
  for (const auto& ref : split_question_refs(quiz.content_ref)) {
    if (const auto* q = find_question(ref)) out.push_back(q);
  }
  return out;
}

std::vector<std::string> ContentPack::effective_dependencies(std::string_view subtask_id) const {
  std::vector<std::string> out;
  const auto* sub = find_subtask(subtask_id);
  const auto* task = task_of(subtask_id);
  if (!sub || !task) return out;
  out = sub->depends_on;
  for (const auto& dep_task_id : task->depends_on) {
    if (const auto* dep = find_task(dep_task_id)) {
      for (const auto& s : dep->subtasks) out.push_back(s.id);
    }
  }
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    if (i) os << "; ";
    os << findings[i].path << ": " << findings[i].message;
  }
  return os.str();
}

namespace {

// Nodes lying on a cycle, grouped by strongly connected component; groups and
// members follow declaration order. `edges[v]` lists the prerequisites of v.
std::vector<std::vector<std::size_t>> cyclic_components(
    const std::vector<std::vector<std::size_t>>& edges) {
  const std::size_t n = edges.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack = edges[s];
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (reach[s][v]) continue;
      reach[s][v] = true;
      for (auto w : edges[v]) stack.push_back(w);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> placed(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (placed[v] || !reach[v][v]) continue;
    std::vector<std::size_t> group;
    for (std::size_t w = v; w < n; ++w) {
      if (!placed[w] && reach[w][w] && reach[v][w] && reach[w][v]) {
        group.push_back(w);
        placed[w] = true;
      }
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

// Kahn's algorithm; among ready nodes the smallest index goes first. Returns
// nullopt when a cycle blocks completion.
std::optional<std::vector<std::size_t>> stable_toposort(
    const std::vector<std::vector<std::size_t>>& prereqs) {
  const std::size_t n = prereqs.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> dependents(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::set<std::size_t> unique(prereqs[v].begin(), prereqs[v].end());
    indegree[v] = unique.size();
    for (auto u : unique) dependents[u].push_back(v);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : dependents[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

class Validator {
 public:
  explicit Validator(const ContentPack& pack) : pack_(pack) {}

  ValidationReport run() {
    check_header();
    check_tasks();
    check_questions();
    check_papers();
    check_personas();
    check_prompts();
    check_enhancement();
    return std::move(report_);
  }

 private:
  void add(FindingKind kind, std::string path, std::string message) {
    report_.findings.push_back({kind, std::move(path), std::move(message)});
  }

  template <typename Range, typename Key>
  void check_unique(const Range& items, Key key, const std::string& ns) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string& id = key(items[i]);
      const auto path = ns + "[" + std::to_string(i) + "]";
      if (id.empty()) add(FindingKind::Schema, path + ".id", "identifier is empty");
      if (!seen.insert(id).second) {
        add(FindingKind::Duplicate, path + ".id", "duplicate identifier '" + id + "'");
      }
    }
  }

  void check_header() {
    if (pack_.pack_id.empty()) add(FindingKind::Schema, "pack_id", "pack_id is empty");
    const std::vector<std::string> canonical(std::begin(kCanonicalStages),
                                             std::end(kCanonicalStages));
    if (pack_.stages != canonical) {
      add(FindingKind::Schema, "stages",
          "stages must be exactly introduction, planning, task_process, review");
    }
  }

  void check_tasks() {
    if (pack_.tasks.empty()) add(FindingKind::Schema, "tasks", "task list is empty");
    check_unique(pack_.tasks, [](const TaskDef& t) -> const std::string& { return t.id; },
                 "tasks");

    std::set<std::string> subtask_ids;
    for (std::size_t t = 0; t < pack_.tasks.size(); ++t) {
      const auto& task = pack_.tasks[t];
      const auto tpath = "tasks[" + std::to_string(t) + "]";
      if (task.title.empty()) add(FindingKind::Schema, tpath + ".title", "title is empty");
      if (task.subtasks.empty()) {
        add(FindingKind::Schema, tpath + ".subtasks", "task has no subtasks");
      }
      for (const auto& dep : task.depends_on) {
        if (!pack_.find_task(dep)) {
          add(FindingKind::DanglingRef, tpath + ".depends_on",
              "unknown task '" + dep + "'");
        }
      }
      for (std::size_t s = 0; s < task.subtasks.size(); ++s) {
        const auto& sub = task.subtasks[s];
        const auto spath = tpath + ".subtasks[" + std::to_string(s) + "]";
        if (sub.id.empty()) add(FindingKind::Schema, spath + ".id", "identifier is empty");
        if (!subtask_ids.insert(sub.id).second) {
          add(FindingKind::Duplicate, spath + ".id", "duplicate subtask id '" + sub.id + "'");
        }
        check_subtask(task, sub, spath);
      }
      check_subtask_cycles(task, tpath);
    }
    check_task_cycles();
  }

  void check_subtask(const TaskDef& task, const SubtaskDef& sub, const std::string& path) {
    if (sub.title.empty()) add(FindingKind::Schema, path + ".title", "title is empty");
    if (sub.estimated_minutes <= 0) {
      add(FindingKind::Schema, path + ".estimated_minutes", "estimated_minutes must be positive");
    }
    // dependencies stay within the owning task; cross-task ordering goes
    // through task-level depends_on
    for (const auto& dep : sub.depends_on) {
      const bool local = std::any_of(task.subtasks.begin(), task.subtasks.end(),
                                     [&](const SubtaskDef& o) { return o.id == dep; });
      if (!local) {
        add(FindingKind::DanglingRef, path + ".depends_on",
            "dependency '" + dep + "' is not a subtask of task '" + task.id + "'");
      }
    }
    check_content_ref(sub, path);
    check_pairing(task, sub, path);
    check_completion(sub, path);
  }

  void check_content_ref(const SubtaskDef& sub, const std::string& path) {
    const auto rpath = path + ".content_ref";
    auto expect_doc = [&](DocKind kind) {
      const auto* doc = pack_.find_paper(sub.content_ref);
      if (!doc) {
        add(FindingKind::DanglingRef, rpath, "unknown document '" + sub.content_ref + "'");
      } else if (doc->kind != kind) {
        add(FindingKind::DanglingRef, rpath,
            "document '" + sub.content_ref + "' is a " + std::string(to_string(doc->kind)) +
                " document, expected " + std::string(to_string(kind)));
      }
    };
    switch (sub.kind) {
      case SubtaskKind::Quiz: {
        const auto refs = split_question_refs(sub.content_ref);
        for (const auto& ref : refs) {
          if (!pack_.find_question(ref)) {
            add(FindingKind::DanglingRef, rpath, "unknown question '" + ref + "'");
          }
        }
        break;
      }
      case SubtaskKind::Discussion:
      case SubtaskKind::Insight:
        if (!pack_.find_persona(sub.content_ref)) {
          add(FindingKind::DanglingRef, rpath, "unknown persona '" + sub.content_ref + "'");
        }
        break;
      case SubtaskKind::Knowledge:
        expect_doc(DocKind::Knowledge);
        break;
      case SubtaskKind::Paper:
      case SubtaskKind::Review:
        expect_doc(DocKind::Paper);
        break;
      case SubtaskKind::WritingGoal:
      case SubtaskKind::Report:
        expect_doc(DocKind::Brief);
        break;
    }
  }

  void check_pairing(const TaskDef& task, const SubtaskDef& sub, const std::string& path) {
    const auto needed = paired_prerequisite(sub.kind);
    if (!needed) return;
    const bool paired = std::any_of(sub.depends_on.begin(), sub.depends_on.end(), [&](auto& d) {
      for (const auto& o : task.subtasks) {
        if (o.id == d && o.kind == *needed) return true;
      }
      return false;
    });
    if (!paired) {
      add(FindingKind::Pairing, path + ".depends_on",
          std::string(to_string(sub.kind)) + " subtask must depend on a " +
              std::string(to_string(*needed)) + " subtask");
    }
  }

  void check_completion(const SubtaskDef& sub, const std::string& path) {
    const auto cpath = path + ".completion";
    const auto rule = sub.completion.rule;
    if (!rule_compatible(sub.kind, rule)) {
      add(FindingKind::Schema, cpath,
          "rule " + std::string(to_string(rule)) + " is not valid for a " +
              std::string(to_string(sub.kind)) + " subtask");
    }
    const bool numeric = rule == CompletionRule::MinQuestionsCorrect ||
                         rule == CompletionRule::MinWords || rule == CompletionRule::MinChatTurns;
    if (numeric && sub.completion.threshold <= 0) {
      add(FindingKind::Schema, cpath + ".n", "threshold must be positive");
    }
    if (rule == CompletionRule::MinQuestionsCorrect && sub.kind == SubtaskKind::Quiz) {
      const auto count = static_cast<std::int64_t>(split_question_refs(sub.content_ref).size());
      if (sub.completion.threshold > count) {
        add(FindingKind::Schema, cpath + ".n",
            "threshold exceeds the quiz's " + std::to_string(count) + " questions");
      }
    }
  }

  void check_subtask_cycles(const TaskDef& task, const std::string& tpath) {
    std::map<std::string, std::size_t> local;
    for (std::size_t i = 0; i < task.subtasks.size(); ++i) local.try_emplace(task.subtasks[i].id, i);
    std::vector<std::vector<std::size_t>> edges(task.subtasks.size());
    for (std::size_t i = 0; i < task.subtasks.size(); ++i) {
      for (const auto& d : task.subtasks[i].depends_on) {
        if (auto it = local.find(d); it != local.end()) edges[i].push_back(it->second);
      }
    }
    for (const auto& group : cyclic_components(edges)) {
      std::vector<std::string> names;
      for (auto i : group) names.push_back(task.subtasks[i].id);
      add(FindingKind::Cycle, tpath + ".subtasks", "dependency cycle at subtasks " + join(names, ","));
    }
  }

  void check_task_cycles() {
    std::vector<std::vector<std::size_t>> edges(pack_.tasks.size());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < pack_.tasks.size(); ++i) index.try_emplace(pack_.tasks[i].id, i);
    for (std::size_t i = 0; i < pack_.tasks.size(); ++i) {
      for (const auto& d : pack_.tasks[i].depends_on) {
        if (auto it = index.find(d); it != index.end()) edges[i].push_back(it->second);
      }
    }
    for (const auto& group : cyclic_components(edges)) {
      std::vector<std::string> names;
      for (auto i : group) names.push_back(pack_.tasks[i].id);
      add(FindingKind::Cycle, "tasks", "dependency cycle at tasks " + join(names, ","));
    }
  }

  void check_questions() {
    check_unique(pack_.questions,
                 [](const QuestionDef& q) -> const std::string& { return q.id; }, "questions");
    for (std::size_t i = 0; i < pack_.questions.size(); ++i) {
      const auto& q = pack_.questions[i];
      const auto path = "questions[" + std::to_string(i) + "]";
      if (q.stem.empty()) add(FindingKind::Schema, path + ".stem", "stem is empty");
      if (q.topic.empty()) add(FindingKind::Schema, path + ".topic", "topic is empty");
      switch (q.form) {
        case QuestionForm::MultipleChoice: {
          if (q.options.size() < 2) {
            add(FindingKind::Schema, path + ".options", "needs at least two options");
          }
          const auto correct = std::count_if(q.options.begin(), q.options.end(),
                                             [](const ChoiceOption& o) { return o.correct; });
          if (correct != 1) {
            add(FindingKind::Schema, path + ".options",
                "exactly one option must be correct, found " + std::to_string(correct));
          }
          break;
        }
        case QuestionForm::Matching: {
          if (q.pairs.size() < 2) add(FindingKind::Schema, path + ".pairs", "needs at least two pairs");
          std::set<std::string> lefts, rights;
          for (const auto& p : q.pairs) {
            if (p.left.empty() || p.right.empty() || !lefts.insert(p.left).second ||
                !rights.insert(p.right).second) {
              add(FindingKind::Schema, path + ".pairs", "pairs must be non-empty and unique");
              break;
            }
          }
          break;
        }
        case QuestionForm::Ordering: {
          if (q.ordered_items.size() < 2) {
            add(FindingKind::Schema, path + ".items", "needs at least two items");
          }
          std::set<std::string> seen(q.ordered_items.begin(), q.ordered_items.end());
          if (seen.size() != q.ordered_items.size() || seen.count("")) {
            add(FindingKind::Schema, path + ".items", "items must be non-empty and unique");
          }
          break;
        }
        case QuestionForm::TrueFalse:
          if (q.statement.empty()) add(FindingKind::Schema, path + ".statement", "statement is empty");
          break;
      }
    }
  }

  void check_papers() {
    check_unique(pack_.papers, [](const PaperDoc& p) -> const std::string& { return p.id; },
                 "papers");
    for (std::size_t i = 0; i < pack_.papers.size(); ++i) {
      const auto& p = pack_.papers[i];
      const auto path = "papers[" + std::to_string(i) + "]";
      if (p.title.empty()) add(FindingKind::Schema, path + ".title", "title is empty");
      if (p.content.empty()) add(FindingKind::Schema, path + ".content", "content is empty");
    }
  }

  void check_personas() {
    check_unique(pack_.personas,
                 [](const PersonaDef& p) -> const std::string& { return p.id; }, "personas");
    for (std::size_t i = 0; i < pack_.personas.size(); ++i) {
      const auto& p = pack_.personas[i];
      const auto path = "personas[" + std::to_string(i) + "]";
      const std::pair<const char*, const std::string*> fields[] = {
          {"professor_name", &p.professor_name},
          {"department", &p.department},
          {"university", &p.university},
          {"research_field", &p.research_field}};
      for (const auto& [name, value] : fields) {
        if (value->empty()) add(FindingKind::Schema, path + "." + name, "field is empty");
      }
      if (p.research_directions.empty() ||
          std::any_of(p.research_directions.begin(), p.research_directions.end(),
                      [](const std::string& d) { return d.empty(); })) {
        add(FindingKind::Schema, path + ".research_directions",
            "research directions must be a non-empty list of non-empty strings");
      }
    }
  }

  void check_prompts() {
    for (const auto& [agent, tpl] : pack_.prompts) {
      const auto path = "prompts." + std::string(to_string(agent));
      const auto& supported = supported_placeholders(agent);
      std::vector<std::string> tokens = template_tokens(tpl.system_template);
      for (auto& t : template_tokens(tpl.user_template)) tokens.push_back(std::move(t));
      for (const auto& token : tokens) {
        if (std::find(tpl.placeholders.begin(), tpl.placeholders.end(), token) ==
            tpl.placeholders.end()) {
          add(FindingKind::Schema, path, "placeholder {" + token + "} is not declared");
        }
      }
      for (const auto& declared : tpl.placeholders) {
        if (std::find(supported.begin(), supported.end(), declared) == supported.end()) {
          add(FindingKind::Schema, path + ".placeholders",
              "placeholder {" + declared + "} cannot be supplied for this agent");
        }
      }
      const auto budget = agent_word_budget(agent);
      if (tpl.reply_word_limit != budget) {
        add(FindingKind::Schema, path + ".reply_word_limit",
            budget ? "reply word limit must be " + std::to_string(*budget)
                   : std::string("this agent has no reply word limit"));
      }
    }
  }

  void check_enhancement() {
    if (pack_.enhancement.monitor_sampling_seconds <= 0) {
      add(FindingKind::Schema, "enhancement.monitor_sampling_seconds", "must be positive");
    }
  }

  const ContentPack& pack_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_pack(const ContentPack& pack) { return Validator(pack).run(); }

std::vector<std::string> topological_order(const ContentPack& pack, std::string_view task_id) {
  const auto* task = pack.find_task(task_id);
  if (!task) raise(ErrorCode::UnknownTask, "unknown task '" + std::string(task_id) + "'");
  std::map<std::string, std::size_t> local;
  for (std::size_t i = 0; i < task->subtasks.size(); ++i) local.try_emplace(task->subtasks[i].id, i);
  std::vector<std::vector<std::size_t>> prereqs(task->subtasks.size());
  for (std::size_t i = 0; i < task->subtasks.size(); ++i) {
    for (const auto& d : task->subtasks[i].depends_on) {
      if (auto it = local.find(d); it != local.end()) prereqs[i].push_back(it->second);
    }
  }
  auto order = stable_toposort(prereqs);
  if (!order) raise(ErrorCode::CycleError, "dependency cycle in task '" + task->id + "'");
  std::vector<std::string> out;
  for (auto i : *order) out.push_back(task->subtasks[i].id);
  return out;
}

std::vector<std::string> global_order(const ContentPack& pack) {
  const auto subs = pack.all_subtasks();
  std::vector<std::vector<std::size_t>> prereqs(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    for (const auto& d : pack.effective_dependencies(subs[i]->id)) {
      if (auto idx = pack.declaration_index(d)) prereqs[i].push_back(*idx);
    }
  }
  auto order = stable_toposort(prereqs);
  if (!order) raise(ErrorCode::CycleError, "dependency cycle in pack '" + pack.pack_id + "'");
  std::vector<std::string> out;
  for (auto i : *order) out.push_back(subs[i]->id);
  return out;
}

}  // namespace srl
