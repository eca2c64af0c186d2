#include "srl/view.hpp"

#include <algorithm>

#include "srl/events.hpp"
#include "srl/orchestrator.hpp"
#include "srl/srl_layer.hpp"

namespace srl {

using nlohmann::json;

namespace {

json question_view(const QuestionDef& q) {
  json j{{"id", q.id}, {"form", std::string(to_string(q.form))}, {"stem", q.stem}, {"topic", q.topic}};
  switch (q.form) {
    case QuestionForm::Matching: {
      std::vector<std::string> left, right;
      for (const auto& p : q.pairs) {
        left.push_back(p.left);
        right.push_back(p.right);
      }
      std::sort(right.begin(), right.end());
      j["left"] = left;
      j["right"] = right;
      break;
    }
    case QuestionForm::MultipleChoice: {
      json opts = json::array();
      for (const auto& o : q.options) opts.push_back(o.text);
      j["options"] = std::move(opts);
      break;
    }
    case QuestionForm::Ordering: {
      auto items = q.ordered_items;
      std::sort(items.begin(), items.end());
      j["items"] = items;
      break;
    }
    case QuestionForm::TrueFalse:
      j["statement"] = q.statement;
      break;
  }
  return j;
}

json doc_view(const PaperDoc* doc) {
  if (!doc) return nullptr;
  json j{{"id", doc->id}, {"kind", std::string(to_string(doc->kind))}, {"title", doc->title},
         {"content", doc->content}};
  if (!doc->question.empty()) j["question"] = doc->question;
  return j;
}

}  // namespace

json subtask_content(const ContentPack& pack, const SubtaskDef& sub) {
  switch (sub.kind) {
    case SubtaskKind::Quiz: {
      json qs = json::array();
      for (const auto* q : pack.quiz_questions(sub)) qs.push_back(question_view(*q));
      return json{{"questions", std::move(qs)}};
    }
    case SubtaskKind::Discussion:
    case SubtaskKind::Insight: {
      const auto* p = pack.find_persona(sub.content_ref);
      if (!p) return nullptr;
      return json{{"persona",
                   {{"professor_name", p->professor_name},
                    {"department", p->department},
                    {"university", p->university},
                    {"research_field", p->research_field},
                    {"research_directions", p->research_directions}}}};
    }
    default:
      return json{{"document", doc_view(pack.find_paper(sub.content_ref))}};
  }
}

json build_view(const TaskEngine& engine, const SessionState& s) {
  const auto& pack = engine.pack();
  const bool srl = s.condition == Condition::FullSrl && pack.enhancement.srl_enabled;
  json v;
  v["session_id"] = s.session_id;
  v["pack_id"] = s.pack_id;
  v["condition"] = std::string(to_string(s.condition));
  v["stage"] = std::string(to_string(s.stage));
  v["phase"] = std::string(to_string(current_phase(s.stage)));
  v["clock"] = s.clock;
  v["event_seq"] = s.event_seq;
  const auto next = engine.next_stage(s);
  v["next_stage"] = next ? json(std::string(to_string(*next))) : json(nullptr);
  v["can_advance"] = next.has_value() && engine.stage_gate_open(s);

  json tasks = json::array();
  for (const auto& t : pack.tasks) {
    json subs = json::array();
    for (const auto& sub : t.subtasks) {
      const auto st = s.status(sub.id);
      json e{{"id", sub.id},
             {"kind", std::string(to_string(sub.kind))},
             {"title", sub.title},
             {"description", sub.description},
             {"estimated_minutes", sub.estimated_minutes},
             {"status", std::string(to_string(st))}};
      if (st != SubtaskStatus::Locked) {
        e["completion_rule"] = std::string(to_string(sub.completion.rule));
        if (sub.completion.rule == CompletionRule::MinWords || sub.completion.rule == CompletionRule::MinChatTurns ||
            sub.completion.rule == CompletionRule::MinQuestionsCorrect) {
          e["threshold"] = sub.completion.threshold;
        }
        e["content"] = subtask_content(pack, sub);
        if (auto it = s.outcomes.find(sub.id); it != s.outcomes.end()) {
          e["time_spent_seconds"] = it->second.time_spent_seconds;
          e["attempts"] = it->second.attempts;
        }
      }
      subs.push_back(std::move(e));
    }
    tasks.push_back({{"id", t.id}, {"title", t.title}, {"description", t.description}, {"subtasks", std::move(subs)}});
  }
  v["tasks"] = std::move(tasks);
  v["available"] = engine.available_subtasks(s);

  json transcripts = json::object();
  for (const auto& [ch, t] : s.transcripts) transcripts[ch] = transcript_to_json(t);
  v["transcripts"] = std::move(transcripts);

  const auto m = monitor_snapshot(pack, s);
  v["monitor"] = {{"completion_rate", m.completion_rate},
                  {"attributed_seconds", m.attributed_seconds},
                  {"idle_seconds", m.idle_seconds},
                  {"session_seconds", m.session_seconds}};

  if (srl) {
    v["plan"] = s.plan ? plan_to_json(*s.plan) : json(nullptr);
    v["suggested_plan"] = s.suggested_plan ? plan_to_json(*s.suggested_plan) : json(nullptr);
    if (const auto budget = time_budget_view(s)) {
      json rows = json::array();
      for (const auto& b : budget->subtasks) {
        rows.push_back({{"subtask_id", b.subtask_id},
                        {"allocated_minutes", b.allocated_minutes},
                        {"consumed_seconds", b.consumed_seconds},
                        {"remaining_seconds", b.remaining_seconds}});
      }
      v["time_budget"] = {{"subtasks", std::move(rows)},
                          {"total_allocated_minutes", budget->total_allocated_minutes},
                          {"total_consumed_seconds", budget->total_consumed_seconds},
                          {"total_remaining_seconds", budget->total_remaining_seconds}};
    } else {
      v["time_budget"] = nullptr;
    }
    v["reflection"] = s.reflection ? json(*s.reflection) : json(nullptr);
  }
  return v;
}

}  // namespace srl
