#include <algorithm>

#include "srl/error.hpp"
#include "srl/orchestrator.hpp"
#include "srl/text.hpp"

namespace srl {

QuizHintText quiz_hint_text(const QuestionDef& q, const LearnerAnswer& attempt) {
  if (is_correct(q, attempt)) {
    raise(ErrorCode::CorrectAnswerError, "question '" + q.id + "' was answered correctly");
  }
  QuizHintText out;
  switch (q.form) {
    case QuestionForm::Matching: {
      std::vector<std::string> wrong;
      for (const auto& p : incorrect_connections(q, attempt)) wrong.push_back(p.left + " with " + p.right);
      out.question_type = "matching question";
      out.question_details = "Based on the concept category " + q.topic + " and the incorrect connections (" +
                             join(wrong, ", ") + ") I've made, please provide a targeted hint.";
      break;
    }
    case QuestionForm::MultipleChoice: {
      const auto idx = q.correct_option();
      if (!idx) raise(ErrorCode::InvalidPayload, "question '" + q.id + "' has no single correct option");
      out.question_type = "multiple choice";
      out.question_details = "Explain why \"" + q.options[*idx].text + "\" is the correct definition of " + q.topic;
      break;
    }
    case QuestionForm::Ordering: {
      const auto pos = first_ordering_error(q, attempt);
      const auto& items = std::get<std::vector<std::string>>(attempt.value);
      out.question_type = "ordering/sequencing";
      out.question_details = "Hint: " + items.at(pos.value_or(0)) +
                             " should be placed at a different position in the " + q.topic + " timeline.";
      break;
    }
    case QuestionForm::TrueFalse:
      out.question_type = "true/false";
      out.question_details = "Briefly explain why the statement " + q.statement + " is " +
                             (q.truth ? "true" : "false");
      break;
  }
  return out;
}

AgentContext quiz_context(const SessionState& s, const QuestionDef& q, const LearnerAnswer& attempt,
                          std::optional<std::string> subtask_id) {
  const auto text = quiz_hint_text(q, attempt);
  AgentContext ctx;
  ctx.stage = s.stage;
  ctx.phase = current_phase(s.stage);
  ctx.condition = s.condition;
  ctx.active_subtask = subtask_id;
  if (auto it = s.transcripts.find(channel_for(AgentKind::QuizTutor, subtask_id)); it != s.transcripts.end()) {
    ctx.history = it->second;
  }
  ctx.values["questionType"] = text.question_type;
  ctx.values["questionDetails"] = text.question_details;
  return ctx;
}

PromptBundle quiz_hint_request(const ContentPack& pack, const QuestionDef& q, const LearnerAnswer& attempt,
                               const ChatTranscript& history) {
  const auto text = quiz_hint_text(q, attempt);
  AgentContext ctx;
  ctx.stage = TaskStage::TaskProcess;
  ctx.phase = SrlPhase::Performance;
  ctx.history = history;
  ctx.values["questionType"] = text.question_type;
  ctx.values["questionDetails"] = text.question_details;
  return assemble_prompt(AgentKind::QuizTutor, ctx, pack);
}

std::string render_subtask_list(const ContentPack& pack) {
  std::string out;
  std::size_t n = 0;
  for (const auto* sub : pack.all_subtasks()) {
    if (n) out += "\n\n";
    out += std::to_string(++n) + ". " + sub->title + "\n   * Description: " + sub->description +
           "\n   * Estimated time: " + std::to_string(sub->estimated_minutes) + " minutes";
  }
  return out;
}

namespace {

std::string format_number(double v) {
  if (v == static_cast<double>(static_cast<std::int64_t>(v))) return std::to_string(static_cast<std::int64_t>(v));
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  return s;
}

AgentContext base_context(const SessionState& s, const std::string& channel,
                          std::optional<std::string> subtask_id) {
  AgentContext ctx;
  ctx.stage = s.stage;
  ctx.phase = current_phase(s.stage);
  ctx.condition = s.condition;
  ctx.active_subtask = std::move(subtask_id);
  if (auto it = s.transcripts.find(channel); it != s.transcripts.end()) ctx.history = it->second;
  return ctx;
}

}  // namespace

std::string render_subtask_outcomes(const ContentPack& pack, const SessionState& s) {
  std::string out;
  std::size_t n = 0;
  for (const auto* sub : pack.all_subtasks()) {
    if (n) out += "\n\n";
    out += std::to_string(++n) + ". " + sub->title + " (" + std::string(to_string(sub->kind)) + ")";
    out += "\n   * Status: " + std::string(to_string(s.status(sub->id)));
    const SubtaskOutcome* rec = nullptr;
    if (auto it = s.outcomes.find(sub->id); it != s.outcomes.end()) rec = &it->second;
    out += "\n   * Time spent: " + std::to_string(rec ? rec->time_spent_seconds : 0) + " seconds";
    if (s.plan) {
      if (auto it = s.plan->time_allocations.find(sub->id); it != s.plan->time_allocations.end()) {
        out += "\n   * Planned time: " + std::to_string(it->second) + " minutes";
      }
    }
    out += "\n   * Attempts: " + std::to_string(rec ? rec->attempts : 0);
    if (rec && !rec->quality.empty()) {
      std::vector<std::string> parts;
      for (const auto& [k, v] : rec->quality) parts.push_back(k + " " + format_number(v));
      out += "\n   * Quality: " + join(parts, ", ");
    }
  }
  return out;
}

AgentContext planning_context(const ContentPack& pack, const SessionState& s) {
  auto ctx = base_context(s, channel_for(AgentKind::Planning, std::nullopt), std::nullopt);
  ctx.values["subtaskList"] = render_subtask_list(pack);
  return ctx;
}

AgentContext reflection_context(const ContentPack& pack, const SessionState& s) {
  auto ctx = base_context(s, channel_for(AgentKind::Reflection, std::nullopt), std::nullopt);
  std::vector<std::string> titles;
  std::vector<std::string> descriptions;
  for (const auto& t : pack.tasks) {
    titles.push_back(t.title);
    descriptions.push_back(t.description);
  }
  ctx.values["taskTitle"] = join(titles, "; ");
  ctx.values["taskDescription"] = join(descriptions, " ");
  ctx.values["subtaskOutcomes"] = render_subtask_outcomes(pack, s);
  return ctx;
}

AgentContext chatting_context(const PersonaDef& persona, const SessionState& s, const std::string& subtask_id,
                              const std::string& user_question) {
  auto ctx = base_context(s, channel_for(AgentKind::Chatting, subtask_id), subtask_id);
  ctx.values["professorName"] = persona.professor_name;
  ctx.values["department"] = persona.department;
  ctx.values["university"] = persona.university;
  ctx.values["researchField"] = persona.research_field;
  ctx.values["specificArea"] = persona.research_field;
  ctx.values["researchDirections"] = join(persona.research_directions, ", ");
  ctx.values["userQuestion"] = user_question;
  return ctx;
}

std::string combined_input(const PaperHelpInput& in) {
  std::vector<std::string> parts;
  if (!in.question.empty()) parts.push_back("Question: " + in.question);
  if (!in.summary.empty()) parts.push_back("Summary: " + in.summary);
  if (!in.paper_content.empty()) parts.push_back("Paper Content:\n" + in.paper_content);
  return join(parts, "\n");
}

AgentContext paper_review_context(const SessionState& s, const std::string& subtask_id,
                                  const PaperHelpInput& in) {
  auto ctx = base_context(s, channel_for(AgentKind::PaperReview, subtask_id), subtask_id);
  ctx.values["combinedInput"] = combined_input(in);
  return ctx;
}

std::string reference_content(const ContentPack& pack, const SessionState& s) {
  std::vector<std::string> lines;
  for (const auto* sub : pack.all_subtasks()) {
    if (s.status(sub->id) != SubtaskStatus::Complete) continue;
    auto it = s.outcomes.find(sub->id);
    if (it == s.outcomes.end() || !it->second.artifact_text) continue;
    const auto text = trim(*it->second.artifact_text);
    if (text.empty()) continue;
    lines.push_back("- " + sub->title + ": " + std::string(text));
  }
  if (lines.empty()) return {};
  return "Previous Task Outcomes:\n" + join(lines, "\n");
}

AgentContext writing_context(const ContentPack& pack, const SessionState& s, const std::string& subtask_id,
                             const WritingHelpInput& in) {
  auto ctx = base_context(s, channel_for(AgentKind::Writing, subtask_id), subtask_id);
  ctx.values["referenceContent"] = reference_content(pack, s);
  ctx.values["title"] = in.title;
  ctx.values["body"] = in.body;
  ctx.values["question"] = in.question;
  return ctx;
}

std::string channel_for(AgentKind agent, const std::optional<std::string>& subtask_id) {
  const std::string name(to_string(agent));
  return subtask_id ? name + ":" + *subtask_id : name;
}

}  // namespace srl
