#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace srl {

enum class SubtaskKind { Knowledge, Quiz, Paper, Review, Discussion, Insight, WritingGoal, Report };

enum class CompletionRule {
  AllQuestionsCorrect,
  MinQuestionsCorrect,
  MinWords,
  SummarySubmitted,
  MinChatTurns,
  GoalRecorded,
};

enum class QuestionForm { Matching, MultipleChoice, Ordering, TrueFalse };

enum class DocKind { Knowledge, Paper, Brief };

enum class AgentKind { Planning, QuizTutor, PaperReview, Chatting, Writing, Reflection };

enum class HintPolicy { OnIncorrect, Off };

inline constexpr SubtaskKind kAllSubtaskKinds[] = {
    SubtaskKind::Knowledge, SubtaskKind::Quiz,       SubtaskKind::Paper,
    SubtaskKind::Review,    SubtaskKind::Discussion, SubtaskKind::Insight,
    SubtaskKind::WritingGoal, SubtaskKind::Report};

inline constexpr AgentKind kAllAgentKinds[] = {
    AgentKind::Planning, AgentKind::QuizTutor, AgentKind::PaperReview,
    AgentKind::Chatting, AgentKind::Writing,   AgentKind::Reflection};

inline constexpr std::string_view kCanonicalStages[] = {"introduction", "planning",
                                                        "task_process", "review"};

std::string_view to_string(SubtaskKind k) noexcept;
std::string_view to_string(CompletionRule r) noexcept;
std::string_view to_string(QuestionForm f) noexcept;
std::string_view to_string(DocKind k) noexcept;
std::string_view to_string(AgentKind k) noexcept;
std::string_view to_string(HintPolicy p) noexcept;

std::optional<SubtaskKind> subtask_kind_from(std::string_view s) noexcept;
std::optional<CompletionRule> completion_rule_from(std::string_view s) noexcept;
std::optional<QuestionForm> question_form_from(std::string_view s) noexcept;
std::optional<DocKind> doc_kind_from(std::string_view s) noexcept;
std::optional<AgentKind> agent_kind_from(std::string_view s) noexcept;
std::optional<HintPolicy> hint_policy_from(std::string_view s) noexcept;

struct CompletionCriteria {
  CompletionRule rule = CompletionRule::SummarySubmitted;
  /// Threshold for the Min* rules; ignored otherwise.
  std::int64_t threshold = 0;

  bool operator==(const CompletionCriteria&) const = default;
};

/// Whether `rule` may gate a subtask of `kind`.
bool rule_compatible(SubtaskKind kind, CompletionRule rule) noexcept;

/// The kind an input activity's paired assessment must depend on, if `kind`
/// is the assessing half of a pair (Quiz -> Knowledge, Review -> Paper, ...).
std::optional<SubtaskKind> paired_prerequisite(SubtaskKind kind) noexcept;

/// Quality indicator names a SubtaskOutcome may carry for `kind`.
std::vector<std::string_view> quality_indicators(SubtaskKind kind);

struct SubtaskDef {
  std::string id;
  SubtaskKind kind = SubtaskKind::Knowledge;
  std::string title;
  std::string description;
  std::int64_t estimated_minutes = 1;
  /// Quiz: comma-separated question ids. Discussion/Insight: persona id.
  /// Every other kind: a document id of the matching DocKind.
  std::string content_ref;
  CompletionCriteria completion;
  std::vector<std::string> depends_on;

  bool operator==(const SubtaskDef&) const = default;
};

struct TaskDef {
  std::string id;
  std::string title;
  std::string description;
  std::vector<SubtaskDef> subtasks;
  std::vector<std::string> depends_on;

  bool operator==(const TaskDef&) const = default;
};

struct MatchPair {
  std::string left;
  std::string right;
  bool operator==(const MatchPair&) const = default;
};

struct ChoiceOption {
  std::string text;
  bool correct = false;
  bool operator==(const ChoiceOption&) const = default;
};

struct QuestionDef {
  std::string id;
  QuestionForm form = QuestionForm::MultipleChoice;
  std::string stem;
  /// Concept category / concept name / ordering topic used in tutor hints.
  std::string topic;
  std::vector<std::string> concept_tags;
  std::vector<MatchPair> pairs;          // Matching: left_i belongs with right_i
  std::vector<ChoiceOption> options;     // MultipleChoice
  std::vector<std::string> ordered_items;  // Ordering, in the correct order
  std::string statement;                 // TrueFalse
  bool truth = false;                    // TrueFalse

  bool operator==(const QuestionDef&) const = default;

  /// Index of the single correct option; nullopt unless exactly one is marked.
  std::optional<std::size_t> correct_option() const;
};

struct PaperDoc {
  std::string id;
  DocKind kind = DocKind::Paper;
  std::string title;
  std::string content;
  /// Guiding question for review or writing activities; may be empty.
  std::string question;

  bool operator==(const PaperDoc&) const = default;
};

struct PersonaDef {
  std::string id;
  std::string professor_name;
  std::string department;
  std::string university;
  std::string research_field;
  std::vector<std::string> research_directions;

  bool operator==(const PersonaDef&) const = default;
};

struct PromptTemplateDef {
  std::string system_template;
  std::string user_template;
  std::vector<std::string> placeholders;
  std::optional<std::int64_t> reply_word_limit;

  bool operator==(const PromptTemplateDef&) const = default;
};

struct EnhancementConfig {
  bool srl_enabled = true;
  std::int64_t monitor_sampling_seconds = 30;
  HintPolicy quiz_hint_policy = HintPolicy::OnIncorrect;

  bool operator==(const EnhancementConfig&) const = default;
};

/// Word budget each agent's template must declare (none for Planning/Chatting).
std::optional<std::int64_t> agent_word_budget(AgentKind agent) noexcept;

/// Every `{identifier}` token in `text`, in order of first appearance.
std::vector<std::string> template_tokens(std::string_view text);

/// Placeholders the orchestrator can supply for `agent`.
const std::vector<std::string>& supported_placeholders(AgentKind agent);

/// Location of a subtask inside a pack: (task index, subtask index).
struct SubtaskLocation {
  std::size_t task = 0;
  std::size_t subtask = 0;
};

struct ContentPack {
  std::string pack_id;
  std::vector<std::string> stages;
  std::vector<TaskDef> tasks;
  std::vector<QuestionDef> questions;
  std::vector<PaperDoc> papers;
  std::vector<PersonaDef> personas;
  std::map<AgentKind, PromptTemplateDef> prompts;
  EnhancementConfig enhancement;

  bool operator==(const ContentPack& o) const;

  /// Builds the id lookup tables. Called by the loader; call again after
  /// editing a pack by hand.
  void reindex();

  const SubtaskDef* find_subtask(std::string_view id) const;
  const TaskDef* find_task(std::string_view id) const;
  const TaskDef* task_of(std::string_view subtask_id) const;
  const QuestionDef* find_question(std::string_view id) const;
  const PaperDoc* find_paper(std::string_view id) const;
  const PersonaDef* find_persona(std::string_view id) const;

  /// All subtasks in declaration order (task order, then subtask order).
  std::vector<const SubtaskDef*> all_subtasks() const;
  std::size_t subtask_count() const;
  /// Global declaration index of a subtask.
  std::optional<std::size_t> declaration_index(std::string_view subtask_id) const;

  /// Questions referenced by a Quiz subtask's content_ref, in listed order.
  std::vector<const QuestionDef*> quiz_questions(const SubtaskDef& quiz) const;

  /// Own dependencies plus every subtask of each task the parent depends on.
  std::vector<std::string> effective_dependencies(std::string_view subtask_id) const;

 private:
  std::unordered_map<std::string, SubtaskLocation> subtask_index_;
  std::unordered_map<std::string, std::size_t> task_index_;
  std::unordered_map<std::string, std::size_t> question_index_;
  std::unordered_map<std::string, std::size_t> paper_index_;
  std::unordered_map<std::string, std::size_t> persona_index_;
  std::unordered_map<std::string, std::size_t> declaration_;
};

/// Splits a Quiz content_ref into its question ids.
std::vector<std::string> split_question_refs(std::string_view content_ref);

enum class FindingKind { Schema, DanglingRef, Cycle, Pairing, Duplicate };

struct Finding {
  FindingKind kind = FindingKind::Schema;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const noexcept { return findings.empty(); }
  std::string summary() const;
};

ValidationReport validate_pack(const ContentPack& pack);

/// Parses and validates a pack document; throws ParseError, SchemaError or
/// DanglingRef. Never returns a partially valid pack.
ContentPack load_pack(const std::filesystem::path& path);
ContentPack load_pack_from_string(std::string_view document);
ContentPack pack_from_json(const nlohmann::json& doc);
nlohmann::json pack_to_json(const ContentPack& pack);

/// Dependency-respecting order of a task's subtasks; ties resolve by
/// declaration order. Throws UnknownTask or CycleError.
std::vector<std::string> topological_order(const ContentPack& pack, std::string_view task_id);

/// The same ordering over every subtask of the pack, honouring task-level
/// dependencies.
std::vector<std::string> global_order(const ContentPack& pack);

}  // namespace srl
