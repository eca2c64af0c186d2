#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srl/content.hpp"
#include "srl/gateway.hpp"
#include "srl/quiz.hpp"
#include "srl/srl_layer.hpp"
#include "srl/state.hpp"

namespace srl {

enum class InteractionKind {
  PlanRequest,
  QuizHelp,
  PaperHelp,
  DiscussionMessage,
  WritingHelp,
  ReflectionRequest,
};

std::string_view to_string(InteractionKind k) noexcept;
std::optional<InteractionKind> interaction_kind_from(std::string_view s) noexcept;

/// Phase each agent serves: Planning is Forethought, Reflection is
/// Reflection, the rest are Performance.
SrlPhase agent_phase(AgentKind agent) noexcept;

/// Every agent except Chatting is an SRL scaffold and is unavailable under
/// NoSrl or when the pack disables SRL features.
bool is_srl_agent(AgentKind agent) noexcept;

/// Throws FeatureDisabled for SRL pathways that the condition or pack turns
/// off, and PhaseMismatch when the interaction does not belong to the stage.
AgentKind select_agent(const SessionState& s, InteractionKind interaction,
                       const EnhancementConfig& enhancement = {});

/// Everything a template may draw on. `values` holds the rendered text for
/// each placeholder except chatHistory, which is rendered from `history`.
struct AgentContext {
  TaskStage stage = TaskStage::Introduction;
  SrlPhase phase = SrlPhase::Forethought;
  Condition condition = Condition::FullSrl;
  std::optional<std::string> active_subtask;
  ChatTranscript history;
  std::map<std::string, std::string> values;
};

struct PromptBundle {
  AgentKind agent = AgentKind::Chatting;
  std::string system_text;
  std::string user_text;
  std::optional<std::int64_t> reply_word_limit;

  bool operator==(const PromptBundle&) const = default;

  std::vector<ChatMessage> messages() const;
};

struct AgentReply {
  std::string raw_text;
  std::string budgeted_text;
  /// Planning only: the suggested ordering as subtask ids.
  std::optional<std::vector<std::string>> structured;
  std::size_t word_count = 0;
};

inline constexpr std::size_t kHistoryTurnCap = 20;

/// `User:` / `Assistant:` lines, oldest first, last kHistoryTurnCap turns.
std::string render_history(const ChatTranscript& history);

/// Substitutes every `{name}` token of the agent's template in one pass.
/// Throws NoTemplate or MissingPlaceholder.
PromptBundle assemble_prompt(AgentKind agent, const AgentContext& ctx, const ContentPack& pack);

/// Indices (1-based) from the first <START>...<END> span. Throws MissingTags
/// or NotPermutation.
std::vector<int> parse_planning_reply(std::string_view text, std::size_t n_subtasks);

/// Inverse of parse_planning_reply: "<START>a,b,c<END>".
std::string format_planning_reply(const std::vector<int>& order);

struct BudgetOutcome {
  std::string text;
  bool reasked = false;
  bool truncated = false;
};

/// Text within `limit` words is returned unchanged. Otherwise the gateway
/// (when given) is asked once to shorten, and an over-long answer is cut at
/// the limit word boundary.
BudgetOutcome enforce_reply_budget(AgentKind agent, const std::string& raw, std::size_t limit,
                                   LlmGateway* gateway = nullptr,
                                   const std::vector<ChatMessage>& conversation = {});

/// Human label and rendered request sentence for a wrong attempt.
struct QuizHintText {
  std::string question_type;
  std::string question_details;
};

/// Throws CorrectAnswerError when the attempt is correct.
QuizHintText quiz_hint_text(const QuestionDef& q, const LearnerAnswer& attempt);

PromptBundle quiz_hint_request(const ContentPack& pack, const QuestionDef& q,
                               const LearnerAnswer& attempt, const ChatTranscript& history = {});

// Context builders. Each fills the placeholders its agent's template uses
// from state that the learner can already observe.

/// Numbered subtask list in declaration order with descriptions and
/// estimated minutes.
std::string render_subtask_list(const ContentPack& pack);
std::string render_subtask_outcomes(const ContentPack& pack, const SessionState& s);

AgentContext planning_context(const ContentPack& pack, const SessionState& s);
AgentContext reflection_context(const ContentPack& pack, const SessionState& s);
AgentContext quiz_context(const SessionState& s, const QuestionDef& q, const LearnerAnswer& attempt,
                          std::optional<std::string> subtask_id = std::nullopt);
AgentContext chatting_context(const PersonaDef& persona, const SessionState& s,
                              const std::string& subtask_id, const std::string& user_question);

struct PaperHelpInput {
  std::string question;
  std::string summary;
  std::string paper_content;
};

std::string combined_input(const PaperHelpInput& in);
AgentContext paper_review_context(const SessionState& s, const std::string& subtask_id,
                                  const PaperHelpInput& in);

struct WritingHelpInput {
  std::string title;
  std::string body;
  std::string question;
};

/// "Previous Task Outcomes:" followed by every completed subtask's artifact,
/// or empty when nothing has been produced yet.
std::string reference_content(const ContentPack& pack, const SessionState& s);
AgentContext writing_context(const ContentPack& pack, const SessionState& s,
                             const std::string& subtask_id, const WritingHelpInput& in);

/// The transcript channel an interaction writes to.
std::string channel_for(AgentKind agent, const std::optional<std::string>& subtask_id);

/// Runs a bundle through the gateway and applies the agent's reply
/// contract. Planning replies are parsed, retried once, repaired to respect
/// dependencies, and fall back to the global topological order.
class Orchestrator {
 public:
  explicit Orchestrator(LlmGateway& gateway) : gateway_(gateway) {}

  struct Result {
    AgentReply reply;
    std::vector<ChatMessage> prompt;
    int gateway_calls = 0;
    bool reasked = false;
    bool truncated = false;
    std::optional<std::string> parse_error;
    bool fallback = false;
  };

  Result run(const PromptBundle& bundle, const ContentPack& pack);

 private:
  Result run_planning(const PromptBundle& bundle, const ContentPack& pack);

  LlmGateway& gateway_;
};

/// Maps 1-based list indices (declaration order) to subtask ids and repairs
/// any dependency violation with a stable topological sort keyed on the
/// suggested rank.
std::vector<std::string> ordering_from_indices(const ContentPack& pack, const std::vector<int>& indices);

}  // namespace srl
