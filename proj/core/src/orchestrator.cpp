#include "srl/orchestrator.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "srl/error.hpp"
#include "srl/text.hpp"

namespace srl {

std::string_view to_string(InteractionKind k) noexcept {
  switch (k) {
    case InteractionKind::PlanRequest: return "plan_request";
    case InteractionKind::QuizHelp: return "quiz_help";
    case InteractionKind::PaperHelp: return "paper_help";
    case InteractionKind::DiscussionMessage: return "discussion_message";
    case InteractionKind::WritingHelp: return "writing_help";
    case InteractionKind::ReflectionRequest: return "reflection_request";
  }
  return "?";
}

std::optional<InteractionKind> interaction_kind_from(std::string_view s) noexcept {
  for (auto k : {InteractionKind::PlanRequest, InteractionKind::QuizHelp, InteractionKind::PaperHelp,
                 InteractionKind::DiscussionMessage, InteractionKind::WritingHelp,
                 InteractionKind::ReflectionRequest}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

SrlPhase agent_phase(AgentKind agent) noexcept {
  switch (agent) {
    case AgentKind::Planning: return SrlPhase::Forethought;
    case AgentKind::Reflection: return SrlPhase::Reflection;
    default: return SrlPhase::Performance;
  }
}

bool is_srl_agent(AgentKind agent) noexcept { return agent != AgentKind::Chatting; }

AgentKind select_agent(const SessionState& s, InteractionKind interaction,
                       const EnhancementConfig& enhancement) {
  AgentKind agent{};
  TaskStage stage{};
  switch (interaction) {
    case InteractionKind::PlanRequest: agent = AgentKind::Planning; stage = TaskStage::Planning; break;
    case InteractionKind::QuizHelp: agent = AgentKind::QuizTutor; stage = TaskStage::TaskProcess; break;
    case InteractionKind::PaperHelp: agent = AgentKind::PaperReview; stage = TaskStage::TaskProcess; break;
    case InteractionKind::DiscussionMessage: agent = AgentKind::Chatting; stage = TaskStage::TaskProcess; break;
    case InteractionKind::WritingHelp: agent = AgentKind::Writing; stage = TaskStage::TaskProcess; break;
    case InteractionKind::ReflectionRequest: agent = AgentKind::Reflection; stage = TaskStage::Review; break;
  }
  if (is_srl_agent(agent) && (s.condition == Condition::NoSrl || !enhancement.srl_enabled)) {
    raise(ErrorCode::FeatureDisabled,
          std::string(to_string(interaction)) + " is not available without SRL features");
  }
  if (agent == AgentKind::QuizTutor && enhancement.quiz_hint_policy == HintPolicy::Off) {
    raise(ErrorCode::FeatureDisabled, "quiz hints are turned off for this pack");
  }
  if (s.stage != stage) {
    raise(ErrorCode::PhaseMismatch, std::string(to_string(interaction)) + " belongs to the " +
                                        std::string(to_string(stage)) + " stage, session is in " +
                                        std::string(to_string(s.stage)));
  }
  return agent;
}

std::vector<ChatMessage> PromptBundle::messages() const {
  return {{ChatMessage::Role::System, system_text}, {ChatMessage::Role::User, user_text}};
}

std::string render_history(const ChatTranscript& history) {
  const std::size_t skip = history.size() > kHistoryTurnCap ? history.size() - kHistoryTurnCap : 0;
  std::string out;
  for (std::size_t i = skip; i < history.size(); ++i) {
    if (!out.empty()) out += '\n';
    out += history[i].role == ChatTurn::Role::User ? "User: " : "Assistant: ";
    out += history[i].text;
  }
  return out;
}

namespace {

bool ident_char(char c, bool first) {
  const bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  return first ? alpha : alpha || (c >= '0' && c <= '9');
}

std::string substitute(std::string_view tpl, const std::map<std::string, std::string>& values,
                       AgentKind agent) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{' && i + 1 < tpl.size() && ident_char(tpl[i + 1], true)) {
      std::size_t j = i + 2;
      while (j < tpl.size() && ident_char(tpl[j], false)) ++j;
      if (j < tpl.size() && tpl[j] == '}') {
        const std::string name(tpl.substr(i + 1, j - i - 1));
        auto it = values.find(name);
        if (it == values.end()) {
          raise(ErrorCode::MissingPlaceholder, "no value for {" + name + "} in the " +
                                                   std::string(to_string(agent)) + " template");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tpl[i++];
  }
  return out;
}

}  // namespace

PromptBundle assemble_prompt(AgentKind agent, const AgentContext& ctx, const ContentPack& pack) {
  auto it = pack.prompts.find(agent);
  if (it == pack.prompts.end()) {
    raise(ErrorCode::NoTemplate, "pack has no " + std::string(to_string(agent)) + " template");
  }
  auto values = ctx.values;
  values["chatHistory"] = render_history(ctx.history);
  PromptBundle b;
  b.agent = agent;
  b.system_text = substitute(it->second.system_template, values, agent);
  b.user_text = substitute(it->second.user_template, values, agent);
  b.reply_word_limit = it->second.reply_word_limit;
  return b;
}

std::vector<int> parse_planning_reply(std::string_view text, std::size_t n_subtasks) {
  if (n_subtasks == 0) raise(ErrorCode::InvalidArgument, "a plan needs at least one subtask");
  constexpr std::string_view open = "<START>";
  constexpr std::string_view close = "<END>";
  const auto a = text.find(open);
  if (a == std::string_view::npos) raise(ErrorCode::MissingTags, "reply has no <START> tag");
  const auto b = text.find(close, a + open.size());
  if (b == std::string_view::npos) raise(ErrorCode::MissingTags, "reply has no <END> tag after <START>");
  const auto body = text.substr(a + open.size(), b - a - open.size());

  std::vector<int> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = body.find(',', pos);
    const auto token = trim(body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos));
    if (token.empty() || token.size() > 9 ||
        !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      raise(ErrorCode::NotPermutation, "'" + std::string(token) + "' is not a subtask number");
    }
    out.push_back(std::stoi(std::string(token)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != n_subtasks) {
    raise(ErrorCode::NotPermutation, "expected " + std::to_string(n_subtasks) + " numbers, got " +
                                         std::to_string(out.size()));
  }
  std::vector<bool> seen(n_subtasks + 1, false);
  for (int v : out) {
    if (v < 1 || static_cast<std::size_t>(v) > n_subtasks) {
      raise(ErrorCode::NotPermutation, std::to_string(v) + " is out of range");
    }
    if (seen[static_cast<std::size_t>(v)]) {
      raise(ErrorCode::NotPermutation, std::to_string(v) + " appears twice");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  return out;
}

std::string format_planning_reply(const std::vector<int>& order) {
  std::string out = "<START>";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(order[i]);
  }
  return out + "<END>";
}

BudgetOutcome enforce_reply_budget(AgentKind /*agent*/, const std::string& raw, std::size_t limit,
                                   LlmGateway* gateway, const std::vector<ChatMessage>& conversation) {
  if (limit == 0) raise(ErrorCode::InvalidArgument, "word limit must be positive");
  BudgetOutcome out{raw, false, false};
  if (word_count(raw) <= limit) return out;
  if (gateway && !conversation.empty()) {
    auto msgs = conversation;
    msgs.push_back({ChatMessage::Role::Assistant, raw.empty() ? std::string(" ") : raw});
    msgs.push_back({ChatMessage::Role::User,
                    "Your reply has " + std::to_string(word_count(raw)) + " words. Rewrite it in no more than " +
                        std::to_string(limit) + " words, keeping the same guidance."});
    out.text = gateway->complete(msgs).text;
    out.reasked = true;
    if (word_count(out.text) <= limit) return out;
  }
  out.text = truncate_words(out.text, limit);
  out.truncated = true;
  return out;
}

std::vector<std::string> ordering_from_indices(const ContentPack& pack, const std::vector<int>& indices) {
  const auto subs = pack.all_subtasks();
  std::map<std::string, std::size_t> rank;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    rank[subs.at(static_cast<std::size_t>(indices[r] - 1))->id] = r;
  }
  std::map<std::string, std::size_t> indegree;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto* sub : subs) {
    indegree[sub->id];
    for (const auto& dep : pack.effective_dependencies(sub->id)) {
      ++indegree[sub->id];
      dependents[dep].push_back(sub->id);
    }
  }
  using Entry = std::pair<std::size_t, std::string>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.emplace(rank.at(id), id);
  }
  std::vector<std::string> out;
  while (!ready.empty()) {
    auto [r, id] = ready.top();
    ready.pop();
    out.push_back(id);
    for (const auto& next : dependents[id]) {
      if (--indegree[next] == 0) ready.emplace(rank.at(next), next);
    }
  }
  if (out.size() != subs.size()) raise(ErrorCode::CycleError, "pack dependencies contain a cycle");
  return out;
}

Orchestrator::Result Orchestrator::run(const PromptBundle& bundle, const ContentPack& pack) {
  if (bundle.agent == AgentKind::Planning) return run_planning(bundle, pack);
  Result res;
  res.prompt = bundle.messages();
  const auto first = gateway_.complete(res.prompt);
  res.gateway_calls = 1;
  res.reply.raw_text = first.text;
  if (bundle.reply_word_limit) {
    auto budget = enforce_reply_budget(bundle.agent, first.text,
                                       static_cast<std::size_t>(*bundle.reply_word_limit), &gateway_,
                                       res.prompt);
    res.reply.budgeted_text = std::move(budget.text);
    res.reasked = budget.reasked;
    res.truncated = budget.truncated;
    if (budget.reasked) ++res.gateway_calls;
  } else {
    res.reply.budgeted_text = first.text;
  }
  res.reply.word_count = word_count(res.reply.budgeted_text);
  return res;
}

Orchestrator::Result Orchestrator::run_planning(const PromptBundle& bundle, const ContentPack& pack) {
  Result res;
  res.prompt = bundle.messages();
  const std::size_t n = pack.subtask_count();
  auto msgs = res.prompt;
  std::optional<std::vector<int>> indices;
  for (int attempt = 0; attempt < 2 && !indices; ++attempt) {
    const auto reply = gateway_.complete(msgs);
    ++res.gateway_calls;
    res.reply.raw_text = reply.text;
    try {
      indices = parse_planning_reply(reply.text, n);
      res.parse_error.reset();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingTags && e.code() != ErrorCode::NotPermutation) throw;
      res.parse_error = std::string(to_string(e.code())) + ": " + e.what();
      msgs.push_back({ChatMessage::Role::Assistant, reply.text.empty() ? std::string(" ") : reply.text});
      msgs.push_back({ChatMessage::Role::User,
                      "Your reply could not be processed. Answer again with the subtask numbers 1 to " +
                          std::to_string(n) +
                          " in your recommended order, comma-separated, between <START> and <END>."});
    }
  }
  if (indices) {
    res.reply.structured = ordering_from_indices(pack, *indices);
  } else {
    res.reply.structured = global_order(pack);
    res.fallback = true;
  }
  res.reply.budgeted_text = res.reply.raw_text;
  res.reply.word_count = word_count(res.reply.budgeted_text);
  return res;
}

}  // namespace srl
