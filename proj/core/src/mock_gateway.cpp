#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>
#include <string_view>

#include "srl/gateway.hpp"
#include "srl/text.hpp"

namespace srl {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t message_hash(const std::vector<ChatMessage>& messages, std::int64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& m : messages) {
    h = fnv1a(h, to_string(m.role));
    h = fnv1a(h, std::string_view("\x1f", 1));
    h = fnv1a(h, m.content);
    h = fnv1a(h, std::string_view("\x1e", 1));
  }
  return h ^ (static_cast<std::uint64_t>(seed) * 0x9e3779b97f4a7c15ULL);
}

enum class Intent { Planning, QuizHint, Reflection, Review, Writing, Persona };

std::string_view intent_name(Intent i) {
  switch (i) {
    case Intent::Planning: return "planning";
    case Intent::QuizHint: return "quiz_hint";
    case Intent::Reflection: return "reflection";
    case Intent::Review: return "paper_review";
    case Intent::Writing: return "writing";
    case Intent::Persona: return "persona";
  }
  return "persona";
}

const std::string& first_user(const std::vector<ChatMessage>& messages) {
  static const std::string empty;
  for (const auto& m : messages) {
    if (m.role == ChatMessage::Role::User) return m.content;
  }
  return empty;
}

bool contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

Intent detect(const std::vector<ChatMessage>& messages) {
  const std::string_view system = messages.front().content;
  const std::string_view user = first_user(messages);
  if (contains(user, "## Subtask List:") && contains(user, "<START>")) return Intent::Planning;
  if (contains(user, "# Question Support Request")) return Intent::QuizHint;
  if (contains(user, "# Reflection Request")) return Intent::Reflection;
  if (contains(system, "You are an academic review expert")) return Intent::Review;
  if (contains(system, "You are an expert in adaptive paper writing")) return Intent::Writing;
  return Intent::Persona;
}

// Items of the numbered list between the subtask heading and the next
// second-level heading.
std::size_t count_listed_subtasks(std::string_view user) {
  auto start = user.find("## Subtask List:");
  if (start == std::string_view::npos) return 0;
  auto end = user.find("\n## ", start + 1);
  const auto section = user.substr(start, end == std::string_view::npos ? user.npos : end - start);
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos < section.size()) {
    auto eol = section.find('\n', pos);
    if (eol == std::string_view::npos) eol = section.size();
    const auto line = section.substr(pos, eol - pos);
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i + 1 < line.size() && line[i] == '.' && line[i + 1] == ' ') ++count;
    pos = eol + 1;
  }
  return count;
}

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const char* const (&bank)[N]) {
  return bank[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

constexpr const char* kPlanReasons[] = {
    "Reasoning: start with foundational material, then move to activities that build on it.",
    "Reasoning: inputs come before the assessments that depend on them, balancing effort over time.",
    "Reasoning: shorter subtasks first build momentum before the longer writing work.",
};

constexpr const char* kPlanStrategies[] = {
    "Completion Strategy: check your time budget after each subtask and adjust the next one.",
    "Completion Strategy: take brief notes while reading so later summaries go faster.",
    "Completion Strategy: review quiz mistakes before moving on to the next topic.",
};

constexpr const char* kHints[] = {
    "Hint: revisit how each concept is defined before linking it to an example.",
    "Hint: compare the key terms in each option with the concept's core idea.",
    "Hint: think about which step must happen before the others can start.",
    "Hint: check whether the statement holds in every case, not just typical ones.",
};

constexpr const char* kReflections[] = {
    "You completed every subtask on plan; quiz retries show persistence. Next time, allocate extra minutes to reading before assessments.",
    "Strong follow-through on your plan. Monitoring time helped. Try summarizing key ideas right after reading to strengthen recall.",
    "Good pacing overall. Reflection shows planning paid off; schedule short reviews between subtasks to catch gaps earlier.",
};

constexpr const char* kReviews[] = {
    "Core idea: a clear research question answered with careful evidence. Strength: method. Weakness: limited evaluation scope.",
    "The paper contributes a structured framework. Highlight its motivation, then weigh evidence quality against stated claims.",
    "Summarize the problem, approach, and main finding. Then note one advantage and one limitation in your own words.",
};

constexpr const char* kWriting[] = {
    "Open with your research question, then give one paragraph per key finding. Link each claim to its source and close with implications for future work.",
    "Organize the report as context, method, findings, reflection. Keep paragraphs focused on one idea and cite the papers you reviewed.",
    "Strengthen clarity: state the goal in the first sentence, use headings for structure, and support each argument with a referenced example.",
};

constexpr const char* kPersona[] = {
    "That is a thoughtful question. In my field, we usually begin with a clear problem statement and a small pilot study before scaling up.",
    "Welcome. I would suggest reading recent survey papers first, then narrowing your focus to one open problem you find exciting.",
    "Good question. Careful experiment design matters most: define your variables, pick a baseline, and plan how you will measure outcomes.",
};

std::string professor_name(std::string_view system) {
  constexpr std::string_view lead = "You are Professor ";
  auto at = system.find(lead);
  if (at == std::string_view::npos) return {};
  at += lead.size();
  auto end = system.find(" from ", at);
  if (end == std::string_view::npos) return {};
  return std::string(system.substr(at, end - at));
}

std::string planning_reply(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> perm(std::max<std::size_t>(n, 1));
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::string seq;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) seq += ',';
    seq += std::to_string(perm[i]);
  }
  return "Optimal Sequence:\n<START>\n" + seq + "\n<END>\n\n" + pick(rng, kPlanReasons) + "\n\n" +
         pick(rng, kPlanStrategies);
}

}  // namespace

CompletionResult mock_complete(const std::vector<ChatMessage>& messages, std::int64_t seed) {
  std::mt19937_64 rng(message_hash(messages, seed));
  const Intent intent = messages.empty() ? Intent::Persona : detect(messages);
  CompletionResult out;
  switch (intent) {
    case Intent::Planning:
      out.text = planning_reply(rng, count_listed_subtasks(first_user(messages)));
      break;
    case Intent::QuizHint: out.text = pick(rng, kHints); break;
    case Intent::Reflection: out.text = pick(rng, kReflections); break;
    case Intent::Review: out.text = pick(rng, kReviews); break;
    case Intent::Writing: out.text = pick(rng, kWriting); break;
    case Intent::Persona: {
      const auto name = messages.empty() ? std::string() : professor_name(messages.front().content);
      out.text = pick(rng, kPersona);
      if (!name.empty()) out.text += " (Professor " + name + ")";
      break;
    }
  }
  out.latency_ms = 0;
  out.provider_meta = {{"provider", "mock"},
                       {"intent", std::string(intent_name(intent))},
                       {"seed", std::to_string(seed)}};
  return out;
}

}  // namespace srl
