#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "srl/content.hpp"
#include "srl/error.hpp"
#include "srl/engine.hpp"
#include "srl/quiz.hpp"
#include "srl/srl_layer.hpp"
#include "srl/state.hpp"

namespace srltest {

inline std::filesystem::path data_dir() { return SRLKIT_DATA_DIR; }
inline std::filesystem::path golden_dir() { return SRLKIT_GOLDEN_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Golden files end with one newline that is not part of the template.
inline std::string golden(const std::string& agent, const std::string& part) {
  auto text = read_file(golden_dir() / (agent + "." + part + ".txt"));
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

/// Code of the srl::Error thrown by `f`, or nullopt when it returns normally.
template <class F>
std::optional<srl::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const srl::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::shared_ptr<const srl::ContentPack> full_pack() {
  static const auto pack = std::make_shared<const srl::ContentPack>(srl::load_pack(data_dir() / "packs" / "full.json"));
  return pack;
}

inline std::shared_ptr<const srl::ContentPack> minimal_pack() {
  static const auto pack =
      std::make_shared<const srl::ContentPack>(srl::load_pack(data_dir() / "packs" / "minimal.json"));
  return pack;
}

/// An outcome that satisfies the subtask's completion rule.
inline srl::SubtaskOutcome passing_outcome(const srl::ContentPack& pack, const srl::SubtaskDef& sub) {
  srl::SubtaskOutcome o;
  o.subtask_id = sub.id;
  const auto n = static_cast<double>(sub.completion.threshold);
  switch (sub.kind) {
    case srl::SubtaskKind::Quiz: {
      const auto count = static_cast<double>(pack.quiz_questions(sub).size());
      o.quality = {{"quiz_correct_count", count}, {"quiz_question_count", count}};
      break;
    }
    case srl::SubtaskKind::Discussion:
      o.quality = {{"chat_turns", n}};
      break;
    default: {
      std::string text;
      const auto words = std::max<std::int64_t>(sub.completion.threshold, 1);
      for (std::int64_t i = 0; i < words; ++i) text += (i ? " w" : "w") + std::to_string(i);
      o.artifact_text = text;
      o.quality = {{"word_count", static_cast<double>(words)}};
      break;
    }
  }
  return o;
}

/// An outcome that fails the subtask's completion rule.
inline srl::SubtaskOutcome failing_outcome(const srl::ContentPack& pack, const srl::SubtaskDef& sub) {
  srl::SubtaskOutcome o;
  o.subtask_id = sub.id;
  switch (sub.kind) {
    case srl::SubtaskKind::Quiz: {
      const auto count = static_cast<double>(pack.quiz_questions(sub).size());
      o.quality = {{"quiz_correct_count", 0.0}, {"quiz_question_count", count}};
      break;
    }
    case srl::SubtaskKind::Discussion:
      o.quality = {{"chat_turns", 0.0}};
      break;
    default:
      if (sub.completion.rule == srl::CompletionRule::MinWords) {
        o.artifact_text = "short";
        o.quality = {{"word_count", 1.0}};
      } else {
        o.artifact_text = "   ";
        o.quality = {{"word_count", 0.0}};
      }
      break;
  }
  return o;
}

/// Fresh session moved into TaskProcess with a plan in place.
inline srl::SessionState in_task_process(const srl::TaskEngine& engine, srl::Condition c = srl::Condition::FullSrl) {
  auto s = engine.advance_stage(engine.start_session(c, "s-test"));
  if (s.stage == srl::TaskStage::Planning) {
    srl::LearningPlan plan;
    plan.ordering = srl::global_order(engine.pack());
    for (const auto& id : plan.ordering) plan.time_allocations[id] = engine.subtask(id).estimated_minutes;
    s = srl::record_plan(engine.pack(), std::move(s), plan);
    s = engine.advance_stage(std::move(s));
  }
  return s;
}

}  // namespace srltest
