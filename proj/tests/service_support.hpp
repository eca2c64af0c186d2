#pragma once

#include <atomic>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "srl/assessment.hpp"
#include "srl/quiz.hpp"
#include "srl/service.hpp"
#include "support.hpp"

namespace srltest {

inline std::map<std::string, std::shared_ptr<const srl::ContentPack>> both_packs() {
  return {{"full-coverage", full_pack()}, {"minimal", minimal_pack()}};
}

inline srl::ServiceOptions counting_ids(const std::string& prefix = "s") {
  srl::ServiceOptions o;
  auto n = std::make_shared<std::atomic<int>>(0);
  o.id_generator = [n, prefix] { return prefix + std::to_string(++*n); };
  return o;
}

inline std::unique_ptr<srl::SessionService> make_service(std::int64_t seed = 1,
                                                         srl::ServiceOptions options = counting_ids()) {
  return std::make_unique<srl::SessionService>(both_packs(), srl::load_instruments(data_dir() / "instruments"),
                                               std::make_shared<srl::MockGateway>(seed), std::move(options));
}

inline nlohmann::json quiz_answers(const srl::ContentPack& pack, const srl::SubtaskDef& quiz, bool correct) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto* q : pack.quiz_questions(quiz)) {
    auto a = srl::correct_answer(*q);
    if (!correct) {
      switch (q->form) {
        case srl::QuestionForm::TrueFalse: a.value = !q->truth; break;
        case srl::QuestionForm::MultipleChoice: a.value = (*q->correct_option() + 1) % q->options.size(); break;
        case srl::QuestionForm::Ordering: {
          auto items = q->ordered_items;
          std::swap(items.front(), items.back());
          a.value = items;
          break;
        }
        case srl::QuestionForm::Matching: {
          auto pairs = q->pairs;
          std::swap(pairs[0].right, pairs[1].right);
          a.value = pairs;
          break;
        }
      }
    }
    out[q->id] = srl::answer_to_json(a);
  }
  return out;
}

inline std::string words(std::int64_t n) {
  std::string out;
  for (std::int64_t i = 0; i < std::max<std::int64_t>(n, 1); ++i) out += (i ? " " : "") + std::string("idea");
  return out;
}

/// Drives one session of the full pack through every stage, using each agent
/// the condition allows. Returns the session id.
inline std::string drive_full_session(srl::SessionService& svc, srl::Condition cond) {
  using nlohmann::json;
  const auto& pack = svc.pack("full-coverage");
  const auto id = svc.open_session("full-coverage", cond);
  svc.advance(id);
  const bool srl_on = cond == srl::Condition::FullSrl;
  if (srl_on) {
    const auto plan = svc.plan_request(id);
    svc.record_plan(id, json{{"ordering", plan.at("ordering")}, {"strategy_note", "steady"}});
    svc.advance(id);
  }
  for (const auto& sid : srl::global_order(pack)) {
    const auto& sub = *pack.find_subtask(sid);
    svc.start_subtask(id, sid);
    svc.tick(id, json{{"seconds", 60 * sub.estimated_minutes}, {"subtask_id", sid}});
    switch (sub.kind) {
      case srl::SubtaskKind::Quiz:
        svc.submit_subtask(id, sid, json{{"answers", quiz_answers(pack, sub, false)}});
        svc.submit_subtask(id, sid, json{{"answers", quiz_answers(pack, sub, true)}});
        break;
      case srl::SubtaskKind::Discussion:
        for (std::int64_t i = 0; i < sub.completion.threshold; ++i) {
          svc.chat(id, json{{"kind", "discussion_message"}, {"subtask_id", sid}, {"message", "Question " + std::to_string(i)}});
        }
        svc.submit_subtask(id, sid, json::object());
        break;
      default:
        if (srl_on && (sub.kind == srl::SubtaskKind::Review || sub.kind == srl::SubtaskKind::Paper)) {
          svc.chat(id, json{{"kind", "paper_help"}, {"subtask_id", sid}, {"summary", "a summary"}});
        }
        if (srl_on && (sub.kind == srl::SubtaskKind::Report || sub.kind == srl::SubtaskKind::WritingGoal)) {
          svc.chat(id, json{{"kind", "writing_help"}, {"subtask_id", sid}, {"title", "Draft"}});
        }
        svc.submit_subtask(id, sid, json{{"text", words(sub.completion.threshold)}});
        break;
    }
  }
  svc.tick(id, json{{"seconds", 30}});
  svc.advance(id);
  if (srl_on) svc.chat(id, json{{"kind", "reflection_request"}});
  srl::ResponseSheet sheet;
  sheet.responses = std::vector<std::int64_t>(36, 5);
  svc.score_assessment("aslq36", sheet, id);
  return id;
}

}  // namespace srltest
