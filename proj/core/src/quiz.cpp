#include "srl/quiz.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "srl/error.hpp"

namespace srl {
namespace {

template <typename T>
const T& expect(const QuestionDef& q, const LearnerAnswer& a) {
  const auto* v = std::get_if<T>(&a.value);
  if (!v) {
    raise(ErrorCode::InvalidPayload,
          "answer shape does not fit " + std::string(to_string(q.form)) + " question '" + q.id + "'");
  }
  return *v;
}

}  // namespace

bool is_correct(const QuestionDef& q, const LearnerAnswer& answer) {
  switch (q.form) {
    case QuestionForm::Matching: {
      const auto& pairs = expect<std::vector<MatchPair>>(q, answer);
      if (pairs.size() != q.pairs.size()) return false;
      return incorrect_connections(q, answer).empty();
    }
    case QuestionForm::MultipleChoice: {
      const auto chosen = expect<std::size_t>(q, answer);
      return q.correct_option() == chosen;
    }
    case QuestionForm::Ordering:
      return expect<std::vector<std::string>>(q, answer) == q.ordered_items;
    case QuestionForm::TrueFalse:
      return expect<bool>(q, answer) == q.truth;
  }
  return false;
}

std::vector<MatchPair> incorrect_connections(const QuestionDef& q, const LearnerAnswer& answer) {
  const auto& pairs = expect<std::vector<MatchPair>>(q, answer);
  std::vector<MatchPair> wrong;
  for (const auto& p : pairs) {
    const bool ok = std::any_of(q.pairs.begin(), q.pairs.end(), [&](const MatchPair& key) {
      return key.left == p.left && key.right == p.right;
    });
    if (!ok) wrong.push_back(p);
  }
  return wrong;
}

std::optional<std::size_t> first_ordering_error(const QuestionDef& q, const LearnerAnswer& answer) {
  const auto& items = expect<std::vector<std::string>>(q, answer);
  const auto n = std::max(items.size(), q.ordered_items.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= items.size() || i >= q.ordered_items.size() || items[i] != q.ordered_items[i]) return i;
  }
  return std::nullopt;
}

LearnerAnswer correct_answer(const QuestionDef& q) {
  switch (q.form) {
    case QuestionForm::Matching: return {q.pairs};
    case QuestionForm::MultipleChoice: return {q.correct_option().value_or(0)};
    case QuestionForm::Ordering: return {q.ordered_items};
    case QuestionForm::TrueFalse: return {q.truth};
  }
  return {};
}

LearnerAnswer answer_from_json(const QuestionDef& q, const nlohmann::json& j) {
  auto bad = [&](const char* what) -> LearnerAnswer {
    raise(ErrorCode::InvalidPayload, "answer for question '" + q.id + "' must be " + what);
  };
  switch (q.form) {
    case QuestionForm::Matching: {
      if (!j.is_array()) return bad("an array of [left, right] pairs");
      std::vector<MatchPair> pairs;
      for (const auto& p : j) {
        if (p.is_array() && p.size() == 2 && p[0].is_string() && p[1].is_string()) {
          pairs.push_back({p[0].get<std::string>(), p[1].get<std::string>()});
        } else if (p.is_object() && p.contains("left") && p.contains("right") &&
                   p["left"].is_string() && p["right"].is_string()) {
          pairs.push_back({p["left"].get<std::string>(), p["right"].get<std::string>()});
        } else {
          return bad("an array of [left, right] pairs");
        }
      }
      return {pairs};
    }
    case QuestionForm::MultipleChoice:
      if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        return bad("a non-negative option index");
      }
      return {j.get<std::size_t>()};
    case QuestionForm::Ordering: {
      if (!j.is_array()) return bad("an array of item strings");
      std::vector<std::string> items;
      for (const auto& e : j) {
        if (!e.is_string()) return bad("an array of item strings");
        items.push_back(e.get<std::string>());
      }
      return {items};
    }
    case QuestionForm::TrueFalse:
      if (!j.is_boolean()) return bad("a boolean");
      return {j.get<bool>()};
  }
  return bad("well-formed");
}

nlohmann::json answer_to_json(const LearnerAnswer& a) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::vector<MatchPair>>) {
          nlohmann::json out = nlohmann::json::array();
          for (const auto& p : v) out.push_back({p.left, p.right});
          return out;
        } else {
          return v;
        }
      },
      a.value);
}

}  // namespace srl
