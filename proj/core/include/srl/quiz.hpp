#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srl/content.hpp"

namespace srl {

/// A learner's response to one question. The alternative must match the
/// question form: matching pairs, chosen option index, item order, or a
/// true/false verdict.
struct LearnerAnswer {
  std::variant<std::vector<MatchPair>, std::size_t, std::vector<std::string>, bool> value;

  bool operator==(const LearnerAnswer&) const = default;
};

/// Throws InvalidPayload when the answer shape does not fit the question.
bool is_correct(const QuestionDef& q, const LearnerAnswer& answer);

/// Learner pairs that differ from the key, in the learner's order.
std::vector<MatchPair> incorrect_connections(const QuestionDef& q, const LearnerAnswer& answer);

/// Zero-based position of the first item out of place, if any.
std::optional<std::size_t> first_ordering_error(const QuestionDef& q, const LearnerAnswer& answer);

/// The answer key expressed as a LearnerAnswer.
LearnerAnswer correct_answer(const QuestionDef& q);

LearnerAnswer answer_from_json(const QuestionDef& q, const nlohmann::json& j);
nlohmann::json answer_to_json(const LearnerAnswer& a);

}  // namespace srl
