#pragma once

#include <nlohmann/json.hpp>

#include "srl/engine.hpp"
#include "srl/state.hpp"

namespace srl {

/// Learner-facing projection of a session. Locked subtasks appear as an
/// outline (title, kind, description, estimate) without their documents,
/// questions or persona. NoSrl views carry no plan, time budget or
/// reflection keys. Quiz questions never include their answer keys.
nlohmann::json build_view(const TaskEngine& engine, const SessionState& s);

/// Content of an unlocked subtask as the learner sees it.
nlohmann::json subtask_content(const ContentPack& pack, const SubtaskDef& sub);

}  // namespace srl
