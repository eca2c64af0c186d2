#include <doctest.h>

#include <random>

#include "srl/engine.hpp"
#include "srl/srl_layer.hpp"
#include "support.hpp"

using namespace srl;
using srltest::error_of;

namespace {

LearningPlan default_plan(const ContentPack& pack) {
  LearningPlan plan;
  plan.ordering = global_order(pack);
  for (const auto& id : plan.ordering) plan.time_allocations[id] = pack.find_subtask(id)->estimated_minutes;
  return plan;
}

SessionState planning_session(const TaskEngine& engine) {
  return engine.advance_stage(engine.start_session(Condition::FullSrl, "p"));
}

}  // namespace

TEST_CASE("phases follow stages") {
  CHECK(current_phase(TaskStage::Introduction) == SrlPhase::Forethought);
  CHECK(current_phase(TaskStage::Planning) == SrlPhase::Forethought);
  CHECK(current_phase(TaskStage::TaskProcess) == SrlPhase::Performance);
  CHECK(current_phase(TaskStage::Review) == SrlPhase::Reflection);
  CHECK(to_string(SrlPhase::Reflection) == "reflection");
}

TEST_CASE("plan recording") {
  TaskEngine engine(srltest::full_pack());
  const auto& pack = engine.pack();
  auto s = planning_session(engine);
  const auto plan = default_plan(pack);

  auto recorded = record_plan(pack, s, plan);
  REQUIRE(recorded.plan.has_value());
  CHECK(*recorded.plan == plan);
  CHECK(engine.stage_gate_open(recorded));

  SUBCASE("wrong stage or condition") {
    CHECK(error_of([&] { record_plan(pack, engine.start_session(Condition::FullSrl, "x"), plan); }) ==
          ErrorCode::PhaseError);
    auto none = engine.advance_stage(engine.start_session(Condition::NoSrl, "n"));
    CHECK(error_of([&] { record_plan(pack, none, plan); }) == ErrorCode::PhaseError);
  }
  SUBCASE("not a permutation") {
    auto p = plan;
    p.ordering.pop_back();
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidOrdering);
    p = plan;
    p.ordering.back() = p.ordering.front();
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidOrdering);
    p = plan;
    p.ordering.push_back("ZZ");
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidOrdering);
  }
  SUBCASE("dependency violations") {
    auto p = plan;
    const auto k = std::find(p.ordering.begin(), p.ordering.end(), "K1");
    const auto q = std::find(p.ordering.begin(), p.ordering.end(), "Q1");
    std::iter_swap(k, q);
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidOrdering);
    p = plan;
    std::rotate(p.ordering.begin(), p.ordering.begin() + 4, p.ordering.end());  // T2 before T1
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidOrdering);
  }
  SUBCASE("allocations") {
    auto p = plan;
    p.time_allocations["K1"] = 0;
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidPlan);
    p = plan;
    p.time_allocations.erase("RP1");
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidPlan);
    p = plan;
    p.time_allocations["ZZ"] = 3;
    CHECK(error_of([&] { record_plan(pack, s, p); }) == ErrorCode::InvalidPlan);
  }
}

TEST_CASE("every dependency-respecting permutation is accepted, every other rejected") {
  const auto& pack = *srltest::minimal_pack();
  TaskEngine engine(srltest::minimal_pack());
  const auto s = planning_session(engine);
  auto plan = default_plan(pack);
  std::sort(plan.ordering.begin(), plan.ordering.end());
  int accepted = 0;
  do {
    const bool valid = plan.ordering.front() == "K1";
    CHECK((error_of([&] { record_plan(pack, s, plan); }) == std::nullopt) == valid);
    accepted += valid;
  } while (std::next_permutation(plan.ordering.begin(), plan.ordering.end()));
  CHECK(accepted == 1);
}

TEST_CASE("time budget: remaining is allocation minus consumption, negative on overrun") {
  TaskEngine engine(srltest::full_pack());
  const auto& pack = engine.pack();
  auto s = srltest::in_task_process(engine);
  REQUIRE(time_budget_view(s).has_value());

  std::mt19937 rng(5);
  std::map<std::string, std::int64_t> spent;
  std::int64_t idle = 0;
  for (int i = 0; i < 200; ++i) {
    const auto avail = engine.available_subtasks(s);
    const auto secs = 1 + static_cast<std::int64_t>(rng() % 900);
    if (avail.empty() || rng() % 5 == 0) {
      s = tick_time(s, std::nullopt, secs);
      idle += secs;
    } else {
      const auto& id = avail[rng() % avail.size()];
      s = tick_time(s, id, secs);
      spent[id] += secs;
      if (rng() % 4 == 0) s = engine.complete_subtask(s, id, srltest::passing_outcome(pack, engine.subtask(id)));
    }
  }
  const auto view = *time_budget_view(s);
  REQUIRE(view.subtasks.size() == 8);
  bool saw_overrun = false;
  std::int64_t total_alloc = 0, total_spent = 0;
  for (std::size_t i = 0; i < view.subtasks.size(); ++i) {
    const auto& b = view.subtasks[i];
    CHECK(b.subtask_id == s.plan->ordering[i]);
    CHECK(b.allocated_minutes == s.plan->time_allocations.at(b.subtask_id));
    CHECK(b.consumed_seconds == spent[b.subtask_id]);
    CHECK(b.remaining_seconds == b.allocated_minutes * 60 - spent[b.subtask_id]);
    saw_overrun = saw_overrun || b.remaining_seconds < 0;
    total_alloc += b.allocated_minutes;
    total_spent += spent[b.subtask_id];
  }
  CHECK(saw_overrun);
  CHECK(view.total_allocated_minutes == total_alloc);
  CHECK(view.total_consumed_seconds == total_spent);
  CHECK(view.total_remaining_seconds == total_alloc * 60 - total_spent);

  const auto m = monitor_snapshot(pack, s);
  CHECK(m.attributed_seconds == total_spent);
  CHECK(m.idle_seconds == idle);
  CHECK(m.session_seconds == total_spent + idle);
  CHECK(s.clock == total_spent + idle);

  CHECK_FALSE(time_budget_view(engine.start_session(Condition::FullSrl, "x")).has_value());
}

TEST_CASE("ticks need an open subtask and positive seconds") {
  TaskEngine engine(srltest::minimal_pack());
  auto s = srltest::in_task_process(engine);
  CHECK(error_of([&] { tick_time(s, std::string("Q1"), 10); }) == ErrorCode::NotActiveError);
  CHECK(error_of([&] { tick_time(s, std::string("ZZ"), 10); }) == ErrorCode::NotActiveError);
  CHECK(error_of([&] { tick_time(s, std::string("K1"), 0); }) == ErrorCode::InvalidArgument);
  s = tick_time(s, std::string("K1"), 10);
  s = engine.complete_subtask(s, "K1", srltest::passing_outcome(engine.pack(), engine.subtask("K1")));
  CHECK(error_of([&] { tick_time(s, std::string("K1"), 10); }) == ErrorCode::NotActiveError);
  CHECK(s.outcomes.at("K1").time_spent_seconds == 10);
}

TEST_CASE("monitor snapshot") {
  TaskEngine engine(srltest::full_pack());
  const auto& pack = engine.pack();
  auto s = srltest::in_task_process(engine);
  auto m = monitor_snapshot(pack, s);
  CHECK(m.subtasks.size() == 8);
  CHECK(m.completion_rate == 0.0);
  s = tick_time(s, std::string("K1"), 120);
  s = engine.submit_subtask(s, "K1", srltest::failing_outcome(pack, engine.subtask("K1"))).state;
  s = engine.complete_subtask(s, "K1", srltest::passing_outcome(pack, engine.subtask("K1")));
  s = engine.complete_subtask(s, "P1", srltest::passing_outcome(pack, engine.subtask("P1")));
  m = monitor_snapshot(pack, s);
  CHECK(m.completion_rate == doctest::Approx(0.25));
  CHECK(m.subtasks[0].subtask_id == "K1");
  CHECK(m.subtasks[0].attempts == 2);
  CHECK(m.subtasks[0].time_spent_seconds == 120);
  CHECK(m.subtasks[0].complete);
  CHECK(m.subtasks[0].kind == SubtaskKind::Knowledge);
  CHECK_FALSE(m.subtasks[1].complete);
}
