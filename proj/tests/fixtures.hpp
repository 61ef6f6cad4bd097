#pragma once

// Fault-injected oracle transcripts for the failure classifier.

#include <functional>
#include <string>
#include <vector>

#include "labor/labor.hpp"

namespace fixtures {

using namespace labor;

struct FaultFixture {
  std::string name;
  TaskClass task_class;
  EpisodeTranscript transcript;
  FailureTag expected;
};

inline EpisodeTranscript run_plan(const GeneratedTask& t, std::vector<BimanualCommand> plan) {
  ScriptedBackend backend(std::move(plan), "fault");
  return run_episode(t, backend, EpisodeOptions{});
}

using PlanEdit = std::function<void(std::vector<BimanualCommand>&)>;

inline EpisodeTranscript faulty_oracle(TaskClass c, Variant v, std::uint64_t seed, const PlanEdit& edit) {
  const GeneratedTask t = generate(c, v, seed);
  auto plan = oracle_plan(t.spec, t.world);
  edit(plan);
  return run_plan(t, std::move(plan));
}

inline bool mentions(const SkillInvocation& inv, std::string_view name) {
  for (const auto& a : inv.args) {
    if (a == name) return true;
  }
  return false;
}

inline void drop_skill(std::vector<BimanualCommand>& plan, Skill s) {
  std::erase_if(plan, [s](const BimanualCommand& c) { return c.left.skill == s || c.right.skill == s; });
}

/// Turns the grasp of `fruit` and that hand's next two invocations into waits.
inline void drop_fruit(std::vector<BimanualCommand>& plan, std::string_view fruit) {
  for (Side side : kSides) {
    int remaining = 0;
    for (auto& c : plan) {
      SkillInvocation& inv = side == Side::Left ? c.left : c.right;
      if (inv.skill == Skill::MoveAndGrasp && mentions(inv, fruit)) remaining = 3;
      if (remaining > 0) {
        inv = SkillInvocation{Skill::Wait, side, {}};
        --remaining;
      }
    }
  }
}

/// Replaces the first move_above(bowl) with move_to(overlap_center).
inline void release_beside_bowl(std::vector<BimanualCommand>& plan) {
  for (auto& c : plan) {
    for (SkillInvocation* inv : {&c.left, &c.right}) {
      if (inv->skill == Skill::MoveAbove && mentions(*inv, kBowl)) {
        *inv = SkillInvocation{Skill::MoveTo, inv->side, {std::string(kOverlapCenter)}};
        return;
      }
    }
  }
}

/// Cuts the plan right after the pour.
inline void truncate_after_pour(std::vector<BimanualCommand>& plan) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan[i].left.skill == Skill::PourOut || plan[i].right.skill == Skill::PourOut) {
      plan.resize(i + 1);
      return;
    }
  }
}

inline std::vector<FaultFixture> fault_fixtures(std::uint64_t seed = 7) {
  std::vector<FaultFixture> out;
  out.push_back({"skip-pour", TaskClass::ServeWater,
                 faulty_oracle(TaskClass::ServeWater, Variant::SameLeft, seed,
                               [](auto& p) { drop_skill(p, Skill::PourOut); }),
                 FailureTag::Temporal});
  out.push_back({"pour-without-move_above", TaskClass::ServeWater,
                 faulty_oracle(TaskClass::ServeWater, Variant::SameRight, seed,
                               [](auto& p) { drop_skill(p, Skill::MoveAbove); }),
                 FailureTag::Spatial});
  out.push_back({"serve-bowl-missing-one-fruit", TaskClass::ServeFruit,
                 faulty_oracle(TaskClass::ServeFruit, Variant::FruitsDiffBowlLeft, seed,
                               [](auto& p) { drop_fruit(p, kBanana); }),
                 FailureTag::Temporal});
  out.push_back({"release-fruit-beside-bowl", TaskClass::ServeFruit,
                 faulty_oracle(TaskClass::ServeFruit, Variant::FruitsSameBowlRight, seed,
                               [](auto& p) { release_beside_bowl(p); }),
                 FailureTag::Spatial});
  {
    const GeneratedTask t = generate(TaskClass::ServeWater, Variant::DiffYellowRight, seed);
    IdleBackend idle;
    out.push_back({"wait-only", TaskClass::ServeWater, run_episode(t, idle, EpisodeOptions{}),
                   FailureTag::Other});
  }
  out.push_back({"premature-finish", TaskClass::ServeWater,
                 faulty_oracle(TaskClass::ServeWater, Variant::DiffYellowLeft, seed,
                               [](auto& p) { truncate_after_pour(p); }),
                 FailureTag::Other});
  return out;
}

}  // namespace fixtures
