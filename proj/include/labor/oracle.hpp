#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "labor/coordination.hpp"
#include "labor/tasks.hpp"

namespace labor {

namespace detail {

inline Side home_side(const WorldState& w, std::string_view name) {
  return zone_of(w.objects.at(std::string(name)).position, w.constants) == Zone::RightExclusive
             ? Side::Right
             : Side::Left;
}

inline SkillInvocation inv(Skill s, Side side, std::vector<std::string> args = {}) {
  return SkillInvocation{s, side, std::move(args)};
}

/// Builds commands from two per-hand queues, padding the shorter with waits.
class PlanBuilder {
 public:
  void push(Side s, Skill skill, std::vector<std::string> args = {}) {
    queue(s).push_back(inv(skill, s, std::move(args)));
  }

  /// Flushes both queues side by side.
  void barrier() {
    const std::size_t n = std::max(left_.size(), right_.size());
    for (std::size_t i = 0; i < n; ++i) {
      BimanualCommand cmd;
      if (i < left_.size()) cmd.left = left_[i];
      if (i < right_.size()) cmd.right = right_[i];
      plan_.push_back(std::move(cmd));
    }
    left_.clear();
    right_.clear();
  }

  void both(Skill skill, std::vector<std::string> args) {
    barrier();
    plan_.emplace_back(skill, args, skill, args);
  }

  std::vector<BimanualCommand> finish() {
    barrier();
    return std::move(plan_);
  }

 private:
  std::vector<SkillInvocation>& queue(Side s) { return s == Side::Left ? left_ : right_; }

  std::vector<SkillInvocation> left_;
  std::vector<SkillInvocation> right_;
  std::vector<BimanualCommand> plan_;
};

inline std::vector<BimanualCommand> serve_water_plan(const WorldState& w) {
  const std::string yellow(kYellowCup), blue(kBlueCup);
  const Side ys = home_side(w, kYellowCup);
  const Side bs = home_side(w, kBlueCup);
  PlanBuilder b;
  if (ys == bs) {
    // One hand does everything; the yellow cup never has to move until serving.
    const Side s = ys;
    b.push(s, Skill::MoveAndGrasp, {blue});
    b.push(s, Skill::MoveAbove, {yellow});
    b.push(s, Skill::PourOut);
    b.push(s, Skill::MoveTo, {std::string(kBlueCupHome)});
    b.push(s, Skill::Release);
    b.push(s, Skill::MoveAndGrasp, {yellow});
    b.push(s, Skill::MoveTo, {std::string(kServingPosition)});
    return b.finish();
  }
  // Cups on opposite sides: meet in the overlap area, pour, then split up.
  b.push(ys, Skill::MoveAndGrasp, {yellow});
  b.push(bs, Skill::MoveAndGrasp, {blue});
  b.barrier();
  b.push(ys, Skill::MoveTo, {std::string(kOverlapCenter)});
  b.barrier();
  b.push(bs, Skill::MoveAbove, {yellow});
  b.barrier();
  b.push(bs, Skill::PourOut);
  b.barrier();
  b.push(ys, Skill::MoveTo, {std::string(kServingPosition)});
  b.push(bs, Skill::MoveTo, {std::string(kBlueCupHome)});
  b.barrier();
  b.push(bs, Skill::Release);
  return b.finish();
}

inline std::vector<BimanualCommand> serve_fruit_plan(const WorldState& w) {
  const std::string bowl(kBowl);
  const Side bowl_side = home_side(w, kBowl);
  PlanBuilder b;
  // The bowl goes to the overlap area first so both hands can fill it.
  b.push(bowl_side, Skill::PushTo, {bowl, std::string(kOverlapCenter)});
  for (std::string_view fruit : {kApple, kBanana}) {
    const Side s = home_side(w, fruit);
    b.push(s, Skill::MoveAndGrasp, {std::string(fruit)});
    b.push(s, Skill::MoveAbove, {bowl});
    b.push(s, Skill::Release);
  }
  b.both(Skill::MoveAndGrasp, {bowl});
  b.both(Skill::MoveTo, {std::string(kServingPosition)});
  return b.finish();
}

}  // namespace detail

/// Hand-written solver for generated task instances. The returned commands
/// reach the goal when executed in order from `initial`.
inline std::vector<BimanualCommand> oracle_plan(const TaskSpec& spec, const WorldState& initial) {
  return spec.task_class == TaskClass::ServeWater ? detail::serve_water_plan(initial)
                                                  : detail::serve_fruit_plan(initial);
}

}  // namespace labor
