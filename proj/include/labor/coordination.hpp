#pragma once

#include <optional>
#include <string>
#include <vector>

#include "labor/skills.hpp"
#include "labor/world.hpp"

namespace labor {

struct BimanualCommand {
  SkillInvocation left{Skill::Wait, Side::Left, {}};
  SkillInvocation right{Skill::Wait, Side::Right, {}};

  BimanualCommand() = default;
  BimanualCommand(Skill l, std::vector<std::string> largs, Skill r, std::vector<std::string> rargs)
      : left{l, Side::Left, std::move(largs)}, right{r, Side::Right, std::move(rargs)} {}

  const SkillInvocation& of(Side s) const { return s == Side::Left ? left : right; }

  bool operator==(const BimanualCommand&) const = default;
};

enum class Pattern { Uncoordinated, AsyncCoordinated, SyncCoordinated };

inline constexpr std::string_view pattern_name(Pattern p) {
  switch (p) {
    case Pattern::Uncoordinated: return "uncoordinated";
    case Pattern::AsyncCoordinated: return "asynchronous";
    case Pattern::SyncCoordinated: return "synchronous";
  }
  return "?";
}

inline std::optional<Pattern> pattern_from_name(std::string_view name) {
  for (auto p : {Pattern::Uncoordinated, Pattern::AsyncCoordinated, Pattern::SyncCoordinated}) {
    if (pattern_name(p) == name) return p;
  }
  return std::nullopt;
}

/// Exactly one `wait` is asynchronous; identical skill and arguments on both
/// sides is synchronous; anything else is uncoordinated.
inline Pattern classify(const BimanualCommand& cmd) {
  const bool lw = cmd.left.skill == Skill::Wait;
  const bool rw = cmd.right.skill == Skill::Wait;
  if (lw != rw) return Pattern::AsyncCoordinated;
  if (cmd.left.skill == cmd.right.skill && cmd.left.args == cmd.right.args) {
    return Pattern::SyncCoordinated;
  }
  return Pattern::Uncoordinated;
}

struct StepResult {
  SkillOutcome left;
  SkillOutcome right;
  Pattern pattern = Pattern::Uncoordinated;
  std::string observation;

  const SkillOutcome& of(Side s) const { return s == Side::Left ? left : right; }
};

namespace detail {

/// Synchronous commands that act on one object with both hands at once.
enum class JointKind { None, Grasp, Move, Pour, Release, Push };

struct Analysis {
  Pattern pattern = Pattern::Uncoordinated;
  JointKind joint = JointKind::None;
  std::optional<Violation> left;
  std::optional<Violation> right;

  std::optional<Violation>& of(Side s) { return s == Side::Left ? left : right; }
  const std::optional<Violation>& of(Side s) const { return s == Side::Left ? left : right; }
};

inline Position joint_hand_position(const WorldState& w, Side s, const Position& center) {
  const double dy = s == Side::Left ? w.constants.two_hand_half_span : -w.constants.two_hand_half_span;
  return {center.x, center.y + dy, center.z};
}

inline JointKind joint_kind(const WorldState& w, const BimanualCommand& cmd, Pattern p) {
  if (p != Pattern::SyncCoordinated) return JointKind::None;
  const SkillInvocation& inv = cmd.left;
  if (inv.args.size() != skill_arity(inv.skill)) return JointKind::None;
  switch (inv.skill) {
    case Skill::MoveAndGrasp: {
      const ObjectState* o = w.find(inv.args[0]);
      return o && o->two_hand_required ? JointKind::Grasp : JointKind::None;
    }
    case Skill::PushTo: {
      const ObjectState* o = w.find(inv.args[0]);
      return o && o->two_hand_required ? JointKind::Push : JointKind::None;
    }
    case Skill::MoveTo:
    case Skill::MoveAbove: return two_hand_held(w) ? JointKind::Move : JointKind::None;
    case Skill::PourOut: return two_hand_held(w) ? JointKind::Pour : JointKind::None;
    case Skill::Release: return two_hand_held(w) ? JointKind::Release : JointKind::None;
    default: return JointKind::None;
  }
}

/// Fills the partner side of a one-sided failure in an all-or-nothing joint op.
inline void reject_partner(Analysis& a, RejectReason why, const std::string& msg) {
  for (Side s : kSides) {
    if (a.of(s) && !a.of(opposite(s))) {
      a.of(opposite(s)) = Violation{opposite(s), why, msg};
      return;
    }
  }
}

inline void check_joint_grasp(const WorldState& w, const BimanualCommand& cmd, Analysis& a) {
  const ObjectState& obj = w.objects.at(cmd.left.args[0]);
  for (Side s : kSides) {
    const HandState& h = w.hand(s);
    if (h.held) {
      a.of(s) = Violation{s, RejectReason::HandOccupied,
                          std::string(side_name(s)) + " hand already holds " + *h.held};
    } else if (is_held(w, obj.name)) {
      a.of(s) = Violation{s, RejectReason::ObjectHeld, obj.name + " is already held"};
    } else if (!reachable(s, obj.position, w.constants)) {
      a.of(s) = Violation{s, RejectReason::UnreachableZone, out_of_reach(s, obj.name)};
    }
  }
  reject_partner(a, RejectReason::TwoHandsRequired,
                 obj.name + " must be grasped by both hands together");
}

inline void check_joint_move(const WorldState& w, const BimanualCommand& cmd, Analysis& a) {
  const std::string held = *two_hand_held(w);
  const std::string& target_name = cmd.left.args[0];
  const ObjectState* target = w.find(target_name);
  if (target == nullptr) {
    for (Side s : kSides) a.of(s) = Violation{s, RejectReason::UnknownObject, unknown(target_name)};
    return;
  }
  if (in_subtree(w, held, target_name)) {
    for (Side s : kSides) {
      a.of(s) = Violation{s, RejectReason::SelfReference, target_name + " moves with the hands"};
    }
    return;
  }
  const double dz = cmd.left.skill == Skill::MoveTo ? w.constants.grip_height : w.constants.hover_height;
  const Position center = raised(target->position, dz);
  for (Side s : kSides) {
    if (!reachable(s, center, w.constants)) {
      a.of(s) = Violation{s, RejectReason::UnreachableZone, out_of_reach(s, target_name)};
    }
  }
  reject_partner(a, RejectReason::TwoHandHoldViolation,
                 "both hands hold " + held + "; moving one hand alone would tear it apart");
}

inline bool same_claim(const BimanualCommand& cmd) {
  auto claimed = [](const SkillInvocation& inv) -> std::optional<std::string> {
    if (inv.skill == Skill::MoveAndGrasp || inv.skill == Skill::PushTo) return inv.args.at(0);
    return std::nullopt;
  };
  auto l = claimed(cmd.left);
  auto r = claimed(cmd.right);
  return l && r && *l == *r;
}

/// Both sides valid on the pre-step world; they must also be valid and
/// commute when applied in either order.
inline bool commutes(const WorldState& w, const BimanualCommand& cmd) {
  if (cmd.left.skill == Skill::Wait || cmd.right.skill == Skill::Wait) return true;
  WorldState lr = w;
  WorldState rl = w;
  const bool ok = apply_skill(lr, cmd.left).ok() && apply_skill(lr, cmd.right).ok() &&
                  apply_skill(rl, cmd.right).ok() && apply_skill(rl, cmd.left).ok();
  return ok && lr == rl;
}

inline Analysis analyze(const WorldState& w, const BimanualCommand& cmd) {
  Analysis a;
  a.pattern = classify(cmd);
  a.joint = joint_kind(w, cmd, a.pattern);

  switch (a.joint) {
    case JointKind::Grasp: check_joint_grasp(w, cmd, a); return a;
    case JointKind::Move: check_joint_move(w, cmd, a); return a;
    case JointKind::Pour:
    case JointKind::Release: return a;
    case JointKind::Push:
      // A cooperative push; either side may still push alone if the other
      // is rejected.
      a.left = check_skill(w, cmd.left);
      a.right = check_skill(w, cmd.right);
      return a;
    case JointKind::None: break;
  }

  a.left = check_skill(w, cmd.left);
  a.right = check_skill(w, cmd.right);
  if (!a.left && !a.right && (same_claim(cmd) || !commutes(w, cmd))) {
    const std::string msg = "left command " + call_text(cmd.left) + " and right command " +
                            call_text(cmd.right) + " interfere; the whole command was rejected";
    a.left = Violation{Side::Left, RejectReason::ConflictingEffects, msg};
    a.right = Violation{Side::Right, RejectReason::ConflictingEffects, msg};
  }
  return a;
}

inline std::string apply_joint(WorldState& w, const BimanualCommand& cmd, JointKind kind) {
  const WorldConstants& c = w.constants;
  switch (kind) {
    case JointKind::Grasp: {
      const std::string name = cmd.left.args[0];
      const Position center = raised(w.objects.at(name).position, c.grip_height);
      detach_from_container(w, name);
      for (Side s : kSides) {
        HandState& h = w.hand(s);
        h.position = joint_hand_position(w, s, center);
        h.fingers = Fingers::Closed;
        h.held = name;
      }
      sync_held_position(w, name);
      return "both hands holding " + name;
    }
    case JointKind::Move: {
      const std::string held = *two_hand_held(w);
      const double dz = cmd.left.skill == Skill::MoveTo ? c.grip_height : c.hover_height;
      const Position center = raised(w.objects.at(cmd.left.args[0]).position, dz);
      for (Side s : kSides) w.hand(s).position = joint_hand_position(w, s, center);
      sync_held_position(w, held);
      return held + " carried by both hands to " + format_position(w.objects.at(held).position);
    }
    case JointKind::Pour: {
      const std::string held = *two_hand_held(w);
      std::string delta = pour_from(w, held, w.objects.at(held).position);
      return delta.empty() ? held + " was empty" : delta;
    }
    case JointKind::Release: {
      const std::string held = *two_hand_held(w);
      const Position at = w.objects.at(held).position;
      for (Side s : kSides) {
        w.hand(s).held.reset();
        w.hand(s).fingers = Fingers::Open;
      }
      return drop_object(w, held, at);
    }
    case JointKind::Push: {
      const std::string& name = cmd.left.args[0];
      const Position dest = push_destination(w, w.objects.at(name).position,
                                             w.objects.at(cmd.left.args[1]).position);
      place_subtree(w, name, dest);
      for (Side s : kSides) w.hand(s).position = joint_hand_position(w, s, raised(dest, c.grip_height));
      return name + " pushed by both hands to " + format_position(dest);
    }
    case JointKind::None: break;
  }
  return "";
}

inline std::string step_observation(const WorldState& w, const StepResult& r) {
  return "left: " + r.left.message + "\nright: " + r.right.message + "\npattern: " +
         std::string(pattern_name(r.pattern)) + "\n" + observe(w);
}

}  // namespace detail

/// Per-side violations `execute` would report for `cmd`, in left-right order.
/// Does not modify `w`.
inline std::vector<Violation> validate(const WorldState& w, const BimanualCommand& cmd) {
  const auto a = detail::analyze(w, cmd);
  std::vector<Violation> out;
  if (a.left) out.push_back(*a.left);
  if (a.right) out.push_back(*a.right);
  return out;
}

/// Executes one bimanual step. Both sides are validated against the pre-step
/// world, then applied. The step counter always advances by one.
inline StepResult execute(WorldState& w, const BimanualCommand& cmd) {
  const detail::Analysis a = detail::analyze(w, cmd);
  StepResult r;
  r.pattern = a.pattern;

  const bool joint_effect = a.joint != detail::JointKind::None && !a.left && !a.right;
  if (joint_effect) {
    const std::string delta = detail::apply_joint(w, cmd, a.joint);
    r.left = SkillOutcome::accepted(cmd.left, delta);
    r.right = SkillOutcome::accepted(cmd.right, delta);
  } else if (a.joint != detail::JointKind::None && a.joint != detail::JointKind::Push) {
    // All-or-nothing joint op with at least one failing side.
    r.left = SkillOutcome::rejected(cmd.left, *a.left);
    r.right = SkillOutcome::rejected(cmd.right, *a.right);
  } else {
    for (Side s : kSides) {
      SkillOutcome& out = s == Side::Left ? r.left : r.right;
      if (a.of(s)) {
        out = SkillOutcome::rejected(cmd.of(s), *a.of(s));
      } else {
        out = apply_skill(w, cmd.of(s));
      }
    }
  }

  ++w.step;
  r.observation = detail::step_observation(w, r);
  return r;
}

}  // namespace labor
