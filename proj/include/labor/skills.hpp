#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labor/world.hpp"

namespace labor {

/// Manipulation skills. The spellings returned by skill_name are part of the
/// tool-call wire contract.
enum class Skill { MoveTo, MoveAndGrasp, MoveAbove, PushTo, PourOut, Release, Reset, Wait };

inline constexpr std::array<Skill, 8> kSkills{Skill::MoveTo,  Skill::MoveAndGrasp, Skill::MoveAbove,
                                              Skill::PushTo,  Skill::PourOut,      Skill::Release,
                                              Skill::Reset,   Skill::Wait};

inline constexpr std::string_view skill_name(Skill s) {
  switch (s) {
    case Skill::MoveTo: return "move_to";
    case Skill::MoveAndGrasp: return "move_and_grasp";
    case Skill::MoveAbove: return "move_above";
    case Skill::PushTo: return "push_to";
    case Skill::PourOut: return "pour_out";
    case Skill::Release: return "release";
    case Skill::Reset: return "reset";
    case Skill::Wait: return "wait";
  }
  return "?";
}

inline std::optional<Skill> skill_from_name(std::string_view name) {
  for (Skill s : kSkills) {
    if (skill_name(s) == name) return s;
  }
  return std::nullopt;
}

/// Number of object-name arguments (side is implicit).
inline constexpr std::size_t skill_arity(Skill s) {
  switch (s) {
    case Skill::MoveTo:
    case Skill::MoveAndGrasp:
    case Skill::MoveAbove: return 1;
    case Skill::PushTo: return 2;
    default: return 0;
  }
}

inline std::string skill_name_list() {
  std::string out;
  for (Skill s : kSkills) {
    if (!out.empty()) out += ", ";
    out += skill_name(s);
  }
  return out;
}

enum class RejectReason {
  BadArity,
  UnknownObject,
  UnreachableZone,
  TwoHandHoldViolation,
  HandOccupied,
  NotGraspable,
  TwoHandsRequired,
  ObjectHeld,
  NotPushable,
  SelfReference,
  ConflictingEffects,
};

inline constexpr std::string_view reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::BadArity: return "BadArity";
    case RejectReason::UnknownObject: return "UnknownObject";
    case RejectReason::UnreachableZone: return "UnreachableZone";
    case RejectReason::TwoHandHoldViolation: return "TwoHandHoldViolation";
    case RejectReason::HandOccupied: return "HandOccupied";
    case RejectReason::NotGraspable: return "NotGraspable";
    case RejectReason::TwoHandsRequired: return "TwoHandsRequired";
    case RejectReason::ObjectHeld: return "ObjectHeld";
    case RejectReason::NotPushable: return "NotPushable";
    case RejectReason::SelfReference: return "SelfReference";
    case RejectReason::ConflictingEffects: return "ConflictingEffects";
  }
  return "?";
}

inline std::optional<RejectReason> reason_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(RejectReason::ConflictingEffects); ++i) {
    auto r = static_cast<RejectReason>(i);
    if (reason_name(r) == name) return r;
  }
  return std::nullopt;
}

struct SkillInvocation {
  Skill skill = Skill::Wait;
  Side side = Side::Left;
  std::vector<std::string> args;

  bool operator==(const SkillInvocation&) const = default;
};

/// "move_and_grasp(apple)" -- side is rendered by the caller.
inline std::string call_text(const SkillInvocation& inv) {
  std::string out(skill_name(inv.skill));
  out += "(";
  for (std::size_t i = 0; i < inv.args.size(); ++i) {
    if (i) out += ", ";
    out += inv.args[i];
  }
  return out + ")";
}

struct Violation {
  Side side = Side::Left;
  RejectReason reason = RejectReason::BadArity;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct SkillOutcome {
  enum class Status { Ok, Rejected };

  Status status = Status::Ok;
  std::optional<RejectReason> reason;
  std::string message;
  std::string world_delta;

  bool ok() const { return status == Status::Ok; }

  static SkillOutcome accepted(const SkillInvocation& inv, std::string delta) {
    std::string msg = call_text(inv) + ": ok";
    if (!delta.empty()) msg += ", " + delta;
    return {Status::Ok, std::nullopt, std::move(msg), std::move(delta)};
  }

  static SkillOutcome rejected(const SkillInvocation& inv, const Violation& v) {
    return {Status::Rejected, v.reason,
            call_text(inv) + ": rejected (" + std::string(reason_name(v.reason)) + "): " +
                v.message,
            ""};
  }

  bool operator==(const SkillOutcome&) const = default;
};

// ---------------------------------------------------------------------------
// Preconditions

namespace detail {

inline Violation violation(Side s, RejectReason r, std::string msg) {
  return Violation{s, r, std::move(msg)};
}

inline std::string unknown(std::string_view name) {
  return "unknown object '" + std::string(name) + "'";
}

inline std::string out_of_reach(Side s, std::string_view what) {
  return std::string(what) + " is outside the workspace of the " + std::string(side_name(s)) +
         " hand";
}

/// Final resting point of a pushed object: on the segment toward the target,
/// stopping push_standoff short of it. Objects already that close stay put.
inline Position push_destination(const WorldState& w, const Position& from, const Position& to) {
  const double d = distance_xy(from, to);
  const double standoff = w.constants.push_standoff;
  if (d <= standoff) return {from.x, from.y, w.constants.table_z};
  const double ux = (to.x - from.x) / d;
  const double uy = (to.y - from.y) / d;
  return {to.x - ux * standoff, to.y - uy * standoff, w.constants.table_z};
}

/// Highest container within `radius` (xy) at or below `from`, excluding
/// anything inside `excluded`. Ties on height go to the smaller name.
inline std::optional<std::string> receiver_below(const WorldState& w, const Position& from,
                                                 double radius, std::string_view excluded,
                                                 std::string_view item) {
  const ObjectState* it = w.find(item);
  if (it == nullptr || is_container(it->kind)) return std::nullopt;
  std::optional<std::string> best;
  double best_z = 0.0;
  for (const auto& [name, o] : w.objects) {
    if (!is_container(o.kind)) continue;
    if (in_subtree(w, excluded, name) || in_subtree(w, item, name)) continue;
    if (distance_xy(o.position, from) > radius || o.position.z > from.z) continue;
    if (!best || o.position.z > best_z) {
      best = name;
      best_z = o.position.z;
    }
  }
  return best;
}

/// Puts a just-released object down: into a container below `from` if one is
/// within release radius, otherwise onto the table under `from`.
inline std::string drop_object(WorldState& w, const std::string& name, const Position& from) {
  if (auto r = receiver_below(w, from, w.constants.release_radius, name, name)) {
    insert_into(w, *r, name);
    return name + " now inside " + *r;
  }
  place_subtree(w, name, {from.x, from.y, w.constants.table_z});
  return name + " on the table at " + format_position(w.objects.at(name).position);
}

/// Empties `holder` from `from`: each content goes into the container below
/// or lands spilled on the table.
inline std::string pour_from(WorldState& w, const std::string& holder, const Position& from) {
  const std::vector<std::string> contents = w.objects.at(holder).contains;
  std::string delta;
  for (const auto& item : contents) {
    if (!delta.empty()) delta += "; ";
    auto receiver = receiver_below(w, from, w.constants.pour_radius, holder, item);
    detach_from_container(w, item);
    if (receiver) {
      insert_into(w, *receiver, item);
      delta += item + " poured into " + *receiver;
    } else {
      place_subtree(w, item, {from.x, from.y, w.constants.table_z});
      w.objects.at(item).spilled = true;
      delta += item + " spilled on the table at " + format_position(w.objects.at(item).position);
    }
  }
  return delta;
}

}  // namespace detail

/// Single-hand precondition check against `w`. Joint two-hand semantics are
/// decided by the coordination layer before falling back to this.
inline std::optional<Violation> check_skill(const WorldState& w, const SkillInvocation& inv) {
  using detail::violation;
  const Side s = inv.side;
  const HandState& hand = w.hand(s);
  const WorldConstants& c = w.constants;

  if (inv.args.size() != skill_arity(inv.skill)) {
    return violation(s, RejectReason::BadArity,
                     std::string(skill_name(inv.skill)) + " takes " +
                         std::to_string(skill_arity(inv.skill)) + " object name(s)");
  }

  switch (inv.skill) {
    case Skill::MoveTo:
    case Skill::MoveAbove: {
      const ObjectState* target = w.find(inv.args[0]);
      if (target == nullptr) return violation(s, RejectReason::UnknownObject, detail::unknown(inv.args[0]));
      if (in_two_hand_hold(w, s)) {
        return violation(s, RejectReason::TwoHandHoldViolation,
                         "both hands hold " + *two_hand_held(w) +
                             "; moving one hand alone would tear it apart");
      }
      if (hand.held && in_subtree(w, *hand.held, target->name)) {
        return violation(s, RejectReason::SelfReference,
                         target->name + " moves with the " + std::string(side_name(s)) + " hand");
      }
      const double dz = inv.skill == Skill::MoveTo ? c.grip_height : c.hover_height;
      if (!reachable(s, raised(target->position, dz), c)) {
        return violation(s, RejectReason::UnreachableZone, detail::out_of_reach(s, target->name));
      }
      return std::nullopt;
    }
    case Skill::MoveAndGrasp: {
      const ObjectState* target = w.find(inv.args[0]);
      if (target == nullptr) return violation(s, RejectReason::UnknownObject, detail::unknown(inv.args[0]));
      if (hand.held) {
        return violation(s, RejectReason::HandOccupied,
                         std::string(side_name(s)) + " hand already holds " + *hand.held);
      }
      if (!is_graspable(target->kind)) {
        return violation(s, RejectReason::NotGraspable, target->name + " cannot be grasped");
      }
      if (target->two_hand_required) {
        return violation(s, RejectReason::TwoHandsRequired,
                         target->name + " must be grasped by both hands together");
      }
      if (is_held(w, target->name)) {
        return violation(s, RejectReason::ObjectHeld,
                         target->name + " is held by the " + std::string(side_name(opposite(s))) +
                             " hand");
      }
      if (!reachable(s, raised(target->position, c.grip_height), c)) {
        return violation(s, RejectReason::UnreachableZone, detail::out_of_reach(s, target->name));
      }
      return std::nullopt;
    }
    case Skill::PushTo: {
      const ObjectState* source = w.find(inv.args[0]);
      const ObjectState* target = w.find(inv.args[1]);
      if (source == nullptr) return violation(s, RejectReason::UnknownObject, detail::unknown(inv.args[0]));
      if (target == nullptr) return violation(s, RejectReason::UnknownObject, detail::unknown(inv.args[1]));
      if (source == target) {
        return violation(s, RejectReason::SelfReference, "cannot push " + source->name + " onto itself");
      }
      if (hand.held) {
        return violation(s, RejectReason::HandOccupied,
                         std::string(side_name(s)) + " hand must be empty to push");
      }
      if (is_held(w, source->name)) {
        return violation(s, RejectReason::ObjectHeld, source->name + " is held by a hand");
      }
      if (source->kind == ObjectKind::Marker || container_of(w, source->name)) {
        return violation(s, RejectReason::NotPushable, source->name + " is not resting on the table");
      }
      if (!reachable(s, source->position, c)) {
        return violation(s, RejectReason::UnreachableZone, detail::out_of_reach(s, source->name));
      }
      const Position dest = detail::push_destination(w, source->position, target->position);
      if (!reachable(s, dest, c)) {
        return violation(s, RejectReason::UnreachableZone,
                         detail::out_of_reach(s, "push destination " + format_position(dest)));
      }
      return std::nullopt;
    }
    case Skill::PourOut:
      if (in_two_hand_hold(w, s)) {
        return violation(s, RejectReason::TwoHandHoldViolation,
                         "both hands hold " + *two_hand_held(w) + "; pour with both hands together");
      }
      return std::nullopt;
    case Skill::Reset:
      if (hand.held) {
        return violation(s, RejectReason::HandOccupied,
                         "release " + *hand.held + " before resetting the hand");
      }
      return std::nullopt;
    case Skill::Release:
    case Skill::Wait:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Applies one hand's skill. Rejections leave `w` untouched. Does not advance
/// the step counter.
inline SkillOutcome apply_skill(WorldState& w, const SkillInvocation& inv) {
  if (auto v = check_skill(w, inv)) return SkillOutcome::rejected(inv, *v);

  const Side s = inv.side;
  HandState& hand = w.hand(s);
  const WorldConstants& c = w.constants;
  const std::string hs(side_name(s));

  switch (inv.skill) {
    case Skill::MoveTo:
    case Skill::MoveAbove: {
      const double dz = inv.skill == Skill::MoveTo ? c.grip_height : c.hover_height;
      hand.position = raised(w.objects.at(inv.args[0]).position, dz);
      std::string delta = hs + " hand at " + format_position(hand.position);
      if (hand.held) {
        sync_held_position(w, *hand.held);
        delta += " with " + *hand.held;
      }
      return SkillOutcome::accepted(inv, delta);
    }
    case Skill::MoveAndGrasp: {
      std::string delta;
      if (hand.fingers == Fingers::Closed) delta = "fingers opened first; ";
      const std::string& name = inv.args[0];
      detach_from_container(w, name);
      hand.position = raised(w.objects.at(name).position, c.grip_height);
      hand.fingers = Fingers::Closed;
      hand.held = name;
      w.objects.at(name).spilled = false;
      sync_held_position(w, name);
      return SkillOutcome::accepted(inv, delta + "holding " + name);
    }
    case Skill::PushTo: {
      const std::string& name = inv.args[0];
      const Position dest = detail::push_destination(w, w.objects.at(name).position,
                                                     w.objects.at(inv.args[1]).position);
      place_subtree(w, name, dest);
      hand.position = raised(dest, c.grip_height);
      return SkillOutcome::accepted(inv, name + " pushed to " + format_position(dest));
    }
    case Skill::PourOut: {
      if (!hand.held) return SkillOutcome::accepted(inv, "nothing to pour");
      std::string delta = detail::pour_from(w, *hand.held, hand.position);
      return SkillOutcome::accepted(inv, delta.empty() ? *hand.held + " was empty" : delta);
    }
    case Skill::Release: {
      hand.fingers = Fingers::Open;
      if (!hand.held) return SkillOutcome::accepted(inv, "fingers open");
      const std::string name = *hand.held;
      hand.held.reset();
      HandState& other = w.hand(opposite(s));
      if (other.held && *other.held == name) {
        if (w.objects.at(name).two_hand_required) {
          other.held.reset();
          const Position at = w.objects.at(name).position;
          place_subtree(w, name, {at.x, at.y, c.table_z});
          return SkillOutcome::accepted(
              inv, name + " cannot be held by one hand and drops to the table at " +
                       format_position(w.objects.at(name).position));
        }
        sync_held_position(w, name);
        return SkillOutcome::accepted(inv, name + " now held by the " +
                                               std::string(side_name(opposite(s))) + " hand only");
      }
      return SkillOutcome::accepted(inv, detail::drop_object(w, name, hand.position));
    }
    case Skill::Reset:
      hand.position = hand.home_position;
      hand.fingers = Fingers::Open;
      hand.palm = Palm::Neutral;
      return SkillOutcome::accepted(inv, hs + " hand at home");
    case Skill::Wait:
      return SkillOutcome::accepted(inv, "");
  }
  return SkillOutcome::accepted(inv, "");
}

// ---------------------------------------------------------------------------
// Information skills

inline std::string get_arm_state(const WorldState& w, Side s) {
  const HandState& h = w.hand(s);
  std::string out = std::string(side_name(s)) + ": at " + format_position(h.position) + ", palm " +
                    (h.palm == Palm::Neutral ? "neutral" : "flipped") + ", fingers " +
                    (h.fingers == Fingers::Open ? "open" : "closed") + ", ";
  out += h.held ? "holding " + *h.held : std::string("empty");
  return out;
}

inline std::string get_obj_position(const WorldState& w, std::string_view name) {
  const ObjectState* o = w.find(name);
  if (o == nullptr) return "error (UnknownObject): " + detail::unknown(name);
  return format_position(o->position);
}

}  // namespace labor
