#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "labor/constants.hpp"
#include "labor/error.hpp"
#include "labor/geometry.hpp"

namespace labor {

enum class Side { Left, Right };

inline constexpr std::array<Side, 2> kSides{Side::Left, Side::Right};

inline constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

inline constexpr std::string_view side_name(Side s) { return s == Side::Left ? "left" : "right"; }

inline std::optional<Side> side_from_name(std::string_view name) {
  if (name == "left") return Side::Left;
  if (name == "right") return Side::Right;
  return std::nullopt;
}

enum class Zone { LeftExclusive, Overlap, RightExclusive };

inline constexpr std::string_view zone_name(Zone z) {
  switch (z) {
    case Zone::LeftExclusive: return "LeftExclusive";
    case Zone::Overlap: return "Overlap";
    case Zone::RightExclusive: return "RightExclusive";
  }
  return "?";
}

inline constexpr Zone exclusive_zone(Side s) {
  return s == Side::Left ? Zone::LeftExclusive : Zone::RightExclusive;
}

enum class ObjectKind { Cup, Bowl, Fruit, WaterToken, Marker, Scissors };

inline constexpr std::string_view kind_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::Cup: return "cup";
    case ObjectKind::Bowl: return "bowl";
    case ObjectKind::Fruit: return "fruit";
    case ObjectKind::WaterToken: return "water-token";
    case ObjectKind::Marker: return "marker";
    case ObjectKind::Scissors: return "scissors";
  }
  return "?";
}

inline std::optional<ObjectKind> kind_from_name(std::string_view name) {
  for (auto k : {ObjectKind::Cup, ObjectKind::Bowl, ObjectKind::Fruit, ObjectKind::WaterToken,
                 ObjectKind::Marker, ObjectKind::Scissors}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

inline constexpr bool is_container(ObjectKind k) {
  return k == ObjectKind::Cup || k == ObjectKind::Bowl;
}

/// Water is a liquid stand-in and markers are poses; neither can be picked up.
inline constexpr bool is_graspable(ObjectKind k) {
  return k != ObjectKind::Marker && k != ObjectKind::WaterToken;
}

struct ObjectState {
  std::string name;
  ObjectKind kind = ObjectKind::Fruit;
  Position position;
  std::vector<std::string> contains;  // kept sorted by name
  bool spilled = false;
  bool two_hand_required = false;
  Position original_position;

  bool operator==(const ObjectState&) const = default;
};

enum class Palm { Neutral, Flipped };
enum class Fingers { Open, Closed };

struct HandState {
  Side side = Side::Left;
  Position position;
  Palm palm = Palm::Neutral;
  Fingers fingers = Fingers::Open;
  std::optional<std::string> held;
  Position home_position;

  bool operator==(const HandState&) const = default;
};

struct WorldState {
  HandState left;
  HandState right;
  std::map<std::string, ObjectState> objects;
  int step = 0;
  std::uint64_t seed = 0;
  WorldConstants constants;

  HandState& hand(Side s) { return s == Side::Left ? left : right; }
  const HandState& hand(Side s) const { return s == Side::Left ? left : right; }

  const ObjectState* find(std::string_view name) const {
    auto it = objects.find(std::string(name));
    return it == objects.end() ? nullptr : &it->second;
  }
  ObjectState* find(std::string_view name) {
    auto it = objects.find(std::string(name));
    return it == objects.end() ? nullptr : &it->second;
  }

  bool operator==(const WorldState&) const = default;
};

/// World with both hands at home and no objects.
inline WorldState make_empty_world(const WorldConstants& c = kDefaultConstants,
                                   std::uint64_t seed = 0) {
  WorldState w;
  w.constants = c;
  w.seed = seed;
  w.left = HandState{Side::Left, c.left_home, Palm::Neutral, Fingers::Open, std::nullopt,
                     c.left_home};
  w.right = HandState{Side::Right, c.right_home, Palm::Neutral, Fingers::Open, std::nullopt,
                      c.right_home};
  return w;
}

inline void add_object(WorldState& w, std::string name, ObjectKind kind, Position p) {
  ObjectState o;
  o.name = name;
  o.kind = kind;
  o.position = p;
  o.original_position = p;
  o.two_hand_required = kind == ObjectKind::Bowl;
  w.objects.emplace(std::move(name), std::move(o));
}

// ---------------------------------------------------------------------------
// Zones and reachability

inline bool within_table_y(double y, const WorldConstants& c = kDefaultConstants) {
  return y >= c.table_y_min && y <= c.table_y_max;
}

/// Zone containing p.y. Boundaries belong to Overlap. Throws OutOfTable
/// outside the table's y-extent.
inline Zone zone_of(const Position& p, const WorldConstants& c = kDefaultConstants) {
  if (!within_table_y(p.y, c)) {
    throw OutOfTable("y = " + format_coord(p.y) + " is outside the table");
  }
  if (p.y > c.overlap_half_width) return Zone::LeftExclusive;
  if (p.y < -c.overlap_half_width) return Zone::RightExclusive;
  return Zone::Overlap;
}

inline bool reachable(Side side, const Position& p, const WorldConstants& c = kDefaultConstants) {
  if (!within_table_y(p.y, c)) return false;
  return zone_of(p, c) != exclusive_zone(opposite(side));
}

// ---------------------------------------------------------------------------
// Relational queries

/// Name of the container directly holding `name`, if any.
inline std::optional<std::string> container_of(const WorldState& w, std::string_view name) {
  for (const auto& [cname, obj] : w.objects) {
    if (std::binary_search(obj.contains.begin(), obj.contains.end(), name,
                           std::less<>())) {
      return cname;
    }
  }
  return std::nullopt;
}

/// True if `name` is `root` or is (transitively) contained in it.
inline bool in_subtree(const WorldState& w, std::string_view root, std::string_view name) {
  if (root == name) return true;
  const ObjectState* r = w.find(root);
  if (r == nullptr) return false;
  for (const auto& child : r->contains) {
    if (in_subtree(w, child, name)) return true;
  }
  return false;
}

inline bool is_held_by(const WorldState& w, Side s, std::string_view name) {
  const auto& held = w.hand(s).held;
  return held && *held == name;
}

inline bool is_held(const WorldState& w, std::string_view name) {
  return is_held_by(w, Side::Left, name) || is_held_by(w, Side::Right, name);
}

/// Object held jointly by both hands, if any.
inline std::optional<std::string> two_hand_held(const WorldState& w) {
  if (w.left.held && w.right.held && *w.left.held == *w.right.held) return w.left.held;
  return std::nullopt;
}

inline bool in_two_hand_hold(const WorldState& w, Side s) {
  return w.hand(s).held && two_hand_held(w).has_value();
}

/// Moves an object and everything it contains to p.
inline void place_subtree(WorldState& w, std::string_view name, const Position& p) {
  ObjectState* o = w.find(name);
  if (o == nullptr) return;
  o->position = p;
  for (const auto& child : o->contains) place_subtree(w, child, p);
}

inline void detach_from_container(WorldState& w, std::string_view name) {
  if (auto c = container_of(w, name)) {
    auto& v = w.objects.at(*c).contains;
    v.erase(std::find(v.begin(), v.end(), name));
  }
}

inline void insert_into(WorldState& w, std::string_view container, const std::string& item) {
  auto& v = w.objects.at(std::string(container)).contains;
  v.insert(std::lower_bound(v.begin(), v.end(), item), item);
  place_subtree(w, item, w.objects.at(std::string(container)).position);
}

/// Recomputes the position of a held object from its holder(s).
inline void sync_held_position(WorldState& w, std::string_view name) {
  const bool l = is_held_by(w, Side::Left, name);
  const bool r = is_held_by(w, Side::Right, name);
  if (l && r) {
    place_subtree(w, name, midpoint(w.left.position, w.right.position));
  } else if (l) {
    place_subtree(w, name, w.left.position);
  } else if (r) {
    place_subtree(w, name, w.right.position);
  }
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string hand_summary(const WorldState& w, Side s) {
  const HandState& h = w.hand(s);
  std::string out = std::string(side_name(s)) + " hand: ";
  const std::string palm = h.palm == Palm::Neutral ? "palm neutral" : "palm flipped";
  if (h.held) {
    out += "holding " + *h.held + ", fingers closed, " + palm + ", at " +
           format_position(h.position);
  } else {
    out += h.fingers == Fingers::Open ? "open, empty, " : "closed, empty, ";
    out += h.position == h.home_position ? "at home " : "at ";
    out += format_position(h.position) + ", " + palm;
  }
  return out;
}

inline std::string object_summary(const WorldState& w, const ObjectState& o) {
  std::string out = o.name + " (" + std::string(kind_name(o.kind)) + ") at " +
                    format_position(o.position);
  if (!o.contains.empty()) {
    out += ", contains ";
    for (std::size_t i = 0; i < o.contains.size(); ++i) {
      if (i) out += " and ";
      out += o.contains[i];
    }
  }
  if (auto c = container_of(w, o.name)) out += ", inside " + *c;
  const bool l = is_held_by(w, Side::Left, o.name);
  const bool r = is_held_by(w, Side::Right, o.name);
  if (l && r) {
    out += ", held by both hands";
  } else if (l || r) {
    out += std::string(", held by ") + (l ? "left" : "right") + " hand";
  }
  if (o.spilled) out += ", spilled on the table";
  return out;
}

/// Deterministic textual observation of the whole world, objects by name.
inline std::string observe(const WorldState& w) {
  std::string out = "step " + std::to_string(w.step) + "\n";
  out += hand_summary(w, Side::Left) + "\n";
  out += hand_summary(w, Side::Right) + "\n";
  out += "objects:\n";
  for (const auto& [name, obj] : w.objects) out += "- " + object_summary(w, obj) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Consistency

/// Lists every violated world invariant; empty means consistent.
inline std::vector<std::string> check_invariants(const WorldState& w) {
  std::vector<std::string> errs;
  const WorldConstants& c = w.constants;

  for (Side s : kSides) {
    const HandState& h = w.hand(s);
    const std::string hs(side_name(s));
    if (h.side != s) errs.push_back(hs + " hand has wrong side tag");
    if (!reachable(s, h.position, c)) errs.push_back(hs + " hand is in the opposite exclusive zone");
    if (h.held) {
      const ObjectState* o = w.find(*h.held);
      if (o == nullptr) {
        errs.push_back(hs + " hand holds unknown object " + *h.held);
        continue;
      }
      if (h.fingers != Fingers::Closed) errs.push_back(hs + " hand holds with open fingers");
      if (!is_graspable(o->kind)) errs.push_back(hs + " hand holds ungraspable " + o->name);
      if (container_of(w, o->name)) errs.push_back(o->name + " is both held and contained");
    }
  }

  if (auto both = two_hand_held(w)) {
    if (w.objects.at(*both).position != midpoint(w.left.position, w.right.position)) {
      errs.push_back(*both + " is not at the midpoint of the two hands");
    }
  } else {
    for (Side s : kSides) {
      const HandState& h = w.hand(s);
      if (h.held && w.find(*h.held) && w.objects.at(*h.held).position != h.position) {
        errs.push_back(*h.held + " does not track the " + std::string(side_name(s)) + " hand");
      }
    }
  }

  std::map<std::string, int> parents;
  for (const auto& [name, o] : w.objects) {
    if (o.name != name) errs.push_back("object key mismatch for " + name);
    if (!std::is_sorted(o.contains.begin(), o.contains.end())) {
      errs.push_back(name + " contents not sorted");
    }
    if (!o.contains.empty() && !is_container(o.kind)) {
      errs.push_back(name + " is not a container but has contents");
    }
    for (const auto& child : o.contains) {
      ++parents[child];
      const ObjectState* co = w.find(child);
      if (co == nullptr) {
        errs.push_back(name + " contains unknown " + child);
      } else if (co->position != o.position) {
        errs.push_back(child + " does not track its container " + name);
      }
    }
  }
  for (const auto& [child, n] : parents) {
    if (n > 1) errs.push_back(child + " has several containers");
  }
  // Cycle check: walking up from any object must terminate.
  for (const auto& [name, o] : w.objects) {
    std::string cur = name;
    std::size_t hops = 0;
    while (auto p = container_of(w, cur)) {
      cur = *p;
      if (++hops > w.objects.size()) {
        errs.push_back("containment cycle through " + name);
        break;
      }
    }
  }

  for (const auto& [name, o] : w.objects) {
    if (o.kind == ObjectKind::Marker) continue;
    if (is_held(w, name) || container_of(w, name)) continue;
    if (o.position.z != c.table_z) errs.push_back(name + " rests off the table plane");
    if (o.position.x < c.table_x_min || o.position.x > c.table_x_max ||
        !within_table_y(o.position.y, c)) {
      errs.push_back(name + " lies outside the table");
    }
  }
  return errs;
}

}  // namespace labor
