#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "labor/snapshot.hpp"
#include "labor/world.hpp"

namespace labor {

enum class TaskClass { ServeWater, ServeFruit };

inline constexpr std::array<TaskClass, 2> kTaskClasses{TaskClass::ServeWater, TaskClass::ServeFruit};

inline constexpr std::string_view class_name(TaskClass c) {
  return c == TaskClass::ServeWater ? "ServeWater" : "ServeFruit";
}

inline constexpr std::string_view class_cli_name(TaskClass c) {
  return c == TaskClass::ServeWater ? "serve_water" : "serve_fruit";
}

inline std::optional<TaskClass> class_from_name(std::string_view name) {
  for (TaskClass c : kTaskClasses) {
    if (name == class_name(c) || name == class_cli_name(c)) return c;
  }
  return std::nullopt;
}

enum class Variant {
  SameLeft,
  SameRight,
  DiffYellowLeft,
  DiffYellowRight,
  FruitsSameBowlLeft,
  FruitsSameBowlRight,
  FruitsDiffBowlLeft,
  FruitsDiffBowlRight,
};

inline constexpr std::array<Variant, 4> kServeWaterVariants{
    Variant::SameLeft, Variant::SameRight, Variant::DiffYellowLeft, Variant::DiffYellowRight};
inline constexpr std::array<Variant, 4> kServeFruitVariants{
    Variant::FruitsSameBowlLeft, Variant::FruitsSameBowlRight, Variant::FruitsDiffBowlLeft,
    Variant::FruitsDiffBowlRight};

inline std::span<const Variant> variants_for(TaskClass c) {
  return c == TaskClass::ServeWater ? std::span<const Variant>(kServeWaterVariants)
                                    : std::span<const Variant>(kServeFruitVariants);
}

inline constexpr std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::SameLeft: return "SameLeft";
    case Variant::SameRight: return "SameRight";
    case Variant::DiffYellowLeft: return "DiffYellowLeft";
    case Variant::DiffYellowRight: return "DiffYellowRight";
    case Variant::FruitsSameBowlLeft: return "FruitsSame-BowlLeft";
    case Variant::FruitsSameBowlRight: return "FruitsSame-BowlRight";
    case Variant::FruitsDiffBowlLeft: return "FruitsDiff-BowlLeft";
    case Variant::FruitsDiffBowlRight: return "FruitsDiff-BowlRight";
  }
  return "?";
}

inline constexpr std::string_view variant_cli_name(Variant v) {
  switch (v) {
    case Variant::SameLeft: return "same_left";
    case Variant::SameRight: return "same_right";
    case Variant::DiffYellowLeft: return "diff_yellow_left";
    case Variant::DiffYellowRight: return "diff_yellow_right";
    case Variant::FruitsSameBowlLeft: return "fruits_same_bowl_left";
    case Variant::FruitsSameBowlRight: return "fruits_same_bowl_right";
    case Variant::FruitsDiffBowlLeft: return "fruits_diff_bowl_left";
    case Variant::FruitsDiffBowlRight: return "fruits_diff_bowl_right";
  }
  return "?";
}

inline std::optional<Variant> variant_from_name(std::string_view name) {
  for (TaskClass c : kTaskClasses) {
    for (Variant v : variants_for(c)) {
      if (name == variant_name(v) || name == variant_cli_name(v)) return v;
    }
  }
  return std::nullopt;
}

inline bool variant_belongs_to(TaskClass c, Variant v) {
  for (Variant x : variants_for(c)) {
    if (x == v) return true;
  }
  return false;
}

inline std::optional<TaskClass> class_of(Variant v) {
  for (TaskClass c : kTaskClasses) {
    if (variant_belongs_to(c, v)) return c;
  }
  return std::nullopt;
}

struct TaskSpec {
  TaskClass task_class = TaskClass::ServeWater;
  Variant variant = Variant::SameLeft;
  std::uint64_t seed = 0;
  std::map<std::string, Position> placements;
  std::string description;

  bool operator==(const TaskSpec&) const = default;
};

struct GeneratedTask {
  TaskSpec spec;
  WorldState world;
};

// Object names used by both task families.
inline constexpr std::string_view kYellowCup = "yellow_cup";
inline constexpr std::string_view kBlueCup = "blue_cup";
inline constexpr std::string_view kBlueCupHome = "blue_cup_home";
inline constexpr std::string_view kWater = "water";
inline constexpr std::string_view kApple = "apple";
inline constexpr std::string_view kBanana = "banana";
inline constexpr std::string_view kBowl = "bowl";
inline constexpr std::string_view kScissors = "scissors";
inline constexpr std::string_view kServingPosition = "serving_position";
inline constexpr std::string_view kOverlapCenter = "overlap_center";

namespace detail {

/// Portable uniform draw in [0, 1); std::uniform_real_distribution is not
/// reproducible across standard libraries.
inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double centimeters(double v) { return std::round(v * 100.0) / 100.0; }

class Placer {
 public:
  Placer(const WorldConstants& c, std::uint64_t seed) : c_(c), rng_(seed) {}

  bool coin() { return (rng_() >> 63) != 0; }

  /// Random table point in the interior of `zone`, at least min_spacing from
  /// every previously placed point.
  Position sample(Zone zone) {
    const double inner = c_.overlap_half_width + 0.05;
    const double outer = c_.table_y_max - 0.10;
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const double x = centimeters(0.30 + unit(rng_) * 0.40);
      double y = inner + unit(rng_) * (outer - inner);
      if (zone == Zone::RightExclusive) y = -y;
      if (zone == Zone::Overlap) y = (unit(rng_) - 0.5) * 2.0 * (c_.overlap_half_width - 0.05);
      const Position p{x, centimeters(y), c_.table_z};
      bool spaced = true;
      for (const auto& q : placed_) spaced = spaced && distance_xy(p, q) >= c_.min_spacing;
      if (spaced) {
        placed_.push_back(p);
        return p;
      }
    }
    throw Error("could not place object with the required spacing");
  }

 private:
  const WorldConstants& c_;
  std::mt19937_64 rng_;
  std::vector<Position> placed_;
};

inline std::string pos_text(const WorldState& w, std::string_view name) {
  return format_position(w.objects.at(std::string(name)).position);
}

inline std::string water_description(const WorldState& w, bool distractor) {
  std::string d = "Objects on the table: the empty yellow_cup at " + pos_text(w, kYellowCup) +
                  " and the blue_cup at " + pos_text(w, kBlueCup) +
                  ", which contains water (a small ball named water).";
  if (distractor) d += " The scissors at " + pos_text(w, kScissors) + " are not needed.";
  d += " Goal: serve water with the yellow cup at serving_position " +
       pos_text(w, kServingPosition) +
       ". Pour the water from the blue cup into the yellow cup, bring the yellow cup to the "
       "serving position and keep holding it there, and return the blue cup to its original "
       "position, marked by blue_cup_home at " +
       pos_text(w, kBlueCupHome) + ", releasing it there. The marker overlap_center is at " +
       pos_text(w, kOverlapCenter) + ".";
  return d;
}

inline std::string fruit_description(const WorldState& w, bool distractor) {
  std::string d = "Objects on the table: the apple at " + pos_text(w, kApple) + ", the banana at " +
                  pos_text(w, kBanana) + " and the bowl at " + pos_text(w, kBowl) +
                  ". The bowl is large and can only be grasped and lifted by both hands together.";
  if (distractor) d += " The scissors at " + pos_text(w, kScissors) + " are not needed.";
  d += " Goal: put the apple and the banana into the bowl, then serve the bowl at "
       "serving_position " +
       pos_text(w, kServingPosition) +
       " and hold it there with both hands. The marker overlap_center is at " +
       pos_text(w, kOverlapCenter) + ".";
  return d;
}

}  // namespace detail

/// Deterministic in (task_class, variant, seed, constants).
inline GeneratedTask generate(TaskClass task_class, Variant variant, std::uint64_t seed,
                              const WorldConstants& c = kDefaultConstants,
                              bool distractor = false) {
  if (!variant_belongs_to(task_class, variant)) {
    throw UnknownVariant(std::string(variant_name(variant)) + " is not a variant of " +
                         std::string(class_name(task_class)));
  }
  detail::Placer placer(c, seed);
  WorldState w = make_empty_world(c, seed);
  add_object(w, std::string(kServingPosition), ObjectKind::Marker, c.serving_position);
  add_object(w, std::string(kOverlapCenter), ObjectKind::Marker, c.overlap_center);

  if (task_class == TaskClass::ServeWater) {
    Zone yellow = Zone::LeftExclusive;
    Zone blue = Zone::LeftExclusive;
    switch (variant) {
      case Variant::SameLeft: break;
      case Variant::SameRight: yellow = blue = Zone::RightExclusive; break;
      case Variant::DiffYellowLeft: blue = Zone::RightExclusive; break;
      case Variant::DiffYellowRight: yellow = Zone::RightExclusive; break;
      default: break;
    }
    add_object(w, std::string(kYellowCup), ObjectKind::Cup, placer.sample(yellow));
    const Position bp = placer.sample(blue);
    add_object(w, std::string(kBlueCup), ObjectKind::Cup, bp);
    add_object(w, std::string(kBlueCupHome), ObjectKind::Marker, bp);
    add_object(w, std::string(kWater), ObjectKind::WaterToken, bp);
    w.objects.at(std::string(kBlueCup)).contains.push_back(std::string(kWater));
  } else {
    const bool bowl_left =
        variant == Variant::FruitsSameBowlLeft || variant == Variant::FruitsDiffBowlLeft;
    const bool fruits_same =
        variant == Variant::FruitsSameBowlLeft || variant == Variant::FruitsSameBowlRight;
    const Zone bowl = bowl_left ? Zone::LeftExclusive : Zone::RightExclusive;
    const Zone first = placer.coin() ? Zone::LeftExclusive : Zone::RightExclusive;
    const Zone second = fruits_same ? first
                                    : (first == Zone::LeftExclusive ? Zone::RightExclusive
                                                                    : Zone::LeftExclusive);
    add_object(w, std::string(kBowl), ObjectKind::Bowl, placer.sample(bowl));
    add_object(w, std::string(kApple), ObjectKind::Fruit, placer.sample(first));
    add_object(w, std::string(kBanana), ObjectKind::Fruit, placer.sample(second));
  }
  if (distractor) {
    const Zone z = placer.coin() ? Zone::LeftExclusive : Zone::RightExclusive;
    add_object(w, std::string(kScissors), ObjectKind::Scissors, placer.sample(z));
  }

  TaskSpec spec;
  spec.task_class = task_class;
  spec.variant = variant;
  spec.seed = seed;
  for (const auto& [name, o] : w.objects) spec.placements[name] = o.position;
  spec.description = task_class == TaskClass::ServeWater ? detail::water_description(w, distractor)
                                                         : detail::fruit_description(w, distractor);
  return {std::move(spec), std::move(w)};
}

/// Purely state-based goal test; any plan reaching a goal state counts.
inline bool is_success(const TaskSpec& spec, const WorldState& w) {
  const double tol = w.constants.success_tolerance;
  const Position& serve = w.constants.serving_position;
  if (spec.task_class == TaskClass::ServeWater) {
    const ObjectState* yellow = w.find(kYellowCup);
    const ObjectState* blue = w.find(kBlueCup);
    if (yellow == nullptr || blue == nullptr) return false;
    const bool water_in_yellow = container_of(w, kWater) == std::string(kYellowCup);
    return water_in_yellow && distance(yellow->position, serve) <= tol &&
           distance(blue->position, blue->original_position) <= tol && !is_held(w, kBlueCup);
  }
  const ObjectState* bowl = w.find(kBowl);
  if (bowl == nullptr) return false;
  const bool fruits_in = container_of(w, kApple) == std::string(kBowl) &&
                         container_of(w, kBanana) == std::string(kBowl);
  return fruits_in && distance(bowl->position, serve) <= tol &&
         two_hand_held(w) == std::string(kBowl);
}

// ---------------------------------------------------------------------------
// Serialization

inline json task_to_json(const TaskSpec& t) {
  json placements = json::object();
  for (const auto& [name, p] : t.placements) placements[name] = to_json_value(p);
  return json{{"class", class_name(t.task_class)},
              {"variant", variant_name(t.variant)},
              {"seed", t.seed},
              {"placements", std::move(placements)},
              {"description", t.description}};
}

inline TaskSpec task_from_json(const json& j) {
  try {
    TaskSpec t;
    auto c = class_from_name(j.at("class").get<std::string>());
    auto v = variant_from_name(j.at("variant").get<std::string>());
    if (!c || !v || !variant_belongs_to(*c, *v)) throw TranscriptFormatError("bad task class/variant");
    t.task_class = *c;
    t.variant = *v;
    t.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, p] : j.at("placements").items()) t.placements[name] = position_from_json(p);
    t.description = j.at("description").get<std::string>();
    return t;
  } catch (const json::exception& e) {
    throw TranscriptFormatError(std::string("malformed task: ") + e.what());
  }
}

}  // namespace labor
