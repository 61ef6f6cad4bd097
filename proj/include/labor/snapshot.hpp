#pragma once

#include "json.hpp"

#include "labor/world.hpp"

namespace labor {

using nlohmann::json;

inline json to_json_value(const Position& p) { return json::array({p.x, p.y, p.z}); }

inline Position position_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw TranscriptFormatError("position must be [x, y, z]");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline json hand_to_json(const HandState& h) {
  return json{{"side", side_name(h.side)},
              {"position", to_json_value(h.position)},
              {"palm", h.palm == Palm::Neutral ? "neutral" : "flipped"},
              {"fingers", h.fingers == Fingers::Open ? "open" : "closed"},
              {"held", h.held ? json(*h.held) : json(nullptr)},
              {"home", to_json_value(h.home_position)}};
}

inline HandState hand_from_json(const json& j) {
  HandState h;
  auto side = side_from_name(j.at("side").get<std::string>());
  if (!side) throw TranscriptFormatError("bad hand side");
  h.side = *side;
  h.position = position_from_json(j.at("position"));
  h.palm = j.at("palm").get<std::string>() == "flipped" ? Palm::Flipped : Palm::Neutral;
  h.fingers = j.at("fingers").get<std::string>() == "closed" ? Fingers::Closed : Fingers::Open;
  if (!j.at("held").is_null()) h.held = j.at("held").get<std::string>();
  h.home_position = position_from_json(j.at("home"));
  return h;
}

/// Self-describing snapshot: one entry per object in name order. Keys inside
/// each record are emitted in sorted order by nlohmann::json.
inline json world_to_json(const WorldState& w) {
  json objects = json::array();
  for (const auto& [name, o] : w.objects) {
    objects.push_back(json{{"name", o.name},
                           {"kind", kind_name(o.kind)},
                           {"position", to_json_value(o.position)},
                           {"contains", o.contains},
                           {"spilled", o.spilled},
                           {"two_hand_required", o.two_hand_required},
                           {"original_position", to_json_value(o.original_position)}});
  }
  return json{{"step", w.step},
              {"seed", w.seed},
              {"left", hand_to_json(w.left)},
              {"right", hand_to_json(w.right)},
              {"objects", std::move(objects)}};
}

/// Constants are not part of a snapshot; they belong to the simulator that
/// interprets it.
inline WorldState world_from_json(const json& j, const WorldConstants& c = kDefaultConstants) {
  try {
    WorldState w;
    w.constants = c;
    w.step = j.at("step").get<int>();
    w.seed = j.at("seed").get<std::uint64_t>();
    w.left = hand_from_json(j.at("left"));
    w.right = hand_from_json(j.at("right"));
    for (const auto& jo : j.at("objects")) {
      ObjectState o;
      o.name = jo.at("name").get<std::string>();
      auto kind = kind_from_name(jo.at("kind").get<std::string>());
      if (!kind) throw TranscriptFormatError("unknown object kind for " + o.name);
      o.kind = *kind;
      o.position = position_from_json(jo.at("position"));
      o.contains = jo.at("contains").get<std::vector<std::string>>();
      o.spilled = jo.at("spilled").get<bool>();
      o.two_hand_required = jo.at("two_hand_required").get<bool>();
      o.original_position = position_from_json(jo.at("original_position"));
      w.objects.emplace(o.name, std::move(o));
    }
    return w;
  } catch (const json::exception& e) {
    throw TranscriptFormatError(std::string("malformed world snapshot: ") + e.what());
  }
}

}  // namespace labor
