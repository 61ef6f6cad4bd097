#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "labor/constants.hpp"
#include "labor/skills.hpp"

namespace labor {

enum class PromptMode { Labor, Baseline };

inline constexpr std::string_view mode_name(PromptMode m) {
  return m == PromptMode::Labor ? "labor" : "baseline";
}

inline std::optional<PromptMode> mode_from_name(std::string_view name) {
  if (name == "labor") return PromptMode::Labor;
  if (name == "baseline") return PromptMode::Baseline;
  return std::nullopt;
}

struct PromptConfig {
  PromptMode mode = PromptMode::Labor;
  WorldConstants constants;
  std::string task_description;
  std::string completion_phrase = "done";
};

inline constexpr std::string_view kDecompositionInstruction =
    "Before issuing commands, break the task into stages and label each one either "
    "uncoordinated (each hand works alone inside its own area, possibly in parallel) or "
    "coordinated (the hands depend on each other, usually in the overlap area), then plan the "
    "skill commands of every stage and execute them stage by stage.";

inline std::string background_block(const PromptConfig& cfg) {
  const WorldConstants& c = cfg.constants;
  const std::string h = format_coord(c.overlap_half_width);
  const std::string mh = format_coord(-c.overlap_half_width);
  std::string b = "## Robot\n";
  b += "You control a robot with two hands, left and right, working at a table. Coordinates are "
       "in meters: x points forward from the robot base, y points to the robot's left and z "
       "points up. The table surface is at z = " +
       format_coord(c.table_z) + " and spans x from " + format_coord(c.table_x_min) + " to " +
       format_coord(c.table_x_max) + " and y from " + format_coord(c.table_y_min) + " to " +
       format_coord(c.table_y_max) + ".\n";
  b += "The table has three areas along y: the left area (y from " + h + " to " +
       format_coord(c.table_y_max) + "), the overlap area (y from " + mh + " to " + h +
       ") and the right area (y from " + format_coord(c.table_y_min) + " to " + mh + ").\n";
  b += "The left hand starts at " + format_position(c.left_home) + " and the right hand at " +
       format_position(c.right_home) + ". The serving position is " +
       format_position(c.serving_position) + ".\n";
  return b;
}

inline std::string rules_block(const PromptConfig&) {
  std::string b = "## Rules\n";
  b += "1. The left hand reaches only the left area and the overlap area. The right hand reaches "
       "only the right area and the overlap area. Objects must be brought into the overlap area "
       "before the other hand can work with them.\n";
  b += "2. When both hands receive the same command with the same object, they act "
       "synchronously as one, for example to hold and carry an object together.\n";
  b += "3. Give one hand the wait command while the other hand prepares something the first "
       "hand depends on. This orders the hands in time.\n";
  b += "4. " + std::string(kDecompositionInstruction) + "\n";
  return b;
}

inline std::string tools_block(const PromptConfig& cfg) {
  std::string b = "## Tools\n";
  b += "Call bimanual_control(left_command, left_para, right_command, right_para) to give each "
       "hand one skill per step. Skills:\n";
  b += "- move_to(obj_name): move the hand to the object, carrying anything it holds.\n";
  b += "- move_and_grasp(obj_name): move the hand to the object and grasp it.\n";
  b += "- move_above(obj_name): move the hand above the object, carrying anything it holds.\n";
  b += "- push_to(source_obj, target_obj): push source_obj along the table toward target_obj; "
       "write both names in the para separated by a comma.\n";
  b += "- pour_out(): flip the wrist so the content of the held object pours out below the "
       "hand.\n";
  b += "- release(): open the hand and let go of the held object.\n";
  b += "- reset(): return the empty hand to its start configuration.\n";
  b += "- wait(): keep the hand and anything it holds where it is.\n";
  b += "Use an empty string as para for skills without parameters.\n";
  b += "Call get_information(query, para) with query=arm_state and para=left or right, or "
       "query=obj_position and para=<object name>, to inspect the robot or the scene.\n";
  b += "Call exactly one tool per reply. When the task is complete, reply with the word \"" +
       cfg.completion_phrase + "\" and no tool call.\n";
  return b;
}

inline std::string task_block(const PromptConfig& cfg) {
  return "## Task\n" + cfg.task_description + "\n";
}

/// Labor mode: robot, rules, tools, task. Baseline mode drops only the rules.
inline std::string build_system_prompt(const PromptConfig& cfg) {
  std::string p = background_block(cfg) + "\n";
  if (cfg.mode == PromptMode::Labor) p += rules_block(cfg) + "\n";
  p += tools_block(cfg) + "\n";
  p += task_block(cfg);
  return p;
}

}  // namespace labor
