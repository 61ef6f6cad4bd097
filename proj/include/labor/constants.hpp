#pragma once

#include "labor/geometry.hpp"

namespace labor {

/// Every numeric constant of the simulated workspace lives here so the frame
/// can be retuned in one place. Replays are sensitive to all of them.
struct WorldConstants {
  // Table.
  double table_z = 0.80;
  double table_x_min = 0.20;
  double table_x_max = 0.80;
  double table_y_min = -0.55;
  double table_y_max = 0.55;
  // Overlap area is |y| <= overlap_half_width; boundaries belong to it.
  double overlap_half_width = 0.15;

  Position serving_position{0.40, 0.00, 1.00};
  Position overlap_center{0.50, 0.00, 0.80};
  Position left_home{0.25, 0.35, 0.95};
  Position right_home{0.25, -0.35, 0.95};

  // Skill geometry.
  double grip_height = 0.02;
  double hover_height = 0.10;
  double pour_radius = 0.05;
  double release_radius = 0.06;
  double push_standoff = 0.08;
  // Lateral offset of each hand from a two-hand-held object's center.
  double two_hand_half_span = 0.06;

  // Task generation and evaluation.
  double success_tolerance = 0.05;
  double min_spacing = 0.12;

  bool operator==(const WorldConstants&) const = default;
};

inline const WorldConstants kDefaultConstants{};

inline constexpr int kDefaultStepBudget = 30;

}  // namespace labor
