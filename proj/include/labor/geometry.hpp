#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace labor {

/// Point in the robot frame, meters. x forward from the base, y to the
/// robot's left, z up.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Position&) const = default;
};

inline Position operator+(const Position& a, const Position& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline Position raised(const Position& p, double dz) { return {p.x, p.y, p.z + dz}; }

inline Position midpoint(const Position& a, const Position& b) {
  return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0, (a.z + b.z) / 2.0};
}

inline double distance_xy(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance(const Position& a, const Position& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

/// Two-decimal fixed rendering. Values that round to zero print as "0.00",
/// never "-0.00".
inline std::string format_coord(double v) {
  if (std::fabs(v) < 0.005) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string format_position(const Position& p) {
  return "(" + format_coord(p.x) + ", " + format_coord(p.y) + ", " + format_coord(p.z) + ")";
}

}  // namespace labor
