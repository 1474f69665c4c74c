#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace helmex {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(double px, double py) const {
    return px >= x0 && px <= x1 && py >= y0 && py <= y1;
  }
};

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

enum class ObjectiveKind : std::uint8_t { SurveyArea, TransitWaypoint, GotoPoint };

std::string_view to_string(ObjectiveKind k);
ObjectiveKind objective_kind_from_string(std::string_view name);

struct Objective {
  std::string id;
  ObjectiveKind kind = ObjectiveKind::GotoPoint;
  Rect area{};    // survey_area geometry
  Point point{};  // transit_waypoint / goto_point geometry
  double tolerance = 10.0;  // completion tolerance, metres
};

struct MissionPlan {
  std::vector<Objective> objectives;

  /// Throws ConfigError unless ids are unique, non-empty and at least
  /// one objective is present.
  void validate() const;
};

/// Serpentine survey legs covering the rectangle, spaced at twice the
/// completion tolerance and inset by one tolerance from the boundary.
/// Returned as the ordered waypoint list the vehicle visits.
std::vector<Point> lawnmower_waypoints(const Rect& area, double tolerance);

}  // namespace helmex
