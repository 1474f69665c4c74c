#include "helmex/mission.hpp"

#include <set>
#include <string>

#include "helmex/errors.hpp"

namespace helmex {

std::string_view to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::SurveyArea:
      return "survey_area";
    case ObjectiveKind::TransitWaypoint:
      return "transit_waypoint";
    case ObjectiveKind::GotoPoint:
      return "goto_point";
  }
  return "?";
}

ObjectiveKind objective_kind_from_string(std::string_view name) {
  if (name == "survey_area") return ObjectiveKind::SurveyArea;
  if (name == "transit_waypoint") return ObjectiveKind::TransitWaypoint;
  if (name == "goto_point") return ObjectiveKind::GotoPoint;
  throw ConfigError("unknown objective kind: \"" + std::string(name) + "\"");
}

void MissionPlan::validate() const {
  if (objectives.empty()) throw ConfigError("mission plan has no objectives");
  std::set<std::string> seen;
  for (const Objective& o : objectives) {
    if (o.id.empty()) throw ConfigError("objective id must be non-empty");
    if (!seen.insert(o.id).second)
      throw ConfigError("duplicate objective id: \"" + o.id + "\"");
    if (o.tolerance <= 0)
      throw ConfigError("objective \"" + o.id + "\": tolerance must be positive");
    if (o.kind == ObjectiveKind::SurveyArea &&
        (o.area.x1 <= o.area.x0 || o.area.y1 <= o.area.y0))
      throw ConfigError("objective \"" + o.id + "\": survey area is degenerate");
  }
}

std::vector<Point> lawnmower_waypoints(const Rect& area, double tolerance) {
  const double inset = tolerance;
  double xa = area.x0 + inset;
  double xb = area.x1 - inset;
  if (xa > xb) xa = xb = (area.x0 + area.x1) / 2.0;

  std::vector<double> ys;
  const double y_lo = area.y0 + inset;
  const double y_hi = area.y1 - inset;
  if (y_lo > y_hi) {
    ys.push_back((area.y0 + area.y1) / 2.0);
  } else {
    for (double y = y_lo; y <= y_hi + 1e-9; y += 2.0 * tolerance) ys.push_back(y);
  }

  std::vector<Point> wps;
  wps.reserve(ys.size() * 2);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const bool forward = i % 2 == 0;
    wps.push_back({forward ? xa : xb, ys[i]});
    wps.push_back({forward ? xb : xa, ys[i]});
  }
  return wps;
}

}  // namespace helmex
