#pragma once

#include <optional>
#include <string>

#include "helmex/behaviour.hpp"
#include "helmex/wall_clock.hpp"

namespace helmex {

/// One telemetry tick: navigation, battery, objective status and
/// obstacle sensing. obstacle_range is +infinity when nothing is
/// detected; every other numeric field is finite.
struct VehicleState {
  double t = 0.0;  // seconds since mission start
  WallTime wall{};
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;    // metres, 0 = surface
  double speed = 0.0;    // m/s over ground
  double heading = 0.0;  // degrees [0, 360)
  double battery = 100.0;  // percent
  std::optional<std::string> objective_id;
  bool objective_complete = false;
  double obstacle_range = 0.0;  // metres, +inf = none detected
  bool in_exclusion_zone = false;
  double gps_fix_age = 0.0;  // seconds since last fix

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// A labelled tick: the distillation training unit.
struct TraceRecord {
  VehicleState state;
  Behaviour behaviour = Behaviour::Wait;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// A tick from a live stream, where the label may be absent.
struct StreamRecord {
  VehicleState state;
  std::optional<Behaviour> behaviour;
};

}  // namespace helmex
