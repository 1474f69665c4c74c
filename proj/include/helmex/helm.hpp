#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "helmex/mission.hpp"
#include "helmex/vehicle_state.hpp"

namespace helmex {

/// Behaviour trigger thresholds. Drain rates are part of the config so
/// golden traces stay stable.
struct HelmConfig {
  double gps_fix_interval = 300.0;      // seconds between required fixes
  double obstacle_trigger_range = 40.0;  // metres
  double battery_wait_threshold = 20.0;  // percent
  double cruise_speed = 1.5;             // m/s
  double obstacle_standoff = 25.0;       // metres of clearance kept from an obstacle edge
  double drain_cruise = 0.02;            // %/s while any moving behaviour is active
  double drain_wait = 0.005;             // %/s while holding position

  void validate() const;  // throws ConfigError
};

/// Full simulator state for one vehicle run.
struct WorldState {
  double t = 0.0;
  WallTime start_wall{};
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;
  double heading = 0.0;  // degrees [0, 360)
  double speed = 0.0;    // horizontal speed over ground of the last step
  double battery = 100.0;
  double gps_fix_age = 0.0;
  std::vector<Circle> obstacles;
  std::vector<Rect> exclusion_zones;
  std::vector<std::uint8_t> objective_done;  // parallel to MissionPlan::objectives
  int survey_leg = 0;       // waypoint progress within the active survey objective
  bool just_completed = false;  // an objective completed in the step that produced this state
};

/// Edge distance to the nearest obstacle, +infinity when there is none.
double nearest_obstacle_range(const WorldState& world);

/// Index of the first incomplete objective, or nullopt when all done.
std::optional<std::size_t> active_objective(const WorldState& world, const MissionPlan& plan);

/// Telemetry snapshot of the world as seen by the explanation pipeline.
VehicleState snapshot(const WorldState& world, const MissionPlan& plan);

/// Deterministic priority arbitration, highest priority first:
///   1. avoid-obstacles  when an obstacle is closer than the trigger range
///   2. wait             when battery is below the wait threshold
///   3. gps              when the last fix is older than the fix interval
///   4. the active objective's behaviour (survey / transit / goto)
///   5. wait             when every objective is complete
Behaviour select_behaviour(const WorldState& world, const MissionPlan& plan,
                           const HelmConfig& cfg);

struct StepResult {
  WorldState world;
  Behaviour behaviour;  // the behaviour that drove this step
};

/// Selects a behaviour from `world`, then advances the world by dt:
/// goto/transit steer at the target, survey follows its lawnmower legs,
/// gps ascends and resets the fix age at the surface, wait holds
/// position, avoid-obstacles rounds the nearest obstacle at the standoff
/// clearance. Battery drains per behaviour; completion flags are set
/// when an objective's tolerance is reached.
StepResult step(const WorldState& world, const MissionPlan& plan, const HelmConfig& cfg,
                double dt);

/// Initial-condition jitter drawn from the scenario seed. The step
/// function itself is noise-free.
struct InitJitter {
  double position = 5.0;     // +- metres on x and y
  double heading = 10.0;     // +- degrees
  double battery = 2.0;      // +- percent
  double gps_fix_age = 30.0;  // fix age drawn from [0, this]
};

struct Scenario {
  std::string name;
  MissionPlan plan;
  HelmConfig helm;
  WorldState initial;
  InitJitter jitter;
  std::uint64_t seed = 0;
  double dt = 1.0;
  double max_duration = 3600.0;
};

struct RunMeta {
  bool timed_out = false;
  bool mission_complete = false;
  std::size_t ticks = 0;
  double final_t = 0.0;
};

/// Deterministic for fixed (plan, cfg, seed, dt). Emits one labelled
/// record per step: the pre-step state paired with the behaviour
/// selected from it. Terminates at mission completion or max_duration.
std::vector<TraceRecord> run_mission(const Scenario& scenario, RunMeta* meta = nullptr);

/// Scenario file loading (JSON). Throws ConfigError on invalid content.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace helmex
