#include "helmex/helm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "helmex/errors.hpp"

namespace helmex {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normalize_heading(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg < 0) deg += 360.0;
  return deg;
}

double heading_from_direction(double dx, double dy) {
  // Compass-style: 0 = +y (north), 90 = +x (east).
  return normalize_heading(std::atan2(dx, dy) * 180.0 / kPi);
}

double dist(double ax, double ay, double bx, double by) {
  return std::hypot(bx - ax, by - ay);
}

/// Minimum distance from circle centre to the segment p->q.
double segment_clearance(Point p, Point q, const Circle& c) {
  const double vx = q.x - p.x;
  const double vy = q.y - p.y;
  const double len2 = vx * vx + vy * vy;
  double s = 0.0;
  if (len2 > 0) {
    s = ((c.x - p.x) * vx + (c.y - p.y) * vy) / len2;
    s = std::clamp(s, 0.0, 1.0);
  }
  return dist(p.x + s * vx, p.y + s * vy, c.x, c.y);
}

const Circle* nearest_obstacle(const WorldState& world, double* edge_range) {
  const Circle* best = nullptr;
  double best_range = std::numeric_limits<double>::infinity();
  for (const Circle& c : world.obstacles) {
    const double r = std::max(0.0, dist(world.x, world.y, c.x, c.y) - c.radius);
    if (r < best_range) {
      best_range = r;
      best = &c;
    }
  }
  if (edge_range) *edge_range = best_range;
  return best;
}

/// Navigation target of the active objective: the objective point, or
/// the current lawnmower waypoint for a survey.
std::optional<Point> nav_target(const WorldState& world, const MissionPlan& plan) {
  const auto idx = active_objective(world, plan);
  if (!idx) return std::nullopt;
  const Objective& obj = plan.objectives[*idx];
  if (obj.kind != ObjectiveKind::SurveyArea) return obj.point;
  const auto wps = lawnmower_waypoints(obj.area, obj.tolerance);
  const int leg = std::clamp(world.survey_leg, 0, static_cast<int>(wps.size()) - 1);
  return wps[static_cast<std::size_t>(leg)];
}

/// Moves at most step_len toward p; lands exactly on p when closer.
void move_toward(WorldState& w, Point p, double step_len, double dt) {
  const double d = dist(w.x, w.y, p.x, p.y);
  if (d < 1e-12) {
    w.speed = 0.0;
    return;
  }
  const double travel = std::min(d, step_len);
  const double ux = (p.x - w.x) / d;
  const double uy = (p.y - w.y) / d;
  w.x += ux * travel;
  w.y += uy * travel;
  w.heading = heading_from_direction(ux, uy);
  w.speed = travel / dt;
}

/// Rounds the nearest obstacle: beelines at the target once the ray to
/// it clears the standoff disc, otherwise orbits the obstacle at the
/// standoff clearance, spiralling in or out as needed.
void move_avoiding(WorldState& w, const MissionPlan& plan, const HelmConfig& cfg, double dt) {
  double edge_range = 0.0;
  const Circle* obs = nearest_obstacle(w, &edge_range);
  const auto target = nav_target(w, plan);
  if (!obs) {
    if (target) move_toward(w, *target, cfg.cruise_speed * dt, dt);
    return;
  }

  const double clearance = obs->radius + cfg.obstacle_standoff;
  if (target &&
      segment_clearance({w.x, w.y}, *target, *obs) >= clearance - 1e-9) {
    move_toward(w, *target, cfg.cruise_speed * dt, dt);
    return;
  }

  const double cd = dist(w.x, w.y, obs->x, obs->y);
  double rx = 1.0, ry = 0.0;  // radial unit vector, centre -> vehicle
  if (cd > 1e-9) {
    rx = (w.x - obs->x) / cd;
    ry = (w.y - obs->y) / cd;
  }
  // Tangent advancing toward the target; counter-clockwise on ties.
  double t1x = -ry, t1y = rx;
  double tx = t1x, ty = t1y;
  if (target) {
    const double gd = dist(w.x, w.y, target->x, target->y);
    if (gd > 1e-9) {
      const double gx = (target->x - w.x) / gd;
      const double gy = (target->y - w.y) / gd;
      if (-t1x * gx - t1y * gy > t1x * gx + t1y * gy) {
        tx = -t1x;
        ty = -t1y;
      }
    }
  }
  // Radial correction pulls the vehicle onto the standoff ring.
  const double err = std::clamp((edge_range - cfg.obstacle_standoff) / cfg.obstacle_standoff,
                                -1.0, 1.0);
  double dx = tx - err * rx;
  double dy = ty - err * ry;
  const double n = std::hypot(dx, dy);
  if (n < 1e-12) {
    dx = tx;
    dy = ty;
  } else {
    dx /= n;
    dy /= n;
  }
  const double travel = cfg.cruise_speed * dt;
  w.x += dx * travel;
  w.y += dy * travel;
  w.heading = heading_from_direction(dx, dy);
  w.speed = cfg.cruise_speed;
}

/// Advances waypoint/completion bookkeeping after motion.
void update_completion(WorldState& w, const MissionPlan& plan) {
  const auto idx = active_objective(w, plan);
  if (!idx) return;
  const Objective& obj = plan.objectives[*idx];
  if (obj.kind == ObjectiveKind::SurveyArea) {
    const auto wps = lawnmower_waypoints(obj.area, obj.tolerance);
    while (w.survey_leg < static_cast<int>(wps.size()) &&
           dist(w.x, w.y, wps[static_cast<std::size_t>(w.survey_leg)].x,
                wps[static_cast<std::size_t>(w.survey_leg)].y) <= obj.tolerance) {
      ++w.survey_leg;
    }
    if (w.survey_leg >= static_cast<int>(wps.size())) {
      w.objective_done[*idx] = 1;
      w.just_completed = true;
      w.survey_leg = 0;
    }
  } else if (dist(w.x, w.y, obj.point.x, obj.point.y) <= obj.tolerance) {
    w.objective_done[*idx] = 1;
    w.just_completed = true;
  }
}

class JitterRng {
 public:
  explicit JitterRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1); identical across platforms for a given seed.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

void HelmConfig::validate() const {
  if (gps_fix_interval <= 0) throw ConfigError("gps_fix_interval must be positive");
  if (obstacle_trigger_range <= 0) throw ConfigError("obstacle_trigger_range must be positive");
  if (battery_wait_threshold <= 0 || battery_wait_threshold >= 100)
    throw ConfigError("battery_wait_threshold must be in (0, 100)");
  if (cruise_speed <= 0) throw ConfigError("cruise_speed must be positive");
  if (obstacle_standoff <= 0) throw ConfigError("obstacle_standoff must be positive");
  if (drain_cruise <= 0 || drain_wait <= 0) throw ConfigError("drain rates must be positive");
}

double nearest_obstacle_range(const WorldState& world) {
  double range = 0.0;
  nearest_obstacle(world, &range);
  return range;
}

std::optional<std::size_t> active_objective(const WorldState& world, const MissionPlan& plan) {
  for (std::size_t i = 0; i < plan.objectives.size(); ++i) {
    if (i >= world.objective_done.size() || !world.objective_done[i]) return i;
  }
  return std::nullopt;
}

VehicleState snapshot(const WorldState& world, const MissionPlan& plan) {
  VehicleState s;
  s.t = world.t;
  s.wall = advance(world.start_wall, world.t);
  s.x = world.x;
  s.y = world.y;
  s.depth = world.depth;
  s.speed = world.speed;
  s.heading = world.heading;
  // The battery gauge reports in half-percent steps. Keep the wait
  // threshold a multiple of this resolution so the reported value and
  // the trigger agree on which side of the threshold a tick is on.
  s.battery = std::floor(world.battery * 2.0) / 2.0;
  if (auto idx = active_objective(world, plan)) s.objective_id = plan.objectives[*idx].id;
  s.objective_complete = world.just_completed;
  s.obstacle_range = nearest_obstacle_range(world);
  s.in_exclusion_zone = false;
  for (const Rect& z : world.exclusion_zones) {
    if (z.contains(world.x, world.y)) {
      s.in_exclusion_zone = true;
      break;
    }
  }
  s.gps_fix_age = world.gps_fix_age;
  return s;
}

Behaviour select_behaviour(const WorldState& world, const MissionPlan& plan,
                           const HelmConfig& cfg) {
  if (nearest_obstacle_range(world) < cfg.obstacle_trigger_range)
    return Behaviour::AvoidObstacles;
  if (world.battery < cfg.battery_wait_threshold) return Behaviour::Wait;
  if (world.gps_fix_age > cfg.gps_fix_interval) return Behaviour::Gps;
  const auto idx = active_objective(world, plan);
  if (!idx) return Behaviour::Wait;
  switch (plan.objectives[*idx].kind) {
    case ObjectiveKind::SurveyArea:
      return Behaviour::Survey;
    case ObjectiveKind::TransitWaypoint:
      return Behaviour::Transit;
    case ObjectiveKind::GotoPoint:
      return Behaviour::Goto;
  }
  return Behaviour::Wait;
}

StepResult step(const WorldState& world, const MissionPlan& plan, const HelmConfig& cfg,
                double dt) {
  if (dt <= 0) throw ConfigError("step dt must be positive");
  const Behaviour b = select_behaviour(world, plan, cfg);

  WorldState w = world;
  w.t += dt;
  w.gps_fix_age += dt;
  w.just_completed = false;

  switch (b) {
    case Behaviour::Wait:
      w.speed = 0.0;
      break;
    case Behaviour::Gps:
      // Ascend at cruise speed; a fix is acquired at the surface.
      w.depth = std::max(0.0, w.depth - cfg.cruise_speed * dt);
      w.speed = 0.0;
      if (w.depth == 0.0) w.gps_fix_age = 0.0;
      break;
    case Behaviour::Goto:
    case Behaviour::Transit:
    case Behaviour::Survey: {
      if (const auto target = nav_target(w, plan))
        move_toward(w, *target, cfg.cruise_speed * dt, dt);
      update_completion(w, plan);
      break;
    }
    case Behaviour::AvoidObstacles:
      move_avoiding(w, plan, cfg, dt);
      update_completion(w, plan);
      break;
  }

  const double drain = (b == Behaviour::Wait) ? cfg.drain_wait : cfg.drain_cruise;
  w.battery = std::max(0.0, w.battery - drain * dt);
  return {std::move(w), b};
}

std::vector<TraceRecord> run_mission(const Scenario& scenario, RunMeta* meta) {
  scenario.plan.validate();
  scenario.helm.validate();
  if (scenario.max_duration <= scenario.dt)
    throw ConfigError("max_duration must exceed dt");

  WorldState world = scenario.initial;
  world.objective_done.assign(scenario.plan.objectives.size(), 0);
  world.survey_leg = 0;
  world.t = 0.0;
  world.just_completed = false;

  JitterRng rng(scenario.seed);
  const InitJitter& j = scenario.jitter;
  world.x += rng.uniform(-j.position, j.position);
  world.y += rng.uniform(-j.position, j.position);
  world.heading = normalize_heading(world.heading + rng.uniform(-j.heading, j.heading));
  world.battery = std::clamp(world.battery + rng.uniform(-j.battery, j.battery), 0.0, 100.0);
  world.gps_fix_age = std::max(0.0, world.gps_fix_age + rng.uniform(0.0, j.gps_fix_age));

  std::vector<TraceRecord> trace;
  trace.reserve(static_cast<std::size_t>(scenario.max_duration / scenario.dt) + 1);
  RunMeta local;
  for (;;) {
    if (world.t >= scenario.max_duration) {
      local.timed_out = true;
      break;
    }
    VehicleState snap = snapshot(world, scenario.plan);
    StepResult res = step(world, scenario.plan, scenario.helm, scenario.dt);
    trace.push_back(TraceRecord{std::move(snap), res.behaviour});
    world = std::move(res.world);
    if (!active_objective(world, scenario.plan)) {
      local.mission_complete = true;
      break;
    }
  }
  local.ticks = trace.size();
  local.final_t = world.t;
  if (meta) *meta = local;
  return trace;
}

namespace {

using json = nlohmann::json;

double num_or(const json& o, const char* key, double fallback) {
  if (!o.contains(key)) return fallback;
  if (!o.at(key).is_number()) throw ConfigError(std::string("scenario field \"") + key +
                                                "\" must be a number");
  return o.at(key).get<double>();
}

Rect rect_from(const json& a, const char* what) {
  if (!a.is_array() || a.size() != 4)
    throw ConfigError(std::string(what) + " must be an array [x0, y0, x1, y1]");
  return Rect{a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>()};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json o = json::parse(text, nullptr, false);
  if (o.is_discarded() || !o.is_object())
    throw ConfigError("scenario file is not a JSON object");

  Scenario sc;
  sc.name = o.value("name", std::string("scenario"));
  sc.seed = o.value("seed", 0ull);
  sc.dt = num_or(o, "dt", 1.0);
  sc.max_duration = num_or(o, "max_duration", 3600.0);
  if (sc.dt <= 0) throw ConfigError("scenario dt must be positive");

  if (o.contains("start_wall")) {
    try {
      sc.initial.start_wall = parse_iso8601(o.at("start_wall").get<std::string>());
    } catch (const ParseError& e) {
      throw ConfigError(std::string("scenario start_wall: ") + e.what());
    }
  }

  if (o.contains("helm")) {
    const json& h = o.at("helm");
    sc.helm.gps_fix_interval = num_or(h, "gps_fix_interval", sc.helm.gps_fix_interval);
    sc.helm.obstacle_trigger_range =
        num_or(h, "obstacle_trigger_range", sc.helm.obstacle_trigger_range);
    sc.helm.battery_wait_threshold =
        num_or(h, "battery_wait_threshold", sc.helm.battery_wait_threshold);
    sc.helm.cruise_speed = num_or(h, "cruise_speed", sc.helm.cruise_speed);
    sc.helm.obstacle_standoff = num_or(h, "obstacle_standoff", sc.helm.obstacle_standoff);
    sc.helm.drain_cruise = num_or(h, "drain_cruise", sc.helm.drain_cruise);
    sc.helm.drain_wait = num_or(h, "drain_wait", sc.helm.drain_wait);
  }
  sc.helm.validate();

  if (o.contains("initial")) {
    const json& i = o.at("initial");
    sc.initial.x = num_or(i, "x", 0.0);
    sc.initial.y = num_or(i, "y", 0.0);
    sc.initial.depth = num_or(i, "depth", 0.0);
    sc.initial.heading = num_or(i, "heading", 0.0);
    sc.initial.battery = num_or(i, "battery", 100.0);
    sc.initial.gps_fix_age = num_or(i, "gps_fix_age", 0.0);
    if (sc.initial.depth < 0) throw ConfigError("initial depth must be non-negative");
    if (sc.initial.battery < 0 || sc.initial.battery > 100)
      throw ConfigError("initial battery must be in [0, 100]");
  }

  if (o.contains("jitter")) {
    const json& jj = o.at("jitter");
    sc.jitter.position = num_or(jj, "position", sc.jitter.position);
    sc.jitter.heading = num_or(jj, "heading", sc.jitter.heading);
    sc.jitter.battery = num_or(jj, "battery", sc.jitter.battery);
    sc.jitter.gps_fix_age = num_or(jj, "gps_fix_age", sc.jitter.gps_fix_age);
  }

  if (!o.contains("objectives") || !o.at("objectives").is_array())
    throw ConfigError("scenario requires an \"objectives\" array");
  for (const json& jo : o.at("objectives")) {
    Objective obj;
    if (!jo.contains("id") || !jo.at("id").is_string())
      throw ConfigError("objective requires a string \"id\"");
    obj.id = jo.at("id").get<std::string>();
    if (!jo.contains("kind") || !jo.at("kind").is_string())
      throw ConfigError("objective \"" + obj.id + "\" requires a \"kind\"");
    obj.kind = objective_kind_from_string(jo.at("kind").get<std::string>());
    obj.tolerance = num_or(jo, "tolerance", 10.0);
    if (obj.kind == ObjectiveKind::SurveyArea) {
      if (!jo.contains("area"))
        throw ConfigError("survey objective \"" + obj.id + "\" requires \"area\"");
      obj.area = rect_from(jo.at("area"), "objective area");
    } else {
      if (!jo.contains("point") || !jo.at("point").is_array() || jo.at("point").size() != 2)
        throw ConfigError("objective \"" + obj.id + "\" requires \"point\": [x, y]");
      obj.point = Point{jo.at("point")[0].get<double>(), jo.at("point")[1].get<double>()};
    }
    sc.plan.objectives.push_back(std::move(obj));
  }
  sc.plan.validate();

  if (o.contains("obstacles")) {
    for (const json& jc : o.at("obstacles")) {
      if (!jc.is_array() || jc.size() != 3)
        throw ConfigError("obstacle must be an array [x, y, radius]");
      Circle c{jc[0].get<double>(), jc[1].get<double>(), jc[2].get<double>()};
      if (c.radius <= 0) throw ConfigError("obstacle radius must be positive");
      sc.initial.obstacles.push_back(c);
    }
  }
  if (o.contains("exclusion_zones")) {
    for (const json& jz : o.at("exclusion_zones"))
      sc.initial.exclusion_zones.push_back(rect_from(jz, "exclusion zone"));
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace helmex
