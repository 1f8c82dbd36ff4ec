#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reactsim/energy.hpp"
#include "reactsim/geometry.hpp"
#include "reactsim/occupancy.hpp"
#include "reactsim/world_map.hpp"

namespace reactsim {

struct Path {
  std::vector<Vec2> waypoints;  // consecutive waypoints are 8-adjacent cell centers
  double length_m = 0.0;
};

enum class RobotStatus : std::uint8_t { Idle, Moving, Stuck, Depleted };

struct NavParams {
  double v_max = 1.0;
  double v_min = 0.1;
  double d_slow = 1.0;
  double robot_radius_m = 0.2;
  double stuck_timeout_s = 5.0;
};

struct RobotState {
  int id = 0;
  Vec2 pose;
  double speed_mps = 0.0;
  Battery battery;
  bool sensing_on = true;  // physical sensor bundle switch
  Path current_path;
  std::size_t path_cursor = 0;
  RobotStatus status = RobotStatus::Idle;
  double stuck_time_s = 0.0;

  // mission accounting, maintained by the engine
  double energy_consumed_j = 0.0;
  double sensing_off_s = 0.0;
  // SoC implied by the commanded power schedule; equals battery.charge_j
  // unless the sensing-off directive is not actuated (always-on baseline).
  double scheduled_charge_j = 0.0;

  bool active() const {
    return status != RobotStatus::Depleted && status != RobotStatus::Stuck;
  }
  bool has_path() const { return path_cursor < current_path.waypoints.size(); }
};

// Shortest 8-connected path on the inflated grid, cost 1 per axis step and
// sqrt(2) per diagonal (in cells). Corner cutting is disallowed. Unknown cells
// are traversable only when allow_unknown; the start cell is exempt from the
// inflation test so a robot pressed against a newly discovered wall can still
// plan its way out. Tie-breaking is lexicographic (f, h, row, col).
std::optional<Path> plan_path(const OccupancyGrid& grid, Vec2 from, Vec2 to,
                              double robot_radius_m, bool allow_unknown);
std::optional<Path> plan_path_masked(const OccupancyGrid& grid,
                                     const std::vector<std::uint8_t>& blocked,
                                     Vec2 from, Vec2 to, bool allow_unknown);

// Distance from p to the nearest known-Occupied cell square, capped at cap_m.
double known_obstacle_distance(const OccupancyGrid& grid, Vec2 p, double cap_m);

// Commanded-speed model: v_max in open space, scaled down linearly within
// d_slow of a known obstacle, clamped to [v_min, v_max].
double speed_near_obstacles(const NavParams& nav, double obstacle_distance_m);

// Path traversal time under the speed model (deceleration estimate included).
double estimate_travel_time(const OccupancyGrid& grid, const Path& path,
                            const NavParams& nav);

struct MotionStep {
  double moved_m = 0.0;
  double energy_j = 0.0;
  bool reached_end = false;
  bool blocked = false;        // wanted to move but the next cell is unusable
  bool became_stuck = false;   // blocked continuously for stuck_timeout_s
  bool depleted = false;
};

// Advances the robot along its current path by speed*dt, consuming energy.
// `reserved` (optional, grid-sized) marks cells held by other robots; the
// ground-truth map is the engine's cross-check that motion never enters an
// Occupied cell regardless of grid staleness. power_sensing tells whether the
// sensing bundle draws power this tick (it may differ from state.sensing_on
// only in the always-on baseline).
MotionStep step_motion(RobotState& state, const OccupancyGrid& merged,
                       const std::vector<std::uint8_t>* reserved,
                       const WorldMap& truth, const NavParams& nav,
                       const PowerProfile& power, double dt_s, bool power_sensing);

}  // namespace reactsim
