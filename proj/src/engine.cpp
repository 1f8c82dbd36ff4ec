#include "reactsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <iostream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "reactsim/log.hpp"
#include "reactsim/oros.hpp"

namespace reactsim {

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct RouteExec {
  std::vector<int> route;
  std::vector<std::uint8_t> leg_sensing;
  std::size_t next_leg = 1;

  bool has() const { return !route.empty(); }
  bool transiting() const { return has() && next_leg < route.size(); }
  bool arrived() const { return has() && next_leg >= route.size(); }
  int target() const { return route.empty() ? -1 : route.back(); }
  void clear() {
    route.clear();
    leg_sensing.clear();
    next_leg = 1;
  }
};

struct PendingScan {
  long deliver_tick = 0;
  int robot = 0;
  LidarScan scan;
};

class Mission {
 public:
  Mission(const Scenario& scenario, const WorldMap& map)
      : sc_(scenario),
        map_(map),
        obs_(compute_observability(map)),
        merged_(OccupancyGrid::unknown_like(map)),
        sg_(build_subarea_grid(map, scenario.subarea_size_m, obs_)),
        orch_(orchestrator_params(scenario),
              std::hypot(map.width_m, map.height_m)),
        oros_(oros_params(scenario)) {}

  MissionResult run();

 private:
  // setup
  void spawn_robots();

  // per-tick phases
  void realtime_phase(long tick);
  void motion_phase(long tick);
  void scan_phase(long tick);
  void deliver_due(long tick);
  void record_sample(long tick);
  bool mission_done() const;
  void repair_path(std::size_t i, long tick);
  bool try_yield(std::size_t i);

  // helpers
  void request_oros() { pending_oros_ = true; }
  void call_oros(long tick);
  void plan_leg(std::size_t i, long tick);
  void validate_leg_path(std::size_t i, long tick);
  void set_sensing(std::size_t i, bool on) { robots_[i].sensing_on = on; }
  bool path_cells_usable(const RobotState& r) const;
  Vec2 anchor_point(int subarea) const;
  void check_invariants(long tick) const;

  const Scenario& sc_;
  const WorldMap& map_;
  Observability obs_;
  OccupancyGrid merged_;
  std::vector<OccupancyGrid> own_grids_;
  SubareaGrid sg_;
  Orchestrator orch_;
  OrosParams oros_;

  std::vector<RobotState> robots_;
  std::vector<RouteExec> routes_;
  std::vector<long> dwell_until_;
  std::vector<long> off_ticks_;
  std::vector<int> idle_rounds_;  // boundaries spent idle inside an unfinished subarea
  std::vector<Vec2> yield_goal_;  // original goal while sidestepping (NaN: none)
  std::vector<std::uint8_t> idle_requested_;  // one re-plan request per idle episode
  std::vector<std::uint8_t> sweep_assigned_;   // subareas some robot was sent to
  std::deque<PendingScan> pending_;
  std::vector<std::uint8_t> occupied_by_robot_;
  std::map<int, int> unreachable_rounds_;

  MissionResult result_;
  EventLog& events_ = result_.events;
  bool pending_oros_ = true;
  bool dpi_no_more_ = false;
  std::vector<std::string> solver_modes_;
  double prev_coverage_ = 0.0;
};

void Mission::spawn_robots() {
  std::vector<std::size_t> order(map_.spawn_points.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(sc_.seed);
  std::shuffle(order.begin(), order.end(), rng);

  robots_.resize(sc_.robots);
  for (int i = 0; i < sc_.robots; ++i) {
    RobotState& r = robots_[i];
    r.id = i;
    r.pose = map_.spawn_points[order[i]];
    r.battery = {sc_.battery_capacity_j, sc_.battery_capacity_j};
    r.scheduled_charge_j = sc_.battery_capacity_j;
    r.sensing_on = true;
    r.status = RobotStatus::Idle;
  }
  routes_.resize(robots_.size());
  dwell_until_.assign(robots_.size(), -1);
  off_ticks_.assign(robots_.size(), 0);
  idle_rounds_.assign(robots_.size(), 0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  yield_goal_.assign(robots_.size(), {nan, nan});
  idle_requested_.assign(robots_.size(), 0);
  sweep_assigned_.assign(sg_.count(), 0);
  own_grids_.assign(robots_.size(), OccupancyGrid::unknown_like(map_));
  occupied_by_robot_.assign(map_.cells.size(), 0);
  for (const RobotState& r : robots_) {
    occupied_by_robot_[map_.idx(map_.cell_at(r.pose))] = 1;
  }
}

Vec2 Mission::anchor_point(int subarea) const {
  const auto blocked = inflate_occupied(merged_, sc_.nav.robot_radius_m);
  if (auto c = subarea_anchor(sg_, merged_, blocked, subarea)) {
    return merged_.center_of(*c);
  }
  return sg_.centroids[subarea];
}

bool Mission::path_cells_usable(const RobotState& r) const {
  for (std::size_t k = r.path_cursor; k < r.current_path.waypoints.size(); ++k) {
    const CellIndex c = merged_.cell_at(r.current_path.waypoints[k]);
    if (merged_.at(c) == Knowledge::Occupied) return false;
  }
  return true;
}

void Mission::plan_leg(std::size_t i, long tick) {
  RobotState& r = robots_[i];
  RouteExec& rt = routes_[i];
  if (!rt.transiting()) return;
  const int next_sub = rt.route[rt.next_leg];
  auto path = plan_path(merged_, r.pose, anchor_point(next_sub),
                        sc_.nav.robot_radius_m, /*allow_unknown=*/true);
  if (!path) {
    rt.clear();
    set_sensing(i, true);
    request_oros();
    return;
  }
  r.current_path = std::move(*path);
  r.path_cursor = 0;
  r.status = RobotStatus::Moving;
  r.stuck_time_s = 0.0;
  // Sensors run dark only when the commanded hop target is itself already
  // explored (a revisit move); heading into fresh territory they stay on.
  set_sensing(i, !sg_.explored[next_sub]);
  (void)tick;
}

void Mission::validate_leg_path(std::size_t i, long tick) {
  RobotState& r = robots_[i];
  if (r.status != RobotStatus::Moving || !r.has_path()) return;
  if (path_cells_usable(r)) return;
  repair_path(i, tick);
}

void Mission::repair_path(std::size_t i, long tick) {
  RobotState& r = robots_[i];
  // The path crosses a newly discovered wall or a standing robot; re-plan the
  // same goal, steering around the other robots' current cells.
  const Vec2 goal = r.current_path.waypoints.back();
  std::vector<std::uint8_t> blocked =
      inflate_occupied(merged_, sc_.nav.robot_radius_m);
  for (const RobotState& other : robots_) {
    if (other.id == r.id) continue;
    const CellIndex c = merged_.cell_at(other.pose);
    if (merged_.in_bounds(c)) blocked[merged_.idx(c)] = 1;
  }
  auto path = plan_path_masked(merged_, blocked, r.pose, goal, /*allow_unknown=*/true);
  if (path) {
    r.current_path = std::move(*path);
    r.path_cursor = 0;
    return;
  }
  if (orch_.has_active_target(r.id)) {
    orch_.on_robot_stuck(r, tick, events_);  // requeues the target
    r.status = RobotStatus::Idle;
    r.stuck_time_s = 0.0;
  } else if (routes_[i].has()) {
    routes_[i].clear();
    r.current_path = {};
    r.path_cursor = 0;
    r.status = RobotStatus::Idle;
    set_sensing(i, true);
    request_oros();
  }
}

void Mission::call_oros(long tick) {
  // Robots that have arrived in their target subarea are working it; they
  // rejoin the pool when its flag sets. Everyone else idle or in transit is
  // re-planned (receding horizon).
  std::vector<RobotState> eligible;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const RobotState& r = robots_[i];
    if (!r.active() || orch_.has_active_target(r.id)) continue;
    if (routes_[i].arrived() && !sg_.explored[routes_[i].target()]) continue;
    if (dwell_until_[i] >= 0) continue;
    eligible.push_back(r);
  }
  if (eligible.empty()) {
    pending_oros_ = false;
    return;
  }

  HighLevelPlan plan = solve_oros(sg_, eligible, merged_, oros_);
  if (std::find(solver_modes_.begin(), solver_modes_.end(), plan.solver_mode) ==
      solver_modes_.end()) {
    solver_modes_.push_back(plan.solver_mode);
  }

  std::string payload = "objective=" + fmt6(plan.objective) +
                        " mode=" + plan.solver_mode;

  // fresh receding-horizon routes for every eligible robot
  for (const RobotState& e : eligible) {
    const std::size_t i = static_cast<std::size_t>(e.id);
    routes_[i].clear();
    if (robots_[i].status == RobotStatus::Moving &&
        !orch_.has_active_target(e.id)) {
      robots_[i].current_path = {};
      robots_[i].path_cursor = 0;
      robots_[i].status = RobotStatus::Idle;
    }
    set_sensing(i, robots_[i].status != RobotStatus::Depleted);
  }
  for (const RobotDirective& d : plan.directives) {
    const std::size_t i = static_cast<std::size_t>(d.robot_id);
    if (d.target_subarea() >= 0) sweep_assigned_[d.target_subarea()] = 1;
    routes_[i].route = d.route;
    routes_[i].leg_sensing = d.leg_sensing_on;
    routes_[i].next_leg = 1;
    const int t = d.target_subarea();
    payload += " robot=" + std::to_string(d.robot_id) +
               " target=" + std::to_string(sg_.row_of(t)) + "," +
               std::to_string(sg_.col_of(t)) + " sensing=" +
               (d.leg_sensing_on.empty() || d.leg_sensing_on.front() ? "1" : "0");
    payload += " route=" + std::to_string(d.route.front());
    for (std::size_t k = 1; k < d.route.size(); ++k) {
      payload += "-" + std::to_string(d.route[k]) +
                 (d.leg_sensing_on[k - 1] ? "" : "*");  // * marks a dark leg
    }
    if (routes_[i].transiting()) {
      plan_leg(i, tick);
    }
  }

  // Subareas no eligible robot can route to are written off after 3 misses,
  // but only once their whole neighborhood is explored: while a neighbor is
  // still being swept, a doorway may yet be discovered.
  std::string exceptions;
  auto neighbors_explored = [&](int sub) {
    const int a = sg_.row_of(sub), b = sg_.col_of(sub);
    const int nbs[4][2] = {{a + 1, b}, {a - 1, b}, {a, b + 1}, {a, b - 1}};
    for (auto& nb : nbs) {
      if (nb[0] < 0 || nb[0] >= sg_.rows_a || nb[1] < 0 || nb[1] >= sg_.cols_b) {
        continue;
      }
      if (!sg_.explored[sg_.index(nb[0], nb[1])]) return false;
    }
    return true;
  };
  for (int sub : plan.unreachable_subareas) {
    if (!neighbors_explored(sub)) {
      unreachable_rounds_[sub] = 0;
      continue;
    }
    const int n = ++unreachable_rounds_[sub];
    if (n >= 3 && !sg_.explored[sub]) {
      sg_.explored[sub] = 1;
      sg_.explored_by_exception[sub] = 1;
      exceptions += " exception=" + std::to_string(sg_.row_of(sub)) + "," +
                    std::to_string(sg_.col_of(sub));
    }
  }
  for (auto& [sub, n] : unreachable_rounds_) {
    if (std::find(plan.unreachable_subareas.begin(), plan.unreachable_subareas.end(),
                  sub) == plan.unreachable_subareas.end()) {
      n = 0;
    }
  }
  events_.push_back({tick, EventType::CallOros, payload + exceptions});
  pending_oros_ = false;
}

void Mission::realtime_phase(long tick) {
  const int newly =
      update_coverage(sg_, merged_, obs_, sc_.delta, &sweep_assigned_);
  if (newly > 0) {
    // the world changed; idle robots may be assignable again
    std::fill(idle_requested_.begin(), idle_requested_.end(), 0);
    request_oros();
  }
  if (result_.flags_complete_tick < 0 && sg_.all_explored()) {
    result_.flags_complete_tick = tick;
  }

  const bool local_targets = sc_.strategy != Strategy::OrosOnly;

  if (local_targets) orch_.refresh_targets(merged_, robots_, tick, events_);

  // routes whose target got explored while in transit are obsolete
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    RouteExec& rt = routes_[i];
    if (!rt.has() || orch_.has_active_target(robots_[i].id)) continue;
    if (dwell_until_[i] >= 0) continue;  // dwell finishes on its own
    if (sg_.explored[rt.target()]) {
      rt.clear();
      if (robots_[i].status == RobotStatus::Moving) {
        robots_[i].current_path = {};
        robots_[i].path_cursor = 0;
        robots_[i].status = RobotStatus::Idle;
      }
      set_sensing(i, true);
      request_oros();
    }
  }

  // OROS_ONLY: a finished dwell at the subarea anchor flags it explored,
  // blind spots disregarded.
  if (sc_.strategy == Strategy::OrosOnly) {
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      RobotState& r = robots_[i];
      if (dwell_until_[i] >= 0 && tick >= dwell_until_[i]) {
        const int sub = routes_[i].target();
        if (sub >= 0) sg_.explored[sub] = 1;
        dwell_until_[i] = -1;
        routes_[i].clear();
        request_oros();
        continue;
      }
      // a route that starts and ends in the robot's own subarea has no legs;
      // walk to the anchor before the dwell scan
      if (r.active() && r.status == RobotStatus::Idle && routes_[i].arrived() &&
          dwell_until_[i] < 0) {
        const Vec2 anchor = anchor_point(routes_[i].target());
        auto path = plan_path(merged_, r.pose, anchor, sc_.nav.robot_radius_m,
                              /*allow_unknown=*/true);
        if (path && path->length_m > 1e-9) {
          r.current_path = std::move(*path);
          r.path_cursor = 0;
          r.status = RobotStatus::Moving;
          set_sensing(i, true);
        } else {
          dwell_until_[i] = tick + sc_.realtime_ticks();
        }
      }
    }
  }

  std::vector<TargetAssignment> assigned;
  if (local_targets) {
    std::vector<int> working(robots_.size(), -1);
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      if (orch_.has_active_target(robots_[i].id)) {
        working[i] = orch_.active_target_subarea(robots_[i].id);
      } else if (routes_[i].has()) {
        working[i] = routes_[i].target();
      }
    }
    assigned = orch_.realtime_step(merged_, robots_, working, sg_, tick, events_);

    // a robot parked in an unfinished subarea with nothing reachable left:
    // write the leftovers off so the mission cannot livelock
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      RobotState& r = robots_[i];
      const RouteExec& rt = routes_[i];
      if (!r.active() || r.status != RobotStatus::Idle) {
        idle_rounds_[i] = 0;
        continue;
      }
      if (orch_.has_active_target(r.id) || !rt.arrived()) {
        idle_rounds_[i] = 0;
        continue;
      }
      const int w = rt.target();
      if (w < 0 || sg_.explored[w]) {
        idle_rounds_[i] = 0;
        continue;
      }
      bool work_left = false;
      for (const LocalTarget& t : orch_.deferred_queue()) {
        if (t.subarea == w && t.region.accessible) {
          work_left = true;
          break;
        }
      }
      for (const RobotState& other : robots_) {
        if (orch_.active_target_subarea(other.id) == w) {
          work_left = true;
          break;
        }
      }
      if (work_left) {
        idle_rounds_[i] = 0;
        continue;
      }
      if (++idle_rounds_[i] >= 2) {
        sg_.explored[w] = 1;
        sg_.explored_by_exception[w] = 1;
        routes_[i].clear();
        idle_rounds_[i] = 0;
        request_oros();
      }
    }
  }

  // path upkeep: newly discovered walls invalidate standing paths
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    RobotState& r = robots_[i];
    if (!r.active()) continue;
    const bool stalled = r.status == RobotStatus::Moving && r.stuck_time_s > 0.2;
    if (stalled && try_yield(i)) continue;
    if (orch_.has_active_target(r.id)) {
      if (r.status == RobotStatus::Moving && r.has_path() &&
          (stalled || !path_cells_usable(r))) {
        repair_path(i, tick);
      }
      continue;
    }
    if (stalled && r.has_path()) {
      repair_path(i, tick);
      continue;
    }
    validate_leg_path(i, tick);
    if (routes_[i].transiting() && r.status == RobotStatus::Idle) {
      plan_leg(i, tick);
    }
  }

  // robots with nothing to do trigger a re-plan, once per idle episode
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const RobotState& r = robots_[i];
    if (r.active() && r.status == RobotStatus::Idle &&
        !orch_.has_active_target(r.id) && !routes_[i].has() &&
        dwell_until_[i] < 0) {
      if (!idle_requested_[i]) {
        idle_requested_[i] = 1;
        request_oros();
      }
    } else {
      idle_requested_[i] = 0;
    }
  }
  if (pending_oros_) call_oros(tick);

  if (sc_.strategy == Strategy::React && sg_.all_explored()) {
    if (!orch_.dpi_started() && !orch_.dpi_skipped()) {
      orch_.begin_dpi(robots_, merged_, tick, tick * sc_.dt_s, sc_.t_max_s, events_);
      if (orch_.dpi_started() && orch_.deferred_queue().empty() &&
          orch_.active_target_count() == 0) {
        dpi_no_more_ = true;
      }
    } else if (orch_.dpi_started() && !dpi_no_more_) {
      bool all_empty = true;
      for (RobotState& r : robots_) {
        if (!r.active() || orch_.has_active_target(r.id)) continue;
        if (orch_.next_dpi_target(r, merged_, tick, events_)) {
          all_empty = false;
        }
      }
      if (all_empty && orch_.active_target_count() == 0) dpi_no_more_ = true;
    }
  }
}

void Mission::motion_phase(long tick) {
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    RobotState& r = robots_[i];
    const bool was_active = r.status != RobotStatus::Depleted;
    const CellIndex old_cell = map_.cell_at(r.pose);
    occupied_by_robot_[map_.idx(old_cell)] = 0;

    const bool power_sensing = sc_.always_on ? was_active : r.sensing_on;
    const MotionStep step = step_motion(r, merged_, &occupied_by_robot_, map_, sc_.nav,
                                        sc_.power, sc_.dt_s, power_sensing);
    occupied_by_robot_[map_.idx(map_.cell_at(r.pose))] = 1;

    if (was_active && !r.sensing_on && r.status != RobotStatus::Depleted) {
      ++off_ticks_[i];
    }

    if (step.became_stuck) {
      orch_.on_robot_stuck(r, tick, events_);
      if (routes_[i].has()) routes_[i].clear();
      r.status = RobotStatus::Idle;
      r.stuck_time_s = 0.0;
      set_sensing(i, true);
      request_oros();
      continue;
    }

    if (step.reached_end && !std::isnan(yield_goal_[i].x)) {
      // sidestep finished; resume the interrupted goal
      const Vec2 goal = yield_goal_[i];
      yield_goal_[i] = {std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
      auto path =
          plan_path(merged_, r.pose, goal, sc_.nav.robot_radius_m, true);
      if (path) {
        r.current_path = std::move(*path);
        r.path_cursor = 0;
        r.status = RobotStatus::Moving;
        continue;
      }
      // fall through to normal arrival handling when the goal is gone
    }
    if (step.reached_end) {
      if (orch_.has_active_target(r.id)) {
        orch_.on_robot_arrived(r, merged_, tick, events_);
        if (orch_.dpi_started()) {
          orch_.next_dpi_target(r, merged_, tick, events_);
        }
      } else if (routes_[i].transiting()) {
        ++routes_[i].next_leg;
        if (routes_[i].transiting()) {
          plan_leg(i, tick);
        } else {
          // arrived in the target subarea
          set_sensing(i, true);
          if (sc_.strategy == Strategy::OrosOnly) {
            dwell_until_[i] = tick + sc_.realtime_ticks();
          }
        }
      } else if (routes_[i].arrived() && sc_.strategy == Strategy::OrosOnly &&
                 dwell_until_[i] < 0) {
        set_sensing(i, true);
        dwell_until_[i] = tick + sc_.realtime_ticks();
      } else {
        set_sensing(i, true);
      }
    }
  }
}

void Mission::scan_phase(long tick) {
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    RobotState& r = robots_[i];
    if (r.status == RobotStatus::Depleted || !r.sensing_on) continue;
    LidarScan s = scan(map_, r.pose, sc_.n_rays, sc_.sensing_range_m);
    integrate_scan(own_grids_[i], s);
    pending_.push_back({tick + sc_.latency_ticks(), static_cast<int>(i), std::move(s)});
  }
}

void Mission::deliver_due(long tick) {
  while (!pending_.empty() && pending_.front().deliver_tick <= tick) {
    integrate_scan(merged_, pending_.front().scan);
    pending_.pop_front();
  }
}

void Mission::record_sample(long tick) {
  CoverageSample s;
  s.tick = tick;
  s.seconds = (tick + 1) * sc_.dt_s;
  s.coverage = obs_.reachable_free_count > 0
                   ? static_cast<double>(merged_.known_free_count()) /
                         obs_.reachable_free_count
                   : 1.0;
  if (s.coverage + 1e-12 < prev_coverage_) {
    throw EngineInvariantError("coverage series decreased at tick " +
                               std::to_string(tick));
  }
  prev_coverage_ = s.coverage;
  for (const RobotState& r : robots_) s.charge_j.push_back(r.battery.charge_j);
  result_.coverage.push_back(std::move(s));

  for (const RobotState& r : robots_) {
    const bool power =
        r.status != RobotStatus::Depleted && (sc_.always_on || r.sensing_on);
    result_.trajectories.push_back(
        {tick, r.id, r.pose.x, r.pose.y, power});
  }
}

void Mission::check_invariants(long tick) const {
  for (const RobotState& r : robots_) {
    // a pose exactly on a grid line belongs to any cell it touches
    bool in_free = false;
    for (int dx = -1; dx <= 0 && !in_free; ++dx) {
      for (int dy = -1; dy <= 0; ++dy) {
        const Vec2 p{r.pose.x + dx * 1e-9, r.pose.y + dy * 1e-9};
        if (!map_.occupied(map_.cell_at(p))) {
          in_free = true;
          break;
        }
      }
    }
    const CellIndex c = map_.cell_at(r.pose);
    if (!in_free) {
      std::string dump = "robot inside ground-truth obstacle: tick=" +
                         std::to_string(tick) + " robot=" + std::to_string(r.id) +
                         " x=" + fmt6(r.pose.x) + " y=" + fmt6(r.pose.y);
      throw EngineInvariantError(dump);
    }
    if (r.battery.charge_j > r.battery.capacity_j + 1e-9) {
      throw EngineInvariantError("battery above capacity: robot " +
                                 std::to_string(r.id));
    }
  }
}

// A robot stalled against a lower-priority-id robot sidesteps away from it
// for one move, then resumes its original goal. Breaks symmetric face-offs
// deterministically: the lower id holds its course, the higher id yields.
bool Mission::try_yield(std::size_t i) {
  RobotState& r = robots_[i];
  if (!r.has_path()) return false;

  const RobotState* opponent = nullptr;
  for (const RobotState& other : robots_) {
    if (other.id >= r.id || other.status == RobotStatus::Depleted) continue;
    if (dist(other.pose, r.pose) < 1.0) {
      opponent = &other;
      break;
    }
  }
  if (!opponent) return false;

  const std::vector<std::uint8_t> blocked =
      inflate_occupied(merged_, sc_.nav.robot_radius_m);
  const CellIndex cur = merged_.cell_at(r.pose);
  CellIndex best{-1, -1};
  double best_d = -1.0;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const CellIndex c{cur.x + dx, cur.y + dy};
      if (!merged_.in_bounds(c)) continue;
      if (merged_.at(c) != Knowledge::Free || blocked[merged_.idx(c)]) continue;
      if (occupied_by_robot_[map_.idx(c)]) continue;
      const double d = dist(merged_.center_of(c), opponent->pose);
      if (d > best_d) {
        best_d = d;
        best = c;
      }
    }
  }
  if (best.x < 0) return false;

  if (std::isnan(yield_goal_[i].x)) {
    yield_goal_[i] = r.current_path.waypoints.back();
  }
  auto path = plan_path(merged_, r.pose, merged_.center_of(best),
                        sc_.nav.robot_radius_m, /*allow_unknown=*/false);
  if (!path) return false;
  r.current_path = std::move(*path);
  r.path_cursor = 0;
  r.status = RobotStatus::Moving;
  r.stuck_time_s = 0.0;
  return true;
}

bool Mission::mission_done() const {
  if (!sg_.all_explored()) return false;
  if (orch_.active_target_count() > 0) return false;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const RobotState& r = robots_[i];
    if (r.status == RobotStatus::Moving) return false;
    if (r.active() && routes_[i].transiting()) return false;
    if (dwell_until_[i] >= 0) return false;
  }
  if (sc_.strategy == Strategy::React) {
    if (!(orch_.dpi_skipped() || (orch_.dpi_started() && dpi_no_more_))) return false;
  }
  return true;
}

MissionResult Mission::run() {
  validate_scenario(sc_, map_);
  spawn_robots();

  const long t_ticks = sc_.total_ticks();
  const long rt_ticks = sc_.realtime_ticks();

  // initial scan burst so the first plan has something to chew on
  scan_phase(0);
  deliver_due(0);

  long tick = 0;
  for (; tick < t_ticks; ++tick) {
    deliver_due(tick);
    if (tick % rt_ticks == 0) realtime_phase(tick);
    motion_phase(tick);
    scan_phase(tick);
    deliver_due(tick);
    record_sample(tick);
    check_invariants(tick);

    bool all_depleted = true;
    for (const RobotState& r : robots_) {
      all_depleted = all_depleted && r.status == RobotStatus::Depleted;
    }
    if (all_depleted || mission_done()) {
      ++tick;
      break;
    }
  }

  result_.end_tick = tick;
  result_.end_seconds = tick * sc_.dt_s;
  orch_.finalize(tick);
  result_.unvisited = orch_.unvisited();
  result_.final_coverage =
      result_.coverage.empty() ? 0.0 : result_.coverage.back().coverage;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const RobotState& r = robots_[i];
    RobotReport rep;
    rep.id = r.id;
    rep.consumed_j = r.energy_consumed_j;
    rep.sensing_off_s = off_ticks_[i] * sc_.dt_s;
    rep.final_charge_j = r.battery.charge_j;
    rep.final_status = r.status;
    rep.final_pose = r.pose;
    result_.robots.push_back(rep);
  }
  std::string modes;
  for (const std::string& m : solver_modes_) {
    if (!modes.empty()) modes += ",";
    modes += m;
  }
  result_.solver_modes = modes;
  result_.final_merged = merged_;
  result_.final_subareas = sg_;
  return std::move(result_);
}

}  // namespace

MissionResult run(const Scenario& scenario, const WorldMap& map) {
  Mission mission(scenario, map);
  return mission.run();
}

MissionResult run(const Scenario& scenario) {
  const WorldMap map = load_map_file(scenario.map_path);
  return run(scenario, map);
}

std::vector<MatrixRow> summarize_run(const Scenario& scenario,
                                     const MissionResult& gated,
                                     const MissionResult* always_on_twin) {
  std::vector<MatrixRow> rows;
  const double t90 = gated.time_to_coverage(0.9);
  for (const RobotReport& r : gated.robots) {
    MatrixRow row;
    row.scenario = scenario.name;
    row.strategy = scenario.strategy;
    row.robots = scenario.robots;
    row.always_on = scenario.always_on;
    row.seed = scenario.seed;
    row.final_coverage = gated.final_coverage;
    row.time_to_90_s = std::isfinite(t90) ? t90 : -1.0;
    row.end_seconds = gated.end_seconds;
    row.robot_id = r.id;
    row.consumed_j = r.consumed_j;
    row.savings_j = 0.0;
    if (always_on_twin && !scenario.always_on) {
      for (const RobotReport& tw : always_on_twin->robots) {
        if (tw.id == r.id) {
          row.savings_j = tw.consumed_j - r.consumed_j;
          break;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MatrixRow> run_strategy_matrix(const std::vector<Scenario>& scenarios) {
  std::vector<MatrixRow> rows;
  for (const Scenario& sc : scenarios) {
    try {
      const WorldMap map = load_map_file(sc.map_path);
      const MissionResult gated = run(sc, map);
      if (!sc.always_on) {
        Scenario twin = sc;
        twin.always_on = true;
        const MissionResult twin_result = run(twin, map);
        auto gated_rows = summarize_run(sc, gated, &twin_result);
        rows.insert(rows.end(), gated_rows.begin(), gated_rows.end());
        auto twin_rows = summarize_run(twin, twin_result, nullptr);
        rows.insert(rows.end(), twin_rows.begin(), twin_rows.end());
      } else {
        auto only = summarize_run(sc, gated, nullptr);
        rows.insert(rows.end(), only.begin(), only.end());
      }
    } catch (const std::exception& e) {
      std::cerr << "matrix: run '" << sc.name << "' seed " << sc.seed
                << " failed: " << e.what() << "\n";
    }
  }
  return rows;
}

void write_coverage_csv(std::ostream& out, const MissionResult& result) {
  out << "tick,seconds,coverage";
  const std::size_t n = result.robots.size();
  for (std::size_t i = 0; i < n; ++i) out << ",charge_" << i;
  out << "\n";
  for (const CoverageSample& s : result.coverage) {
    out << s.tick << ',' << fmt6(s.seconds) << ',' << fmt6(s.coverage);
    for (double c : s.charge_j) out << ',' << fmt6(c);
    out << "\n";
  }
}

void write_trajectories_csv(std::ostream& out, const MissionResult& result) {
  out << "tick,robot,x,y,sensing_on\n";
  for (const TrajectorySample& t : result.trajectories) {
    out << t.tick << ',' << t.robot << ',' << fmt6(t.x) << ',' << fmt6(t.y) << ','
        << (t.sensing_on ? 1 : 0) << "\n";
  }
}

void write_events_log(std::ostream& out, const MissionResult& result) {
  for (const Event& e : result.events) out << format_event(e) << "\n";
}

void write_summary_csv(std::ostream& out, const std::vector<MatrixRow>& rows) {
  out << "scenario,strategy,robots,always_on,seed,final_coverage,time_to_90_s,"
         "end_seconds,robot,consumed_j,savings_j\n";
  for (const MatrixRow& r : rows) {
    out << r.scenario << ',' << strategy_name(r.strategy) << ',' << r.robots << ','
        << (r.always_on ? 1 : 0) << ',' << r.seed << ',' << fmt6(r.final_coverage)
        << ',' << fmt6(r.time_to_90_s) << ',' << fmt6(r.end_seconds) << ','
        << r.robot_id << ',' << fmt6(r.consumed_j) << ',' << fmt6(r.savings_j)
        << "\n";
  }
}

}  // namespace reactsim
