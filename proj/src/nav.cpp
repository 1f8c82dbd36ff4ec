#include "reactsim/nav.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace reactsim {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct OpenEntry {
  double f;
  double h;
  int y;
  int x;
  int node;
  double g;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    // std::priority_queue is a max-heap; invert for lexicographic min
    return std::tie(a.f, a.h, a.y, a.x) > std::tie(b.f, b.h, b.y, b.x);
  }
};

double octile(CellIndex a, CellIndex b, double cell) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  return (std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy)) * cell;
}

}  // namespace

std::optional<Path> plan_path_masked(const OccupancyGrid& grid,
                                     const std::vector<std::uint8_t>& blocked,
                                     Vec2 from, Vec2 to, bool allow_unknown) {
  const CellIndex start = grid.cell_at(from);
  const CellIndex goal = grid.cell_at(to);
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) return std::nullopt;

  const int w = grid.cells_x();
  const int h = grid.cells_y();
  const double cell = grid.cell_size_m();
  const int start_node = static_cast<int>(grid.idx(start));
  const int goal_node = static_cast<int>(grid.idx(goal));

  auto traversable = [&](CellIndex c) {
    const std::size_t i = grid.idx(c);
    if (static_cast<int>(i) == start_node) {
      return grid.at(c) != Knowledge::Occupied;
    }
    if (blocked[i]) return false;
    const Knowledge k = grid.at(c);
    return k == Knowledge::Free || (allow_unknown && k == Knowledge::Unknown);
  };

  if (grid.at(start) == Knowledge::Occupied) return std::nullopt;
  if (!traversable(goal) && goal_node != start_node) return std::nullopt;

  if (start == goal) {
    Path p;
    p.waypoints.push_back(grid.center_of(start));
    p.length_m = 0.0;
    return p;
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(grid.size(), inf);
  std::vector<int> parent(grid.size(), -1);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;

  g[start_node] = 0.0;
  open.push({octile(start, goal, cell), octile(start, goal, cell), start.y,
             start.x, start_node, 0.0});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (top.g > g[top.node]) continue;  // stale entry
    if (top.node == goal_node) break;

    const CellIndex c{top.x, top.y};
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb{c.x + dx, c.y + dy};
        if (nb.x < 0 || nb.x >= w || nb.y < 0 || nb.y >= h) continue;
        if (!traversable(nb)) continue;
        if (dx != 0 && dy != 0) {
          // no corner cutting past a blocked orthogonal neighbor
          if (!traversable({c.x + dx, c.y}) || !traversable({c.x, c.y + dy})) {
            continue;
          }
        }
        const double step = (dx != 0 && dy != 0) ? kSqrt2 * cell : cell;
        const double cand = g[top.node] + step;
        const int nb_node = static_cast<int>(grid.idx(nb));
        if (cand < g[nb_node]) {
          g[nb_node] = cand;
          parent[nb_node] = top.node;
          const double hh = octile(nb, goal, cell);
          open.push({cand + hh, hh, nb.y, nb.x, nb_node, cand});
        }
      }
    }
  }

  if (g[goal_node] == inf) return std::nullopt;

  std::vector<int> chain;
  for (int n = goal_node; n != -1; n = parent[n]) chain.push_back(n);
  std::reverse(chain.begin(), chain.end());

  Path p;
  p.waypoints.reserve(chain.size());
  int axis_steps = 0, diag_steps = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const CellIndex c{chain[i] % w, chain[i] / w};
    p.waypoints.push_back(grid.center_of(c));
    if (i > 0) {
      const CellIndex prev{chain[i - 1] % w, chain[i - 1] / w};
      if (prev.x != c.x && prev.y != c.y) {
        ++diag_steps;
      } else {
        ++axis_steps;
      }
    }
  }
  p.length_m = (axis_steps + kSqrt2 * diag_steps) * cell;
  return p;
}

std::optional<Path> plan_path(const OccupancyGrid& grid, Vec2 from, Vec2 to,
                              double robot_radius_m, bool allow_unknown) {
  return plan_path_masked(grid, inflate_occupied(grid, robot_radius_m), from, to,
                          allow_unknown);
}

double known_obstacle_distance(const OccupancyGrid& grid, Vec2 p, double cap_m) {
  const double cell = grid.cell_size_m();
  const CellIndex c = grid.cell_at(p);
  const int reach = static_cast<int>(std::ceil(cap_m / cell)) + 1;
  double best = cap_m;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const CellIndex nb{c.x + dx, c.y + dy};
      if (!grid.in_bounds(nb)) continue;
      if (grid.at(nb) != Knowledge::Occupied) continue;
      best = std::min(best, point_to_cell_distance(p, grid.center_of(nb), cell));
    }
  }
  return best;
}

double speed_near_obstacles(const NavParams& nav, double obstacle_distance_m) {
  if (obstacle_distance_m >= nav.d_slow) return nav.v_max;
  const double v = nav.v_max * (obstacle_distance_m / nav.d_slow);
  return std::clamp(v, nav.v_min, nav.v_max);
}

double estimate_travel_time(const OccupancyGrid& grid, const Path& path,
                            const NavParams& nav) {
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    const Vec2 a = path.waypoints[i];
    const Vec2 b = path.waypoints[i + 1];
    const double len = dist(a, b);
    if (len <= 0.0) continue;
    const double d = known_obstacle_distance(grid, a, nav.d_slow);
    t += len / speed_near_obstacles(nav, d);
  }
  return t;
}

MotionStep step_motion(RobotState& state, const OccupancyGrid& merged,
                       const std::vector<std::uint8_t>* reserved,
                       const WorldMap& truth, const NavParams& nav,
                       const PowerProfile& power, double dt_s, bool power_sensing) {
  MotionStep out;
  if (state.status == RobotStatus::Depleted) return out;

  constexpr double kEps = 1e-9;
  double moved = 0.0;
  double expected = 0.0;
  bool blocked = false;

  if (state.status == RobotStatus::Moving && state.has_path()) {
    const double d = known_obstacle_distance(merged, state.pose, nav.d_slow);
    const double v = speed_near_obstacles(nav, d);
    double remaining = v * dt_s;
    expected = remaining;

    while (remaining > kEps && state.has_path()) {
      const Vec2 target = state.current_path.waypoints[state.path_cursor];
      const Vec2 seg = target - state.pose;
      const double seg_len = norm(seg);
      if (seg_len <= kEps) {
        ++state.path_cursor;
        continue;
      }
      const double step_len = std::min(seg_len, remaining);
      const Vec2 new_pose = state.pose + seg * (step_len / seg_len);
      // probe a hair ahead so a pose landing exactly on a cell boundary is
      // attributed to the cell being entered, not a grazed neighbor
      const Vec2 probe = state.pose + seg * ((step_len + 1e-9) / seg_len);
      const CellIndex new_cell = truth.cell_at(probe);
      if (new_cell != truth.cell_at(state.pose)) {
        if (truth.occupied(new_cell)) {
          blocked = true;
          break;
        }
        if (reserved && (*reserved)[truth.idx(new_cell)]) {
          blocked = true;
          break;
        }
      }
      state.pose = new_pose;
      moved += step_len;
      remaining -= step_len;
      if (step_len >= seg_len - kEps) ++state.path_cursor;
    }
  }

  state.speed_mps = moved / dt_s;
  out.moved_m = moved;
  out.blocked = blocked;

  const double physical = step_energy(power, state.speed_mps, power_sensing, dt_s);
  const double scheduled =
      step_energy(power, state.speed_mps, state.sensing_on, dt_s);
  out.energy_j = physical;
  state.energy_consumed_j += physical;
  state.scheduled_charge_j = std::max(0.0, state.scheduled_charge_j - scheduled);
  if (drain(state.battery, physical) == DrainResult::Depleted) {
    state.status = RobotStatus::Depleted;
    out.depleted = true;
    return out;
  }

  if (state.status == RobotStatus::Moving && !state.has_path()) {
    state.status = RobotStatus::Idle;
    state.speed_mps = 0.0;
    out.reached_end = true;
  }

  // stall detection is progress-based: a robot micro-nudging against another
  // robot or a wall still counts as blocked
  if (!out.reached_end && state.status == RobotStatus::Moving &&
      moved < 0.5 * expected) {
    state.stuck_time_s += dt_s;
    if (state.stuck_time_s >= nav.stuck_timeout_s) {
      state.status = RobotStatus::Stuck;
      out.became_stuck = true;
    }
  } else if (moved > kEps) {
    state.stuck_time_s = 0.0;
  }
  return out;
}

}  // namespace reactsim
