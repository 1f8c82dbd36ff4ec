#include "reactsim/oros.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

namespace reactsim {

namespace {

bool coarse_traversable(const OccupancyGrid& merged,
                        const std::vector<std::uint8_t>& blocked, CellIndex c) {
  if (!merged.in_bounds(c)) return false;
  if (merged.at(c) == Knowledge::Occupied) return false;
  return !blocked[merged.idx(c)];
}

// All minimal-hop routes from one subarea to another over the coarse graph,
// lexicographic order, capped.
std::vector<std::vector<int>> minimal_routes(const std::vector<std::vector<int>>& adj,
                                             int from, int to, int cap) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> hops(n, -1);
  std::deque<int> frontier{from};
  hops[from] = 0;
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop_front();
    for (int nb : adj[s]) {
      if (hops[nb] < 0) {
        hops[nb] = hops[s] + 1;
        frontier.push_back(nb);
      }
    }
  }
  if (hops[to] < 0) return {};

  std::vector<std::vector<int>> routes;
  std::vector<int> cur{from};
  std::function<void(int)> walk = [&](int s) {
    if (static_cast<int>(routes.size()) >= cap) return;
    if (s == to) {
      routes.push_back(cur);
      return;
    }
    for (int nb : adj[s]) {
      if (hops[nb] != hops[s] + 1) continue;
      cur.push_back(nb);
      walk(nb);
      cur.pop_back();
      if (static_cast<int>(routes.size()) >= cap) return;
    }
  };
  walk(from);
  return routes;
}

struct PlanContext {
  const SubareaGrid& sg;
  const std::vector<RobotState>& robots;
  const OrosParams& params;
  double sigma;
  std::vector<Vec2> anchor_pos;  // per subarea; NaN when no anchor
  std::vector<std::vector<int>> adj;

  bool has_anchor(int sub) const { return !std::isnan(anchor_pos[sub].x); }
};

double route_energy(const PlanContext& ctx, const RobotState& robot,
                    const std::vector<int>& route,
                    std::vector<std::uint8_t>* leg_sensing_out) {
  double energy = 0.0;
  Vec2 at = robot.pose;
  for (std::size_t k = 1; k < route.size(); ++k) {
    const Vec2 next = ctx.anchor_pos[route[k]];
    const double leg_dist = dist(at, next);
    // sensors off while heading to an already-explored subarea
    const bool sensing_on = !ctx.sg.explored[route[k]];
    if (leg_sensing_out) leg_sensing_out->push_back(sensing_on ? 1 : 0);
    if (leg_dist > 0.0) {
      const double leg_time = leg_dist / ctx.params.v_max;
      energy += step_energy(ctx.params.power, ctx.params.v_max, sensing_on, leg_time);
    }
    at = next;
  }
  return energy;
}

// Plan objective: expected newly-explored subareas (full credit for targets,
// partial for transited ones, deduplicated across robots in id order) plus
// sigma times the predicted terminal battery sum.
double plan_objective(const PlanContext& ctx,
                      const std::vector<const std::vector<int>*>& routes_by_robot) {
  std::vector<std::uint8_t> claimed(ctx.sg.count(), 0);
  double exploration = 0.0;
  double battery_sum = 0.0;

  for (std::size_t r = 0; r < ctx.robots.size(); ++r) {
    const std::vector<int>* route = routes_by_robot[r];
    double predicted = ctx.robots[r].scheduled_charge_j;
    if (route && route->size() >= 1) {
      for (std::size_t k = 0; k < route->size(); ++k) {
        const int sub = (*route)[k];
        if (ctx.sg.explored[sub] || claimed[sub]) continue;
        if (static_cast<int>(k) > ctx.params.horizon_subareas) continue;
        claimed[sub] = 1;
        exploration += (k + 1 == route->size()) ? 1.0 : ctx.params.transit_credit;
      }
      predicted -= route_energy(ctx, ctx.robots[r], *route, nullptr);
    }
    battery_sum += predicted;
  }
  return exploration + ctx.sigma * battery_sum;
}

}  // namespace

std::optional<CellIndex> subarea_anchor(const SubareaGrid& sg,
                                        const OccupancyGrid& merged,
                                        const std::vector<std::uint8_t>& blocked,
                                        int subarea) {
  const CellRect rect = sg.cell_rect_of(subarea);
  const Vec2 centroid = sg.centroids[subarea];
  std::optional<CellIndex> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int iy = rect.y0; iy < rect.y1; ++iy) {
    for (int ix = rect.x0; ix < rect.x1; ++ix) {
      const CellIndex c{ix, iy};
      if (!coarse_traversable(merged, blocked, c)) continue;
      const Vec2 p = merged.center_of(c);
      const double d2 = (p.x - centroid.x) * (p.x - centroid.x) +
                        (p.y - centroid.y) * (p.y - centroid.y);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
  }
  return best;
}

std::vector<std::pair<int, int>> coarse_edges(const SubareaGrid& sg,
                                              const OccupancyGrid& merged,
                                              const std::vector<std::uint8_t>& blocked) {
  // A doorway needs both probe cells traversable and at least one of them
  // known free: crossings made purely of unseen cells are wishful thinking
  // (often the inside of an unscanned wall).
  auto doorway = [&](CellIndex a, CellIndex b) {
    if (!coarse_traversable(merged, blocked, a) ||
        !coarse_traversable(merged, blocked, b)) {
      return false;
    }
    return merged.at(a) == Knowledge::Free || merged.at(b) == Knowledge::Free;
  };

  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < sg.rows_a; ++a) {
    for (int b = 0; b < sg.cols_b; ++b) {
      const int sub = sg.index(a, b);
      const CellRect rect = sg.cell_rect_of(sub);
      // east neighbor: doorway across the vertical border
      if (b + 1 < sg.cols_b) {
        bool open = false;
        for (int iy = rect.y0; iy < rect.y1 && !open; ++iy) {
          open = doorway({rect.x1 - 1, iy}, {rect.x1, iy});
        }
        if (open) edges.emplace_back(sub, sg.index(a, b + 1));
      }
      // north neighbor: doorway across the horizontal border
      if (a + 1 < sg.rows_a) {
        bool open = false;
        for (int ix = rect.x0; ix < rect.x1 && !open; ++ix) {
          open = doorway({ix, rect.y1 - 1}, {ix, rect.y1});
        }
        if (open) edges.emplace_back(sub, sg.index(a + 1, b));
      }
    }
  }
  return edges;
}

HighLevelPlan solve_oros(const SubareaGrid& sg, const std::vector<RobotState>& robots,
                         const OccupancyGrid& merged, const OrosParams& params) {
  HighLevelPlan plan;
  plan.solver_mode = "exhaustive";

  std::vector<int> unexplored;
  for (int i = 0; i < sg.count(); ++i) {
    if (!sg.explored[i]) unexplored.push_back(i);
  }
  if (unexplored.empty() || robots.empty()) return plan;

  PlanContext ctx{sg, robots, params, params.sigma, {}, {}};
  if (ctx.sigma < 0.0) {
    const double capacity = robots.front().battery.capacity_j;
    ctx.sigma = 1.0 / (static_cast<double>(robots.size()) * capacity);
  }

  const std::vector<std::uint8_t> blocked =
      inflate_occupied(merged, params.robot_radius_m);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  ctx.anchor_pos.assign(sg.count(), {nan, nan});
  for (int i = 0; i < sg.count(); ++i) {
    if (auto c = subarea_anchor(sg, merged, blocked, i)) {
      ctx.anchor_pos[i] = merged.center_of(*c);
    }
  }

  ctx.adj.assign(sg.count(), {});
  for (auto [u, v] : coarse_edges(sg, merged, blocked)) {
    ctx.adj[u].push_back(v);
    ctx.adj[v].push_back(u);
  }
  for (auto& nbs : ctx.adj) std::sort(nbs.begin(), nbs.end());

  // candidate routes per (robot, target)
  const int nr = static_cast<int>(robots.size());
  const int nu = static_cast<int>(unexplored.size());
  std::vector<std::vector<std::vector<std::vector<int>>>> routes(
      nr, std::vector<std::vector<std::vector<int>>>(nu));
  std::vector<std::uint8_t> target_reachable(nu, 0);

  for (int r = 0; r < nr; ++r) {
    const int from = sg.subarea_of_point(robots[r].pose);
    for (int u = 0; u < nu; ++u) {
      const int to = unexplored[u];
      if (from < 0 || !ctx.has_anchor(to)) continue;
      auto rts = minimal_routes(ctx.adj, from, to, params.max_routes_per_pair);
      // drop routes passing a subarea without an anchor to navigate to
      std::vector<std::vector<int>> usable;
      for (auto& rt : rts) {
        bool ok = true;
        for (std::size_t k = 1; k < rt.size(); ++k) {
          if (!ctx.has_anchor(rt[k])) {
            ok = false;
            break;
          }
        }
        if (ok) usable.push_back(std::move(rt));
      }
      if (!usable.empty()) target_reachable[u] = 1;
      routes[r][u] = std::move(usable);
    }
  }

  for (int u = 0; u < nu; ++u) {
    if (!target_reachable[u]) plan.unreachable_subareas.push_back(unexplored[u]);
  }

  // decide solver mode; count assignment x route combinations
  bool exhaustive = nr <= 3 && nu <= 8;
  if (exhaustive) {
    long combos = 1;
    for (int r = 0; r < nr && combos <= params.max_plan_combinations; ++r) {
      long per_robot = 1;  // the "unassigned" option
      for (int u = 0; u < nu; ++u) per_robot += routes[r][u].size();
      combos *= per_robot;
    }
    if (combos > params.max_plan_combinations) exhaustive = false;
  }

  std::vector<const std::vector<int>*> choice(nr, nullptr);
  std::vector<int> choice_target(nr, -1);

  if (exhaustive) {
    double best_objective = -std::numeric_limits<double>::infinity();
    std::vector<const std::vector<int>*> best_choice(nr, nullptr);
    std::vector<std::uint8_t> target_taken(nu, 0);

    std::function<void(int)> enumerate = [&](int r) {
      if (r == nr) {
        const double obj = plan_objective(ctx, choice);
        if (obj > best_objective) {
          best_objective = obj;
          best_choice = choice;
        }
        return;
      }
      for (int u = 0; u < nu; ++u) {
        if (target_taken[u] || routes[r][u].empty()) continue;
        target_taken[u] = 1;
        for (const auto& rt : routes[r][u]) {
          choice[r] = &rt;
          enumerate(r + 1);
        }
        target_taken[u] = 0;
      }
      choice[r] = nullptr;  // leave this robot unassigned
      enumerate(r + 1);
    };
    enumerate(0);

    choice = best_choice;
    plan.objective = best_objective;
    plan.solver_mode = "exhaustive";
  } else {
    // nearest unexplored first, robots in id order
    std::vector<std::uint8_t> target_taken(nu, 0);
    for (int r = 0; r < nr; ++r) {
      int best_u = -1;
      double best_key = std::numeric_limits<double>::infinity();
      for (int u = 0; u < nu; ++u) {
        if (target_taken[u] || routes[r][u].empty()) continue;
        const auto& rt = routes[r][u].front();
        const double key = static_cast<double>(rt.size()) * 1e6 +
                           dist(robots[r].pose, ctx.anchor_pos[unexplored[u]]);
        if (key < best_key) {
          best_key = key;
          best_u = u;
        }
      }
      if (best_u >= 0) {
        target_taken[best_u] = 1;
        choice[r] = &routes[r][best_u].front();
      }
    }
    plan.objective = plan_objective(ctx, choice);
    plan.solver_mode = "greedy";
  }

  for (int r = 0; r < nr; ++r) {
    if (!choice[r]) continue;
    RobotDirective d;
    d.robot_id = robots[r].id;
    d.route = *choice[r];
    d.commanded_speed_mps = params.v_max;
    route_energy(ctx, robots[r], d.route, &d.leg_sensing_on);
    plan.directives.push_back(std::move(d));
  }
  return plan;
}

}  // namespace reactsim
