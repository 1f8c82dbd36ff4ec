#include "reactsim/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "reactsim/orchestrator.hpp"
#include "reactsim/subarea.hpp"

namespace reactsim::check {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

double raymarch_distance(const WorldMap& map, Vec2 origin, double angle_rad,
                         double max_range_m, double step_m) {
  const double cx = std::cos(angle_rad);
  const double cy = std::sin(angle_rad);
  for (double t = 0.0; t <= max_range_m; t += step_m) {
    const Vec2 p{origin.x + cx * t, origin.y + cy * t};
    const CellIndex c = map.cell_at(p);
    if (map.occupied(c)) return t;
  }
  return max_range_m;
}

OccupancyGrid merge_by_max(const std::vector<const OccupancyGrid*>& grids) {
  OccupancyGrid out(grids.front()->cells_x(), grids.front()->cells_y(),
                    grids.front()->cell_size_m());
  for (int iy = 0; iy < out.cells_y(); ++iy) {
    for (int ix = 0; ix < out.cells_x(); ++ix) {
      int best = 0;
      for (const OccupancyGrid* g : grids) {
        best = std::max(best, static_cast<int>(g->at({ix, iy})));
      }
      if (best != 0) out.set({ix, iy}, static_cast<Knowledge>(best));
    }
  }
  return out;
}

std::vector<std::vector<CellIndex>> regions_by_floodfill(const OccupancyGrid& grid,
                                                         CellRect rect,
                                                         int min_cells) {
  rect.x0 = std::max(rect.x0, 0);
  rect.y0 = std::max(rect.y0, 0);
  rect.x1 = std::min(rect.x1, grid.cells_x());
  rect.y1 = std::min(rect.y1, grid.cells_y());

  std::set<std::pair<int, int>> unknown;
  for (int iy = rect.y0; iy < rect.y1; ++iy) {
    for (int ix = rect.x0; ix < rect.x1; ++ix) {
      if (grid.at({ix, iy}) == Knowledge::Unknown) unknown.insert({iy, ix});
    }
  }

  std::vector<std::vector<CellIndex>> out;
  while (!unknown.empty()) {
    std::vector<CellIndex> comp;
    std::vector<std::pair<int, int>> stack{*unknown.begin()};
    unknown.erase(unknown.begin());
    while (!stack.empty()) {
      auto [y, x] = stack.back();
      stack.pop_back();
      // scanline expansion west and east, queuing north/south runs
      int x0 = x;
      while (unknown.count({y, x0 - 1})) {
        unknown.erase({y, x0 - 1});
        --x0;
      }
      int x1 = x;
      while (unknown.count({y, x1 + 1})) {
        unknown.erase({y, x1 + 1});
        ++x1;
      }
      for (int xx = x0; xx <= x1; ++xx) {
        comp.push_back({xx, y});
        for (int yy : {y - 1, y + 1}) {
          if (unknown.count({yy, xx})) {
            unknown.erase({yy, xx});
            stack.push_back({yy, xx});
          }
        }
      }
    }
    if (static_cast<int>(comp.size()) >= min_cells) {
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const std::vector<CellIndex>& a, const std::vector<CellIndex>& b) {
              return a.front() < b.front();
            });
  return out;
}

std::optional<double> ucs_path_length(const OccupancyGrid& grid, Vec2 from, Vec2 to,
                                      double robot_radius_m, bool allow_unknown) {
  const int w = grid.cells_x();
  const int h = grid.cells_y();
  const double cell = grid.cell_size_m();

  // brute inflation: cell blocked when any occupied square is within radius
  std::vector<std::uint8_t> blocked(grid.size(), 0);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      if (grid.at({ix, iy}) == Knowledge::Occupied) {
        blocked[grid.idx({ix, iy})] = 1;
        continue;
      }
      const Vec2 center = grid.center_of({ix, iy});
      bool near = false;
      for (int oy = 0; oy < h && !near; ++oy) {
        for (int ox = 0; ox < w; ++ox) {
          if (grid.at({ox, oy}) != Knowledge::Occupied) continue;
          if (point_to_cell_distance(center, grid.center_of({ox, oy}), cell) <
              robot_radius_m) {
            near = true;
            break;
          }
        }
      }
      blocked[grid.idx({ix, iy})] = near ? 1 : 0;
    }
  }

  const CellIndex start = grid.cell_at(from);
  const CellIndex goal = grid.cell_at(to);
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) return std::nullopt;
  const int start_node = static_cast<int>(grid.idx(start));
  const int goal_node = static_cast<int>(grid.idx(goal));

  auto passable = [&](int node) {
    const CellIndex c{node % w, node / w};
    if (node == start_node) return grid.at(c) != Knowledge::Occupied;
    if (blocked[node]) return false;
    const Knowledge k = grid.at(c);
    return k == Knowledge::Free || (allow_unknown && k == Knowledge::Unknown);
  };
  if (!passable(start_node)) return std::nullopt;
  if (goal_node != start_node && !passable(goal_node)) return std::nullopt;
  if (start_node == goal_node) return 0.0;

  // Dijkstra in integer half-step units: axis move 2, diagonal move 3 would
  // break optimality, so use exact step counts (axis, diagonal) as the cost.
  struct Node {
    int axis;
    int diag;
    int id;
  };
  auto cost_less = [](const Node& a, const Node& b) {
    const double ca = a.axis + kSqrt2 * a.diag;
    const double cb = b.axis + kSqrt2 * b.diag;
    if (ca != cb) return ca > cb;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cost_less)> open(cost_less);
  std::vector<double> best(grid.size(), std::numeric_limits<double>::infinity());
  std::vector<std::pair<int, int>> steps(grid.size(), {0, 0});

  open.push({0, 0, start_node});
  best[start_node] = 0.0;
  while (!open.empty()) {
    const Node n = open.top();
    open.pop();
    const double nc = n.axis + kSqrt2 * n.diag;
    if (nc > best[n.id] + 1e-12) continue;
    if (n.id == goal_node) return (n.axis + kSqrt2 * n.diag) * cell;
    const CellIndex c{n.id % w, n.id / w};
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb{c.x + dx, c.y + dy};
        if (nb.x < 0 || nb.x >= w || nb.y < 0 || nb.y >= h) continue;
        const int nb_node = static_cast<int>(grid.idx(nb));
        if (!passable(nb_node)) continue;
        if (dx != 0 && dy != 0) {
          const int side_a = static_cast<int>(grid.idx({c.x + dx, c.y}));
          const int side_b = static_cast<int>(grid.idx({c.x, c.y + dy}));
          if (!passable(side_a) || !passable(side_b)) continue;
        }
        const bool diag = dx != 0 && dy != 0;
        const int na = n.axis + (diag ? 0 : 1);
        const int nd = n.diag + (diag ? 1 : 0);
        const double cand = na + kSqrt2 * nd;
        if (cand + 1e-12 < best[nb_node]) {
          best[nb_node] = cand;
          steps[nb_node] = {na, nd};
          open.push({na, nd, nb_node});
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

struct OracleContext {
  const SubareaGrid& sg;
  const OccupancyGrid& merged;
  const OrosParams& params;
  double sigma;
  std::vector<std::optional<Vec2>> anchors;
  std::vector<std::vector<int>> adj;
};

OracleContext build_oracle_context(const SubareaGrid& sg,
                                   const std::vector<RobotState>& robots,
                                   const OccupancyGrid& merged,
                                   const OrosParams& params) {
  OracleContext ctx{sg, merged, params, params.sigma, {}, {}};
  if (ctx.sigma < 0.0) {
    ctx.sigma = 1.0 / (static_cast<double>(robots.size()) *
                       robots.front().battery.capacity_j);
  }

  std::vector<std::uint8_t> blocked = inflate_occupied(merged, params.robot_radius_m);
  auto usable = [&](CellIndex c) {
    return merged.in_bounds(c) && merged.at(c) != Knowledge::Occupied &&
           !blocked[merged.idx(c)];
  };

  ctx.anchors.assign(sg.count(), std::nullopt);
  for (int s = 0; s < sg.count(); ++s) {
    const CellRect rect = sg.cell_rect_of(s);
    double best = std::numeric_limits<double>::infinity();
    for (int iy = rect.y0; iy < rect.y1; ++iy) {
      for (int ix = rect.x0; ix < rect.x1; ++ix) {
        if (!usable({ix, iy})) continue;
        const Vec2 p = merged.center_of({ix, iy});
        const double d =
            std::hypot(p.x - sg.centroids[s].x, p.y - sg.centroids[s].y);
        if (d < best) {
          best = d;
          ctx.anchors[s] = p;
        }
      }
    }
  }

  auto doorway = [&](CellIndex a, CellIndex b) {
    return usable(a) && usable(b) &&
           (merged.at(a) == Knowledge::Free || merged.at(b) == Knowledge::Free);
  };
  ctx.adj.assign(sg.count(), {});
  for (int a = 0; a < sg.rows_a; ++a) {
    for (int b = 0; b < sg.cols_b; ++b) {
      const int s = sg.index(a, b);
      const CellRect rect = sg.cell_rect_of(s);
      if (b + 1 < sg.cols_b) {
        for (int iy = rect.y0; iy < rect.y1; ++iy) {
          if (doorway({rect.x1 - 1, iy}, {rect.x1, iy})) {
            ctx.adj[s].push_back(sg.index(a, b + 1));
            ctx.adj[sg.index(a, b + 1)].push_back(s);
            break;
          }
        }
      }
      if (a + 1 < sg.rows_a) {
        for (int ix = rect.x0; ix < rect.x1; ++ix) {
          if (doorway({ix, rect.y1 - 1}, {ix, rect.y1})) {
            ctx.adj[s].push_back(sg.index(a + 1, b));
            ctx.adj[sg.index(a + 1, b)].push_back(s);
            break;
          }
        }
      }
    }
  }
  for (auto& v : ctx.adj) std::sort(v.begin(), v.end());
  return ctx;
}

double oracle_objective(const OracleContext& ctx,
                        const std::vector<RobotState>& robots,
                        const std::vector<std::vector<int>>& routes) {
  std::set<int> claimed;
  double exploration = 0.0;
  double battery = 0.0;
  for (std::size_t r = 0; r < robots.size(); ++r) {
    double predicted = robots[r].scheduled_charge_j;
    if (!routes[r].empty()) {
      for (std::size_t k = 0; k < routes[r].size(); ++k) {
        const int sub = routes[r][k];
        if (ctx.sg.explored[sub] || claimed.count(sub)) continue;
        if (static_cast<int>(k) > ctx.params.horizon_subareas) continue;
        claimed.insert(sub);
        exploration +=
            (k + 1 == routes[r].size()) ? 1.0 : ctx.params.transit_credit;
      }
      Vec2 at = robots[r].pose;
      for (std::size_t k = 1; k < routes[r].size(); ++k) {
        const Vec2 next = *ctx.anchors[routes[r][k]];
        const double leg = std::hypot(next.x - at.x, next.y - at.y);
        const bool sensing = !ctx.sg.explored[routes[r][k]];
        if (leg > 0.0) {
          const double t = leg / ctx.params.v_max;
          predicted -= (ctx.params.power.idle_w +
                        ctx.params.power.locomotion_w_per_mps * ctx.params.v_max +
                        (sensing ? ctx.params.power.sensing_w : 0.0)) *
                       t;
        }
        at = next;
      }
    }
    battery += predicted;
  }
  return exploration + ctx.sigma * battery;
}

void all_minimal_routes(const OracleContext& ctx, int from, int to,
                        std::vector<std::vector<int>>& out) {
  const int n = static_cast<int>(ctx.adj.size());
  std::vector<int> hops(n, -1);
  std::vector<int> bfs{from};
  hops[from] = 0;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    for (int nb : ctx.adj[bfs[i]]) {
      if (hops[nb] < 0) {
        hops[nb] = hops[bfs[i]] + 1;
        bfs.push_back(nb);
      }
    }
  }
  if (hops[to] < 0) return;
  std::vector<int> cur{from};
  std::function<void(int)> walk = [&](int s) {
    if (s == to) {
      out.push_back(cur);
      return;
    }
    for (int nb : ctx.adj[s]) {
      if (hops[nb] == hops[s] + 1) {
        cur.push_back(nb);
        walk(nb);
        cur.pop_back();
      }
    }
  };
  walk(from);
}

}  // namespace

double enumerate_best_objective(const SubareaGrid& sg,
                                const std::vector<RobotState>& robots,
                                const OccupancyGrid& merged,
                                const OrosParams& params) {
  OracleContext ctx = build_oracle_context(sg, robots, merged, params);

  std::vector<int> unexplored;
  for (int i = 0; i < sg.count(); ++i) {
    if (!sg.explored[i]) unexplored.push_back(i);
  }

  const std::size_t nr = robots.size();
  std::vector<std::vector<std::vector<std::vector<int>>>> routes(
      nr, std::vector<std::vector<std::vector<int>>>(unexplored.size()));
  for (std::size_t r = 0; r < nr; ++r) {
    const int from = sg.subarea_of_point(robots[r].pose);
    for (std::size_t u = 0; u < unexplored.size(); ++u) {
      if (from < 0 || !ctx.anchors[unexplored[u]]) continue;
      std::vector<std::vector<int>> rts;
      all_minimal_routes(ctx, from, unexplored[u], rts);
      routes[r][u] = std::move(rts);
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> chosen(nr);
  std::vector<std::uint8_t> taken(unexplored.size(), 0);

  std::function<void(std::size_t)> rec = [&](std::size_t r) {
    if (r == nr) {
      best = std::max(best, oracle_objective(ctx, robots, chosen));
      return;
    }
    for (std::size_t u = 0; u < unexplored.size(); ++u) {
      if (taken[u] || routes[r][u].empty()) continue;
      taken[u] = 1;
      for (const auto& rt : routes[r][u]) {
        chosen[r] = rt;
        rec(r + 1);
      }
      taken[u] = 0;
    }
    chosen[r].clear();
    rec(r + 1);
  };
  rec(0);
  return best;
}

double plan_objective_oracle(const SubareaGrid& sg,
                             const std::vector<RobotState>& robots,
                             const OccupancyGrid& merged, const OrosParams& params,
                             const HighLevelPlan& plan) {
  OracleContext ctx = build_oracle_context(sg, robots, merged, params);
  std::vector<std::vector<int>> routes(robots.size());
  for (const RobotDirective& d : plan.directives) {
    for (std::size_t r = 0; r < robots.size(); ++r) {
      if (robots[r].id == d.robot_id) routes[r] = d.route;
    }
  }
  return oracle_objective(ctx, robots, routes);
}

OccupancyGrid random_known_grid(int cells_x, int cells_y, double occupied_density,
                                double unknown_density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  OccupancyGrid g(cells_x, cells_y, 0.25);
  for (int iy = 0; iy < cells_y; ++iy) {
    for (int ix = 0; ix < cells_x; ++ix) {
      const double u = uni(rng);
      if (u < occupied_density) {
        g.set({ix, iy}, Knowledge::Occupied);
      } else if (u < occupied_density + unknown_density) {
        // stays Unknown
      } else {
        g.set({ix, iy}, Knowledge::Free);
      }
    }
  }
  return g;
}

WorldMap random_world(int cells_x, int cells_y, double occupied_density,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  WorldMap map;
  map.cell_size_m = 0.25;
  map.cells_x = cells_x;
  map.cells_y = cells_y;
  map.width_m = cells_x * map.cell_size_m;
  map.height_m = cells_y * map.cell_size_m;
  map.cells.assign(static_cast<std::size_t>(cells_x) * cells_y, CellState::Free);
  for (int iy = 0; iy < cells_y; ++iy) {
    for (int ix = 0; ix < cells_x; ++ix) {
      const bool border =
          ix == 0 || iy == 0 || ix == cells_x - 1 || iy == cells_y - 1;
      if (border || uni(rng) < occupied_density) {
        map.cells[map.idx({ix, iy})] = CellState::Occupied;
      }
    }
  }
  // spawn at the first free cell
  for (int iy = 0; iy < cells_y && map.spawn_points.empty(); ++iy) {
    for (int ix = 0; ix < cells_x; ++ix) {
      if (map.at({ix, iy}) == CellState::Free) {
        map.spawn_points.push_back(map.center_of({ix, iy}));
        break;
      }
    }
  }
  return map;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> results;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  // raycast vs step-march, 1000 random rays
  {
    int failures = 0;
    int tested = 0;
    for (int m = 0; m < 10; ++m) {
      const WorldMap world = random_world(80, 80, 0.12, seed * 100 + m);
      std::vector<CellIndex> free_cells;
      for (int iy = 0; iy < world.cells_y; ++iy) {
        for (int ix = 0; ix < world.cells_x; ++ix) {
          if (world.at({ix, iy}) == CellState::Free) free_cells.push_back({ix, iy});
        }
      }
      if (free_cells.empty()) continue;
      for (int k = 0; k < 100; ++k) {
        const CellIndex c =
            free_cells[static_cast<std::size_t>(uni(rng) * free_cells.size())];
        const Vec2 origin = world.center_of(c);
        const double angle = uni(rng) * 2.0 * M_PI;
        const RayResult fast = raycast(world, origin, angle, 8.0);
        const double slow =
            raymarch_distance(world, origin, angle, 8.0, world.cell_size_m / 10.0);
        ++tested;
        if (std::abs(fast.distance_m - slow) > world.cell_size_m) ++failures;
      }
    }
    results.push_back({"raycast_vs_step_march",
                       failures == 0 && tested >= 1000,
                       std::to_string(failures) + " of " + std::to_string(tested) +
                           " rays off by more than one cell"});
  }

  // merge vs per-cell max, 100 random grid pairs
  {
    int failures = 0;
    for (int k = 0; k < 100; ++k) {
      const OccupancyGrid a = random_known_grid(24, 24, 0.2, 0.3, seed * 7 + k);
      const OccupancyGrid b = random_known_grid(24, 24, 0.2, 0.3, seed * 11 + k);
      if (!(merge(a, b) == merge_by_max({&a, &b}))) ++failures;
    }
    results.push_back({"merge_vs_per_cell_max", failures == 0,
                       std::to_string(failures) + " of 100 merges differ"});
  }

  // find_unknown_regions vs flood-fill oracle, 50 states
  {
    int failures = 0;
    for (int k = 0; k < 50; ++k) {
      const OccupancyGrid g = random_known_grid(32, 32, 0.15, 0.35, seed * 13 + k);
      const CellRect rect{4, 4, 28, 28};
      const auto regions = find_unknown_regions(g, rect, 4);
      const auto oracle = regions_by_floodfill(g, rect, 4);
      bool same = regions.size() == oracle.size();
      for (std::size_t i = 0; same && i < regions.size(); ++i) {
        same = regions[i].cells == oracle[i];
      }
      if (!same) ++failures;
    }
    results.push_back({"regions_vs_flood_fill", failures == 0,
                       std::to_string(failures) + " of 50 states differ"});
  }

  // plan_path length vs uniform-cost-search oracle, 200 random 20x20 maps
  {
    int failures = 0;
    int compared = 0;
    for (int k = 0; k < 200; ++k) {
      OccupancyGrid g = random_known_grid(20, 20, 0.30, 0.0, seed * 17 + k);
      const Vec2 from = g.center_of({1, 1});
      const Vec2 to = g.center_of({18, 18});
      const double radius = 0.0;
      const auto fast = plan_path(g, from, to, radius, false);
      const auto slow = ucs_path_length(g, from, to, radius, false);
      if (fast.has_value() != slow.has_value()) {
        ++failures;
        continue;
      }
      if (fast) {
        ++compared;
        if (fast->length_m != *slow) ++failures;
      }
    }
    results.push_back({"plan_path_vs_ucs", failures == 0,
                       std::to_string(failures) + " of 200 maps differ (" +
                           std::to_string(compared) + " comparable)"});
  }

  // solve_oros exhaustive vs full enumeration on small instances
  {
    int failures = 0;
    int instances = 0;
    for (int rows : {1, 2}) {
      for (int cols : {2, 2, 3}) {
        if (rows * cols > 5) continue;
        for (int nrobots = 1; nrobots <= 3; ++nrobots) {
          for (int variant = 0; variant < 3; ++variant) {
            WorldMap world;
            world.cell_size_m = 0.25;
            world.cells_x = cols * 8;
            world.cells_y = rows * 8;
            world.width_m = world.cells_x * 0.25;
            world.height_m = world.cells_y * 0.25;
            world.cells.assign(
                static_cast<std::size_t>(world.cells_x) * world.cells_y,
                CellState::Free);
            world.spawn_points.push_back(world.center_of({1, 1}));

            OccupancyGrid merged = OccupancyGrid::unknown_like(world);
            for (int iy = 0; iy < world.cells_y; ++iy) {
              for (int ix = 0; ix < world.cells_x; ++ix) {
                merged.set({ix, iy}, Knowledge::Free);
              }
            }
            Observability obs = compute_observability(world);
            SubareaGrid sg = build_subarea_grid(world, 2.0, obs);
            // explore a deterministic prefix of subareas
            const int pre = variant % sg.count();
            for (int s = 0; s < pre; ++s) sg.explored[s] = 1;
            if (sg.all_explored()) continue;

            OrosParams params;
            params.v_max = 1.0;
            params.robot_radius_m = 0.0;
            std::vector<RobotState> robots;
            for (int r = 0; r < nrobots; ++r) {
              RobotState rs;
              rs.id = r;
              rs.pose = world.center_of({1 + 2 * r, 1});
              rs.battery = {8245.96, 8245.96 - 500.0 * r};
              rs.scheduled_charge_j = rs.battery.charge_j;
              robots.push_back(rs);
            }

            const HighLevelPlan plan = solve_oros(sg, robots, merged, params);
            const double best =
                enumerate_best_objective(sg, robots, merged, params);
            const double got =
                plan_objective_oracle(sg, robots, merged, params, plan);
            ++instances;
            if (plan.solver_mode != "exhaustive" || got + 1e-9 < best) ++failures;
          }
        }
      }
    }
    results.push_back({"solve_oros_vs_enumeration", failures == 0,
                       std::to_string(failures) + " of " +
                           std::to_string(instances) + " instances suboptimal"});
  }

  // allocate vs permutation enumeration on 3x3 instances
  {
    int failures = 0;
    for (int k = 0; k < 10; ++k) {
      OccupancyGrid g(40, 40, 0.25);
      for (int iy = 0; iy < 40; ++iy) {
        for (int ix = 0; ix < 40; ++ix) g.set({ix, iy}, Knowledge::Free);
      }
      std::vector<LocalTarget> targets;
      std::vector<RobotState> robots;
      std::vector<const RobotState*> robot_ptrs;
      for (int i = 0; i < 3; ++i) {
        const CellIndex tc{5 + static_cast<int>(uni(rng) * 30),
                           5 + static_cast<int>(uni(rng) * 30)};
        UnknownRegion region;
        region.cells = {tc};
        region.centroid = g.center_of(tc);
        region.size_cells = 1;
        g.set(tc, Knowledge::Unknown);
        LocalTarget t;
        t.id = i;
        t.region = region;
        t.discovered_tick = i;
        targets.push_back(t);

        RobotState r;
        r.id = i;
        r.pose = g.center_of({5 + static_cast<int>(uni(rng) * 30),
                              5 + static_cast<int>(uni(rng) * 30)});
        r.battery = {8245.96, 8245.96 * (0.5 + 0.5 * uni(rng))};
        r.scheduled_charge_j = r.battery.charge_j;
        robots.push_back(r);
      }
      for (const RobotState& r : robots) robot_ptrs.push_back(&r);

      OrchestratorParams params;
      params.nav.robot_radius_m = 0.0;
      const double lambda = 5.0;
      const auto result =
          Orchestrator::allocate(targets, robot_ptrs, g, params, lambda);
      if (result.assignments.size() != 3) {
        ++failures;
        continue;
      }
      double greedy_total = 0.0;
      for (const auto& a : result.assignments) {
        const auto len = ucs_path_length(
            g, robots[a.robot_id].pose, targets[a.target_id].region.centroid, 0.0,
            true);
        if (!len) {
          greedy_total = std::numeric_limits<double>::infinity();
          break;
        }
        greedy_total +=
            *len - lambda * (robots[a.robot_id].scheduled_charge_j /
                             robots[a.robot_id].battery.capacity_j);
      }
      // all 6 permutations
      std::vector<int> perm{0, 1, 2};
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      do {
        double total = 0.0;
        for (int r = 0; r < 3; ++r) {
          const auto len =
              ucs_path_length(g, robots[r].pose,
                              targets[perm[r]].region.centroid, 0.0, true);
          total += *len - lambda * (robots[r].scheduled_charge_j /
                                    robots[r].battery.capacity_j);
        }
        lo = std::min(lo, total);
        hi = std::max(hi, total);
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (greedy_total < lo - 1e-9 || greedy_total > hi + 1e-9) ++failures;
    }
    results.push_back({"allocate_vs_permutations", failures == 0,
                       std::to_string(failures) + " of 10 instances outside the "
                                                  "permutation score range"});
  }

  return results;
}

}  // namespace reactsim::check
