#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reactsim/energy.hpp"
#include "reactsim/nav.hpp"
#include "reactsim/occupancy.hpp"
#include "reactsim/subarea.hpp"

namespace reactsim {

struct OrosParams {
  double sigma = -1.0;  // < 0: auto, 1 / (robot count * battery capacity)
  double delta = 0.95;
  double v_max = 1.0;
  double robot_radius_m = 0.2;
  PowerProfile power;
  // exploration credit of an unexplored subarea merely transited by a route,
  // relative to the full credit of a targeted one. Zero by default: transit
  // scans paint only a thin stripe, and any positive credit biases the
  // receding solver toward needlessly long routes.
  double transit_credit = 0.0;
  int max_routes_per_pair = 64;
  long max_plan_combinations = 200000;
  int horizon_subareas = 32;  // route legs beyond this earn no exploration credit
};

// One robot's marching orders: a chain of subareas ending at the target, with
// a sensing flag per leg. Legs between already-explored subareas run dark.
struct RobotDirective {
  int robot_id = -1;
  std::vector<int> route;                    // subarea ids, route[0] = current
  std::vector<std::uint8_t> leg_sensing_on;  // size route.size() - 1
  double commanded_speed_mps = 1.0;

  int target_subarea() const { return route.empty() ? -1 : route.back(); }
};

struct HighLevelPlan {
  std::vector<RobotDirective> directives;
  double objective = 0.0;
  std::string solver_mode;  // "exhaustive" | "greedy"
  std::vector<int> unreachable_subareas;

  bool empty() const { return directives.empty(); }
};

// Traversable cell of the subarea nearest its centroid, used as the waypoint
// the fleet navigates to. Empty when every cell of the subarea is known
// blocked.
std::optional<CellIndex> subarea_anchor(const SubareaGrid& sg,
                                        const OccupancyGrid& merged,
                                        const std::vector<std::uint8_t>& blocked,
                                        int subarea);

// Pairs of 4-adjacent subareas with a traversable doorway across their shared
// border (unknown cells count as traversable until proven otherwise).
std::vector<std::pair<int, int>> coarse_edges(const SubareaGrid& sg,
                                              const OccupancyGrid& merged,
                                              const std::vector<std::uint8_t>& blocked);

// Receding-horizon assignment of robots to unexplored subareas maximizing
// expected newly-explored subareas plus sigma * predicted terminal battery sum.
// Exhaustive over injective assignments and minimal-hop route choices at desk
// scale, greedy nearest-first beyond; the mode is recorded in the plan.
HighLevelPlan solve_oros(const SubareaGrid& sg, const std::vector<RobotState>& robots,
                         const OccupancyGrid& merged, const OrosParams& params);

}  // namespace reactsim
