#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reactsim/nav.hpp"
#include "reactsim/occupancy.hpp"
#include "reactsim/oros.hpp"
#include "reactsim/world_map.hpp"

// Independent reference implementations used to cross-check the fast paths.
// Everything here is deliberately written with different algorithms than the
// production code it validates: stepping instead of grid-line crossing,
// per-cell max instead of incremental merge, scanline fill instead of BFS,
// Dijkstra without heuristic instead of A*, brute-force enumeration instead
// of greedy matching. The `selftest` CLI subcommand and the test suites both
// run against these.
namespace reactsim::check {

// Fine step-march along the ray; first sample inside an occupied cell wins.
double raymarch_distance(const WorldMap& map, Vec2 origin, double angle_rad,
                         double max_range_m, double step_m);

// Cell-wise max under Unknown < Free < Occupied.
OccupancyGrid merge_by_max(const std::vector<const OccupancyGrid*>& grids);

// Scanline flood fill of Unknown cells inside the rectangle; returns sorted
// cell sets of components with at least min_cells cells, ordered by first cell.
std::vector<std::vector<CellIndex>> regions_by_floodfill(const OccupancyGrid& grid,
                                                         CellRect rect,
                                                         int min_cells);

// Uniform-cost search with its own brute-force inflation; same traversability
// contract as the planner. Returns the canonical path length.
std::optional<double> ucs_path_length(const OccupancyGrid& grid, Vec2 from, Vec2 to,
                                      double robot_radius_m, bool allow_unknown);

// Best objective over every injective robot->subarea assignment and every
// minimal-hop route choice, recomputed from scratch.
double enumerate_best_objective(const SubareaGrid& sg,
                                const std::vector<RobotState>& robots,
                                const OccupancyGrid& merged, const OrosParams& params);

// Objective of a specific plan, recomputed with the oracle's arithmetic.
double plan_objective_oracle(const SubareaGrid& sg,
                             const std::vector<RobotState>& robots,
                             const OccupancyGrid& merged, const OrosParams& params,
                             const HighLevelPlan& plan);

// --- deterministic random fixtures --------------------------------------

OccupancyGrid random_known_grid(int cells_x, int cells_y, double occupied_density,
                                double unknown_density, std::uint64_t seed);

WorldMap random_world(int cells_x, int cells_y, double occupied_density,
                      std::uint64_t seed);

// --- packaged suites ------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_selftest(std::uint64_t seed);

}  // namespace reactsim::check
