#pragma once

#include <cstdint>
#include <vector>

#include "reactsim/geometry.hpp"
#include "reactsim/occupancy.hpp"
#include "reactsim/world_map.hpp"

namespace reactsim {

// Coarse A x B grid of subareas the high-level planner works on. Subarea
// (a, b) spans y in [a*size, (a+1)*size), x in [b*size, (b+1)*size), clipped
// to the map. explored flags are monotone; explored_by_exception marks
// subareas written off as unreachable, with their coverage frozen.
struct SubareaGrid {
  int rows_a = 0;
  int cols_b = 0;
  double subarea_size_m = 10.0;
  double cell_size_m = 0.25;
  int map_cells_x = 0;
  int map_cells_y = 0;

  std::vector<std::uint8_t> explored;
  std::vector<std::uint8_t> explored_by_exception;
  std::vector<double> coverage;
  std::vector<Vec2> centroids;
  std::vector<int> observable_cells;  // per-subarea coverage denominator

  int count() const { return rows_a * cols_b; }
  int index(int a, int b) const { return a * cols_b + b; }
  int row_of(int sub) const { return sub / cols_b; }
  int col_of(int sub) const { return sub % cols_b; }

  CellRect cell_rect_of(int sub) const {
    const int a = row_of(sub), b = col_of(sub);
    const int cells_per = static_cast<int>(std::round(subarea_size_m / cell_size_m));
    CellRect r;
    r.x0 = b * cells_per;
    r.y0 = a * cells_per;
    r.x1 = std::min((b + 1) * cells_per, map_cells_x);
    r.y1 = std::min((a + 1) * cells_per, map_cells_y);
    return r;
  }

  int subarea_of_cell(CellIndex c) const {
    if (c.x < 0 || c.y < 0 || c.x >= map_cells_x || c.y >= map_cells_y) return -1;
    const int cells_per = static_cast<int>(std::round(subarea_size_m / cell_size_m));
    return index(c.y / cells_per, c.x / cells_per);
  }

  int subarea_of_point(Vec2 p) const {
    return subarea_of_cell({static_cast<int>(std::floor(p.x / cell_size_m)),
                            static_cast<int>(std::floor(p.y / cell_size_m))});
  }

  bool all_explored() const {
    for (std::uint8_t e : explored) {
      if (!e) return false;
    }
    return true;
  }
};

// A = ceil(height/size), B = ceil(width/size); all flags false, coverage 0.
// Subareas without any observable cell start explored (nothing to do there).
SubareaGrid build_subarea_grid(const WorldMap& map, double subarea_size_m,
                               const Observability& obs);

// coverage[a][b] = known observable cells / observable cells in the subarea;
// sets the explored flag at coverage >= delta. Coverage of exception-marked
// subareas stays frozen. Returns the number of newly set flags.
//
// When delta_eligible is given, only flagged-eligible subareas use the delta
// threshold (the ones some robot actually swept); the rest flag only once
// every observable cell is known, so merely being grazed by a passing scan
// does not retire a subarea.
int update_coverage(SubareaGrid& sg, const OccupancyGrid& merged,
                    const Observability& obs, double delta,
                    const std::vector<std::uint8_t>* delta_eligible = nullptr);

}  // namespace reactsim
