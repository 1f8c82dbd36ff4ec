#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reactsim/geometry.hpp"

namespace reactsim {

enum class CellState : std::uint8_t { Free = 0, Occupied = 1 };

class MapParseError : public std::runtime_error {
 public:
  MapParseError(const std::string& msg, int line, int column)
      : std::runtime_error("map parse error at line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Ground-truth environment. Immutable after load; the boundary ring is always
// Occupied, so rays terminate inside the map.
struct WorldMap {
  double width_m = 0.0;
  double height_m = 0.0;
  double cell_size_m = 0.25;
  int cells_x = 0;
  int cells_y = 0;
  std::vector<CellState> cells;    // row-major, index = iy * cells_x + ix
  std::vector<Vec2> spawn_points;  // cell centers, in file order (top row first)

  std::size_t idx(CellIndex c) const {
    return static_cast<std::size_t>(c.y) * cells_x + c.x;
  }
  bool in_bounds(CellIndex c) const {
    return c.x >= 0 && c.x < cells_x && c.y >= 0 && c.y < cells_y;
  }
  CellState at(CellIndex c) const { return cells[idx(c)]; }
  // Out-of-bounds counts as occupied.
  bool occupied(CellIndex c) const {
    return !in_bounds(c) || at(c) == CellState::Occupied;
  }
  CellIndex cell_at(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_m)),
            static_cast<int>(std::floor(p.y / cell_size_m))};
  }
  Vec2 center_of(CellIndex c) const {
    return {(c.x + 0.5) * cell_size_m, (c.y + 0.5) * cell_size_m};
  }
  int free_cell_count() const;
};

// ASCII map format: header "W H CELL" (meters), then H/CELL rows of W/CELL
// glyphs, top row = max y. Glyphs: '#' occupied, '.' free, 'S' free + spawn.
WorldMap load_map(std::string_view source);
WorldMap load_map_file(const std::string& path);
std::string serialize_map(const WorldMap& map);

struct RayResult {
  double distance_m = 0.0;
  bool hit_obstacle = false;
  CellIndex hit_cell;  // valid when hit_obstacle
};

struct LidarRay {
  double angle_rad = 0.0;
  double hit_distance_m = 0.0;
  bool hit_is_obstacle = false;
  CellIndex hit_cell;  // endpoint bin, valid when hit_is_obstacle
};

struct LidarScan {
  Vec2 origin;
  double max_range_m = 8.0;
  std::vector<LidarRay> rays;
};

// Distance to the first occupied cell boundary along the ray, clamped to
// max_range_m. Throws std::logic_error when the origin cell is occupied.
RayResult raycast(const WorldMap& map, Vec2 origin, double angle_rad, double max_range_m);

// n_rays evenly spaced rays at angles 2*pi*k/n_rays.
LidarScan scan(const WorldMap& map, Vec2 origin, int n_rays, double max_range_m);

// Ground-truth observability, used as the denominator of coverage metrics:
// free cells reachable from a spawn point (8-connected) plus the occupied
// cells forming their wall surface. Cells inside solid walls or in sealed
// rooms can never be observed and are excluded.
struct Observability {
  std::vector<std::uint8_t> reachable_free;
  std::vector<std::uint8_t> observable;
  int reachable_free_count = 0;
  int observable_count = 0;
};

Observability compute_observability(const WorldMap& map);

// A blind-spot pocket is a free-space component that connects to the rest of
// the floor only through passages narrow enough to vanish under a morphological
// erosion of erosion_cells (Chebyshev radius). The largest surviving component
// is the main floor; the others are pockets.
struct PocketOptions {
  int erosion_cells = 2;
  int min_eroded_cells = 1;
};

std::vector<std::vector<CellIndex>> find_blind_pockets(const WorldMap& map,
                                                       PocketOptions opts = {});
int count_blind_pockets(const WorldMap& map, PocketOptions opts = {});

}  // namespace reactsim
