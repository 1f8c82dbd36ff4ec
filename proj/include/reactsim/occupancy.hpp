#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reactsim/geometry.hpp"
#include "reactsim/world_map.hpp"

namespace reactsim {

struct SubareaGrid;  // subarea.hpp

enum class Knowledge : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };
enum class Priority : std::uint8_t { Low = 0, High = 1 };

// Tri-state exploration knowledge over the same raster as the WorldMap.
// Cells only ever transition Unknown -> Free/Occupied; with the perfect-sensor
// model no Free/Occupied conflict is possible.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int cells_x, int cells_y, double cell_size_m)
      : cells_x_(cells_x),
        cells_y_(cells_y),
        cell_size_m_(cell_size_m),
        cells_(static_cast<std::size_t>(cells_x) * cells_y, Knowledge::Unknown) {}

  static OccupancyGrid unknown_like(const WorldMap& map) {
    return OccupancyGrid(map.cells_x, map.cells_y, map.cell_size_m);
  }

  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  double cell_size_m() const { return cell_size_m_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t idx(CellIndex c) const {
    return static_cast<std::size_t>(c.y) * cells_x_ + c.x;
  }
  bool in_bounds(CellIndex c) const {
    return c.x >= 0 && c.x < cells_x_ && c.y >= 0 && c.y < cells_y_;
  }
  Knowledge at(CellIndex c) const { return cells_[idx(c)]; }
  Knowledge at_flat(std::size_t i) const { return cells_[i]; }

  // Known cells never revert to Unknown (static world).
  void set(CellIndex c, Knowledge k) {
    Knowledge& cur = cells_[idx(c)];
    if (cur == k) return;
    if (cur != Knowledge::Unknown && k == Knowledge::Unknown) return;
    if (cur == Knowledge::Unknown) ++known_count_;
    if (cur == Knowledge::Free) --known_free_count_;
    if (k == Knowledge::Free) ++known_free_count_;
    cur = k;
    ++version_;
  }

  std::size_t known_count() const { return known_count_; }
  std::size_t known_free_count() const { return known_free_count_; }
  std::uint64_t version() const { return version_; }

  CellIndex cell_at(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_m_)),
            static_cast<int>(std::floor(p.y / cell_size_m_))};
  }
  Vec2 center_of(CellIndex c) const {
    return {(c.x + 0.5) * cell_size_m_, (c.y + 0.5) * cell_size_m_};
  }
  bool same_geometry(const OccupancyGrid& o) const {
    return cells_x_ == o.cells_x_ && cells_y_ == o.cells_y_ &&
           cell_size_m_ == o.cell_size_m_;
  }
  bool operator==(const OccupancyGrid& o) const {
    return same_geometry(o) && cells_ == o.cells_;
  }

  // Same ASCII scheme as the map format with '?' for Unknown.
  std::string dump_ascii() const;

 private:
  int cells_x_ = 0;
  int cells_y_ = 0;
  double cell_size_m_ = 0.25;
  std::vector<Knowledge> cells_;
  std::size_t known_count_ = 0;
  std::size_t known_free_count_ = 0;
  std::uint64_t version_ = 0;
};

// Marks every cell a ray traverses before its hit point Free and the hit cell
// Occupied. Re-walks the same grid traversal the scan was produced with, so
// the painted cells match ground truth exactly.
void integrate_scan(OccupancyGrid& grid, const LidarScan& scan);

// Cell-wise: Occupied if any grid says Occupied, else Free if any says Free,
// else Unknown. Throws std::invalid_argument on geometry mismatch.
OccupancyGrid merge(const OccupancyGrid& a, const OccupancyGrid& b);
OccupancyGrid merge(const std::vector<const OccupancyGrid*>& grids);

struct UnknownRegion {
  std::vector<CellIndex> cells;  // sorted by (y, x)
  Vec2 centroid;
  int size_cells = 0;
  bool accessible = false;
  Priority priority = Priority::Low;
};

// Maximal 4-connected components of Unknown cells intersected with the
// subarea rectangle; components smaller than min_region_cells are dropped.
// Regions are ordered by their smallest cell index, so output is deterministic.
std::vector<UnknownRegion> find_unknown_regions(const OccupancyGrid& grid,
                                                CellRect subarea,
                                                int min_region_cells);

// 1 = cell a robot of the given radius cannot occupy: known-Occupied, or its
// center closer than robot_radius_m to a known-Occupied cell's square.
std::vector<std::uint8_t> inflate_occupied(const OccupancyGrid& grid,
                                           double robot_radius_m);

// True iff a path of known-Free cells (8-connected, after inflation) leads
// from `from` to some free cell adjacent to the region.
bool is_accessible(const OccupancyGrid& grid, Vec2 from, const UnknownRegion& region,
                   double robot_radius_m);
bool is_accessible_masked(const OccupancyGrid& grid,
                          const std::vector<std::uint8_t>& blocked, Vec2 from,
                          const UnknownRegion& region);

// High when the region is large enough or touches the border of a subarea that
// is still unexplored (it may open access to paths not yet planned).
Priority classify_priority(const UnknownRegion& region, const OccupancyGrid& grid,
                           const SubareaGrid& subareas, int size_threshold_cells);

}  // namespace reactsim
