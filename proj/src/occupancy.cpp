#include "reactsim/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "reactsim/subarea.hpp"

namespace reactsim {

std::string OccupancyGrid::dump_ascii() const {
  std::ostringstream out;
  out << cells_x_ * cell_size_m_ << ' ' << cells_y_ * cell_size_m_ << ' '
      << cell_size_m_ << '\n';
  for (int row = 0; row < cells_y_; ++row) {
    const int iy = cells_y_ - 1 - row;
    for (int ix = 0; ix < cells_x_; ++ix) {
      switch (at({ix, iy})) {
        case Knowledge::Unknown: out << '?'; break;
        case Knowledge::Free: out << '.'; break;
        case Knowledge::Occupied: out << '#'; break;
      }
    }
    out << '\n';
  }
  return out.str();
}

void integrate_scan(OccupancyGrid& grid, const LidarScan& scan) {
  const CellIndex origin_cell = grid.cell_at(scan.origin);
  if (!grid.in_bounds(origin_cell)) {
    throw std::invalid_argument("scan origin outside grid bounds");
  }
  const double eps = 1e-9 * grid.cell_size_m();
  for (const LidarRay& ray : scan.rays) {
    // Walk slightly past the hit so the endpoint cell itself is visited. The
    // endpoint bin identifies the occupied cell; cells sharing the entry
    // distance at an exact corner crossing stay untouched.
    const double walk_limit = ray.hit_distance_m + grid.cell_size_m();
    traverse_grid(scan.origin, ray.angle_rad, walk_limit, grid.cell_size_m(),
                  [&](CellIndex c, double t_entry) {
                    if (!grid.in_bounds(c)) return false;
                    if (ray.hit_is_obstacle && c == ray.hit_cell) {
                      grid.set(c, Knowledge::Occupied);
                      return false;
                    }
                    if (t_entry < ray.hit_distance_m - eps) {
                      grid.set(c, Knowledge::Free);
                      return true;
                    }
                    return false;
                  });
  }
}

OccupancyGrid merge(const OccupancyGrid& a, const OccupancyGrid& b) {
  return merge(std::vector<const OccupancyGrid*>{&a, &b});
}

OccupancyGrid merge(const std::vector<const OccupancyGrid*>& grids) {
  if (grids.empty()) throw std::invalid_argument("merge of zero grids");
  OccupancyGrid out = *grids[0];
  for (std::size_t g = 1; g < grids.size(); ++g) {
    const OccupancyGrid& other = *grids[g];
    if (!out.same_geometry(other)) {
      throw std::invalid_argument("merge: grid geometry mismatch");
    }
    for (int iy = 0; iy < out.cells_y(); ++iy) {
      for (int ix = 0; ix < out.cells_x(); ++ix) {
        const Knowledge k = other.at({ix, iy});
        if (k != Knowledge::Unknown) out.set({ix, iy}, k);
      }
    }
  }
  return out;
}

std::vector<UnknownRegion> find_unknown_regions(const OccupancyGrid& grid,
                                                CellRect subarea,
                                                int min_region_cells) {
  subarea.x0 = std::max(subarea.x0, 0);
  subarea.y0 = std::max(subarea.y0, 0);
  subarea.x1 = std::min(subarea.x1, grid.cells_x());
  subarea.y1 = std::min(subarea.y1, grid.cells_y());

  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::vector<UnknownRegion> regions;

  for (int iy = subarea.y0; iy < subarea.y1; ++iy) {
    for (int ix = subarea.x0; ix < subarea.x1; ++ix) {
      const CellIndex start{ix, iy};
      if (seen[grid.idx(start)] || grid.at(start) != Knowledge::Unknown) continue;

      UnknownRegion region;
      std::deque<CellIndex> frontier{start};
      seen[grid.idx(start)] = 1;
      while (!frontier.empty()) {
        const CellIndex c = frontier.front();
        frontier.pop_front();
        region.cells.push_back(c);
        const CellIndex nbs[4] = {
            {c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
        for (CellIndex nb : nbs) {
          if (!subarea.contains(nb)) continue;
          if (seen[grid.idx(nb)] || grid.at(nb) != Knowledge::Unknown) continue;
          seen[grid.idx(nb)] = 1;
          frontier.push_back(nb);
        }
      }
      if (static_cast<int>(region.cells.size()) < min_region_cells) continue;

      std::sort(region.cells.begin(), region.cells.end());
      region.size_cells = static_cast<int>(region.cells.size());
      Vec2 sum{0.0, 0.0};
      for (CellIndex c : region.cells) sum = sum + grid.center_of(c);
      region.centroid = sum * (1.0 / region.size_cells);
      regions.push_back(std::move(region));
    }
  }
  std::sort(regions.begin(), regions.end(),
            [](const UnknownRegion& a, const UnknownRegion& b) {
              return a.cells.front() < b.cells.front();
            });
  return regions;
}

std::vector<std::uint8_t> inflate_occupied(const OccupancyGrid& grid,
                                           double robot_radius_m) {
  const double cell = grid.cell_size_m();
  std::vector<std::uint8_t> blocked(grid.size(), 0);

  // Offsets whose cell square lies closer than the radius to a cell center.
  std::vector<CellIndex> mask;
  const int reach = static_cast<int>(std::ceil(robot_radius_m / cell)) + 1;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double d = point_to_cell_distance(
          {0.0, 0.0}, {dx * cell, dy * cell}, cell);
      if (d < robot_radius_m) mask.push_back({dx, dy});
    }
  }

  for (int iy = 0; iy < grid.cells_y(); ++iy) {
    for (int ix = 0; ix < grid.cells_x(); ++ix) {
      if (grid.at({ix, iy}) != Knowledge::Occupied) continue;
      blocked[grid.idx({ix, iy})] = 1;
      for (CellIndex off : mask) {
        const CellIndex c{ix + off.x, iy + off.y};
        if (grid.in_bounds(c)) blocked[grid.idx(c)] = 1;
      }
    }
  }
  return blocked;
}

bool is_accessible_masked(const OccupancyGrid& grid,
                          const std::vector<std::uint8_t>& blocked, Vec2 from,
                          const UnknownRegion& region) {
  const CellIndex start = grid.cell_at(from);
  if (!grid.in_bounds(start)) return false;

  std::vector<std::uint8_t> target_adjacent(grid.size(), 0);
  for (CellIndex c : region.cells) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const CellIndex nb{c.x + dx, c.y + dy};
        if (grid.in_bounds(nb)) target_adjacent[grid.idx(nb)] = 1;
      }
    }
  }

  auto traversable = [&](CellIndex c) {
    return grid.at(c) == Knowledge::Free && !blocked[grid.idx(c)];
  };

  // The robot's own cell is exempt from the traversability test; it is where
  // the robot already stands.
  if (target_adjacent[grid.idx(start)]) return true;

  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::deque<CellIndex> frontier{start};
  seen[grid.idx(start)] = 1;
  while (!frontier.empty()) {
    const CellIndex c = frontier.front();
    frontier.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb{c.x + dx, c.y + dy};
        if (!grid.in_bounds(nb) || seen[grid.idx(nb)]) continue;
        if (!traversable(nb)) continue;
        if (target_adjacent[grid.idx(nb)]) return true;
        seen[grid.idx(nb)] = 1;
        frontier.push_back(nb);
      }
    }
  }
  return false;
}

bool is_accessible(const OccupancyGrid& grid, Vec2 from, const UnknownRegion& region,
                   double robot_radius_m) {
  return is_accessible_masked(grid, inflate_occupied(grid, robot_radius_m), from,
                              region);
}

Priority classify_priority(const UnknownRegion& region, const OccupancyGrid& grid,
                           const SubareaGrid& subareas, int size_threshold_cells) {
  (void)grid;
  if (region.size_cells >= size_threshold_cells) return Priority::High;

  // Frontier rule: a cell on the border of its subarea, with the neighboring
  // subarea across that border still unexplored.
  for (CellIndex c : region.cells) {
    const int sub = subareas.subarea_of_cell(c);
    if (sub < 0) continue;
    const CellRect rect = subareas.cell_rect_of(sub);
    const CellIndex nbs[4] = {
        {c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (CellIndex nb : nbs) {
      if (rect.contains(nb)) continue;
      const int other = subareas.subarea_of_cell(nb);
      if (other >= 0 && other != sub && !subareas.explored[other]) {
        return Priority::High;
      }
    }
  }
  return Priority::Low;
}

}  // namespace reactsim
