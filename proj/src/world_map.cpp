#include "reactsim/world_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace reactsim {

namespace {

bool nearly_integer(double v, double* out) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v))) return false;
  *out = r;
  return true;
}

}  // namespace

int WorldMap::free_cell_count() const {
  return static_cast<int>(
      std::count(cells.begin(), cells.end(), CellState::Free));
}

WorldMap load_map(std::string_view source) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : source) {
      if (ch == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) {
      if (cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
    }
  }
  if (lines.empty()) throw MapParseError("empty map file", 1, 1);

  WorldMap map;
  {
    std::istringstream header(lines[0]);
    double w = 0, h = 0, cell = 0;
    if (!(header >> w >> h >> cell)) {
      throw MapParseError("header must be 'W H CELL' in meters", 1, 1);
    }
    std::string rest;
    if (header >> rest) {
      throw MapParseError("trailing token '" + rest + "' in header", 1, 1);
    }
    if (w <= 0 || h <= 0 || cell <= 0) {
      throw MapParseError("header dimensions must be positive", 1, 1);
    }
    double nx = 0, ny = 0;
    if (!nearly_integer(w / cell, &nx) || !nearly_integer(h / cell, &ny) ||
        nx < 1 || ny < 1) {
      throw MapParseError("W and H must be integer multiples of CELL", 1, 1);
    }
    map.width_m = w;
    map.height_m = h;
    map.cell_size_m = cell;
    map.cells_x = static_cast<int>(nx);
    map.cells_y = static_cast<int>(ny);
  }

  if (static_cast<int>(lines.size()) - 1 != map.cells_y) {
    throw MapParseError("expected " + std::to_string(map.cells_y) +
                            " grid rows, found " +
                            std::to_string(lines.size() - 1),
                        static_cast<int>(lines.size()), 1);
  }

  map.cells.assign(static_cast<std::size_t>(map.cells_x) * map.cells_y,
                   CellState::Free);
  std::vector<CellIndex> spawn_cells;

  for (int row = 0; row < map.cells_y; ++row) {
    const std::string& line = lines[row + 1];
    const int file_line = row + 2;
    if (static_cast<int>(line.size()) != map.cells_x) {
      throw MapParseError("row has " + std::to_string(line.size()) +
                              " glyphs, expected " + std::to_string(map.cells_x),
                          file_line, static_cast<int>(line.size()) + 1);
    }
    const int iy = map.cells_y - 1 - row;  // top row of the file is max y
    for (int ix = 0; ix < map.cells_x; ++ix) {
      const char g = line[ix];
      const CellIndex c{ix, iy};
      switch (g) {
        case '#':
          map.cells[map.idx(c)] = CellState::Occupied;
          break;
        case '.':
          break;
        case 'S':
          spawn_cells.push_back(c);
          break;
        default:
          throw MapParseError(std::string("unknown glyph '") + g + "'",
                              file_line, ix + 1);
      }
    }
  }

  // Boundary ring forced occupied so rays always terminate.
  for (int ix = 0; ix < map.cells_x; ++ix) {
    map.cells[map.idx({ix, 0})] = CellState::Occupied;
    map.cells[map.idx({ix, map.cells_y - 1})] = CellState::Occupied;
  }
  for (int iy = 0; iy < map.cells_y; ++iy) {
    map.cells[map.idx({0, iy})] = CellState::Occupied;
    map.cells[map.idx({map.cells_x - 1, iy})] = CellState::Occupied;
  }

  for (CellIndex c : spawn_cells) {
    if (map.at(c) == CellState::Occupied) {
      throw MapParseError("spawn point on the forced-occupied boundary",
                          map.cells_y - c.y + 1, c.x + 1);
    }
    map.spawn_points.push_back(map.center_of(c));
  }
  if (map.spawn_points.empty()) {
    throw MapParseError("map has no spawn point ('S' glyph)", 1, 1);
  }
  return map;
}

WorldMap load_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_map(buf.str());
}

std::string serialize_map(const WorldMap& map) {
  std::ostringstream out;
  auto fmt_meters = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  out << fmt_meters(map.width_m) << ' ' << fmt_meters(map.height_m) << ' '
      << fmt_meters(map.cell_size_m) << '\n';

  std::vector<CellIndex> spawn_cells;
  spawn_cells.reserve(map.spawn_points.size());
  for (Vec2 p : map.spawn_points) spawn_cells.push_back(map.cell_at(p));

  for (int row = 0; row < map.cells_y; ++row) {
    const int iy = map.cells_y - 1 - row;
    for (int ix = 0; ix < map.cells_x; ++ix) {
      const CellIndex c{ix, iy};
      char g = map.at(c) == CellState::Occupied ? '#' : '.';
      if (g == '.' &&
          std::find(spawn_cells.begin(), spawn_cells.end(), c) != spawn_cells.end()) {
        g = 'S';
      }
      out << g;
    }
    out << '\n';
  }
  return out.str();
}

RayResult raycast(const WorldMap& map, Vec2 origin, double angle_rad,
                  double max_range_m) {
  const CellIndex start = map.cell_at(origin);
  if (!map.in_bounds(start) || map.at(start) == CellState::Occupied) {
    throw std::logic_error("raycast origin inside an occupied cell");
  }
  RayResult result{max_range_m, false, {}};
  traverse_grid(origin, angle_rad, max_range_m, map.cell_size_m,
                [&](CellIndex c, double t_entry) {
                  if (map.occupied(c)) {
                    result.distance_m = t_entry;
                    result.hit_obstacle = true;
                    result.hit_cell = c;
                    return false;
                  }
                  return true;
                });
  return result;
}

LidarScan scan(const WorldMap& map, Vec2 origin, int n_rays, double max_range_m) {
  if (n_rays < 1) throw std::invalid_argument("scan requires n_rays >= 1");
  LidarScan s;
  s.origin = origin;
  s.max_range_m = max_range_m;
  s.rays.reserve(static_cast<std::size_t>(n_rays));
  for (int k = 0; k < n_rays; ++k) {
    const double angle = 2.0 * M_PI * k / n_rays;
    const RayResult r = raycast(map, origin, angle, max_range_m);
    s.rays.push_back({angle, r.distance_m, r.hit_obstacle, r.hit_cell});
  }
  return s;
}

Observability compute_observability(const WorldMap& map) {
  Observability obs;
  const std::size_t n = map.cells.size();
  obs.reachable_free.assign(n, 0);
  obs.observable.assign(n, 0);

  std::deque<CellIndex> frontier;
  for (Vec2 p : map.spawn_points) {
    const CellIndex c = map.cell_at(p);
    if (!obs.reachable_free[map.idx(c)]) {
      obs.reachable_free[map.idx(c)] = 1;
      frontier.push_back(c);
    }
  }
  while (!frontier.empty()) {
    const CellIndex c = frontier.front();
    frontier.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb{c.x + dx, c.y + dy};
        if (!map.in_bounds(nb) || map.at(nb) == CellState::Occupied) continue;
        if (obs.reachable_free[map.idx(nb)]) continue;
        obs.reachable_free[map.idx(nb)] = 1;
        frontier.push_back(nb);
      }
    }
  }

  for (int iy = 0; iy < map.cells_y; ++iy) {
    for (int ix = 0; ix < map.cells_x; ++ix) {
      const CellIndex c{ix, iy};
      const std::size_t i = map.idx(c);
      if (obs.reachable_free[i]) {
        obs.observable[i] = 1;
        obs.reachable_free_count++;
        continue;
      }
      if (map.at(c) != CellState::Occupied) continue;
      // wall surface: occupied cell next to reachable free space
      for (int dy = -1; dy <= 1 && !obs.observable[i]; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const CellIndex nb{ix + dx, iy + dy};
          if (map.in_bounds(nb) && obs.reachable_free[map.idx(nb)]) {
            obs.observable[i] = 1;
            break;
          }
        }
      }
    }
  }
  obs.observable_count = static_cast<int>(
      std::count(obs.observable.begin(), obs.observable.end(), 1));
  return obs;
}

std::vector<std::vector<CellIndex>> find_blind_pockets(const WorldMap& map,
                                                       PocketOptions opts) {
  const int r = opts.erosion_cells;
  std::vector<std::uint8_t> eroded(map.cells.size(), 0);
  for (int iy = 0; iy < map.cells_y; ++iy) {
    for (int ix = 0; ix < map.cells_x; ++ix) {
      if (map.at({ix, iy}) == CellState::Occupied) continue;
      bool clear = true;
      for (int dy = -r; dy <= r && clear; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (map.occupied({ix + dx, iy + dy})) {
            clear = false;
            break;
          }
        }
      }
      eroded[map.idx({ix, iy})] = clear ? 1 : 0;
    }
  }

  // 4-connected components of the eroded mask
  std::vector<int> label(map.cells.size(), -1);
  std::vector<std::vector<CellIndex>> components;
  for (int iy = 0; iy < map.cells_y; ++iy) {
    for (int ix = 0; ix < map.cells_x; ++ix) {
      const std::size_t i = map.idx({ix, iy});
      if (!eroded[i] || label[i] >= 0) continue;
      const int id = static_cast<int>(components.size());
      components.emplace_back();
      std::deque<CellIndex> frontier{{ix, iy}};
      label[i] = id;
      while (!frontier.empty()) {
        const CellIndex c = frontier.front();
        frontier.pop_front();
        components[id].push_back(c);
        const CellIndex nbs[4] = {
            {c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
        for (CellIndex nb : nbs) {
          if (!map.in_bounds(nb)) continue;
          const std::size_t j = map.idx(nb);
          if (eroded[j] && label[j] < 0) {
            label[j] = id;
            frontier.push_back(nb);
          }
        }
      }
    }
  }
  if (components.empty()) return {};

  std::size_t main_idx = 0;
  for (std::size_t i = 1; i < components.size(); ++i) {
    if (components[i].size() > components[main_idx].size()) main_idx = i;
  }
  std::vector<std::vector<CellIndex>> pockets;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i == main_idx) continue;
    if (static_cast<int>(components[i].size()) >= opts.min_eroded_cells) {
      pockets.push_back(std::move(components[i]));
    }
  }
  return pockets;
}

int count_blind_pockets(const WorldMap& map, PocketOptions opts) {
  return static_cast<int>(find_blind_pockets(map, opts).size());
}

}  // namespace reactsim
