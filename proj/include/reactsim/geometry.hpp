#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace reactsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Fine raster index. (0,0) is the bottom-left cell; x grows east, y north.
struct CellIndex {
  int x = 0;
  int y = 0;
};

inline bool operator==(CellIndex a, CellIndex b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(CellIndex a, CellIndex b) { return !(a == b); }
inline bool operator<(CellIndex a, CellIndex b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

// Half-open cell rectangle [x0,x1) x [y0,y1).
struct CellRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool contains(CellIndex c) const {
    return c.x >= x0 && c.x < x1 && c.y >= y0 && c.y < y1;
  }
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

// Distance from point p to the axis-aligned square cell of side `cell` whose
// center is `center`. Zero when p lies inside the cell.
inline double point_to_cell_distance(Vec2 p, Vec2 center, double cell) {
  const double half = 0.5 * cell;
  const double dx = std::max(std::abs(p.x - center.x) - half, 0.0);
  const double dy = std::max(std::abs(p.y - center.y) - half, 0.0);
  return std::hypot(dx, dy);
}

// Walks the cells of a square grid pierced by the ray (origin, angle), in
// order, up to max_dist. visit(cell, t_entry) is called for every cell the
// ray enters, starting with the origin cell at t_entry = 0; return false to
// stop. A ray passing exactly through a cell corner steps x before y, so the
// walk is fully deterministic. Grid-line crossing (no step-size tuning).
template <typename Visit>
void traverse_grid(Vec2 origin, double angle_rad, double max_dist, double cell_size,
                   Visit&& visit) {
  const double inf = std::numeric_limits<double>::infinity();
  const double dx = std::cos(angle_rad);
  const double dy = std::sin(angle_rad);

  CellIndex cell{static_cast<int>(std::floor(origin.x / cell_size)),
                 static_cast<int>(std::floor(origin.y / cell_size))};

  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);

  double t_max_x = inf, t_delta_x = inf;
  if (step_x != 0) {
    const double next_x = (cell.x + (step_x > 0 ? 1 : 0)) * cell_size;
    t_max_x = (next_x - origin.x) / dx;
    t_delta_x = cell_size / std::abs(dx);
  }
  double t_max_y = inf, t_delta_y = inf;
  if (step_y != 0) {
    const double next_y = (cell.y + (step_y > 0 ? 1 : 0)) * cell_size;
    t_max_y = (next_y - origin.y) / dy;
    t_delta_y = cell_size / std::abs(dy);
  }

  if (!visit(cell, 0.0)) return;

  while (true) {
    double t;
    if (t_max_x <= t_max_y) {
      t = t_max_x;
      cell.x += step_x;
      t_max_x += t_delta_x;
    } else {
      t = t_max_y;
      cell.y += step_y;
      t_max_y += t_delta_y;
    }
    if (t >= max_dist) return;
    if (!visit(cell, t)) return;
  }
}

}  // namespace reactsim
