#include "reactsim/subarea.hpp"

#include <cmath>
#include <stdexcept>

namespace reactsim {

SubareaGrid build_subarea_grid(const WorldMap& map, double subarea_size_m,
                               const Observability& obs) {
  if (subarea_size_m <= 0) throw std::invalid_argument("subarea size must be > 0");

  SubareaGrid sg;
  sg.subarea_size_m = subarea_size_m;
  sg.cell_size_m = map.cell_size_m;
  sg.map_cells_x = map.cells_x;
  sg.map_cells_y = map.cells_y;
  sg.rows_a = static_cast<int>(std::ceil(map.height_m / subarea_size_m));
  sg.cols_b = static_cast<int>(std::ceil(map.width_m / subarea_size_m));

  const int n = sg.count();
  sg.explored.assign(n, 0);
  sg.explored_by_exception.assign(n, 0);
  sg.coverage.assign(n, 0.0);
  sg.centroids.resize(n);
  sg.observable_cells.assign(n, 0);

  for (int a = 0; a < sg.rows_a; ++a) {
    for (int b = 0; b < sg.cols_b; ++b) {
      const int i = sg.index(a, b);
      const double x0 = b * subarea_size_m;
      const double y0 = a * subarea_size_m;
      const double x1 = std::min((b + 1) * subarea_size_m, map.width_m);
      const double y1 = std::min((a + 1) * subarea_size_m, map.height_m);
      sg.centroids[i] = {0.5 * (x0 + x1), 0.5 * (y0 + y1)};

      const CellRect rect = sg.cell_rect_of(i);
      int observable = 0;
      for (int iy = rect.y0; iy < rect.y1; ++iy) {
        for (int ix = rect.x0; ix < rect.x1; ++ix) {
          if (obs.observable[map.idx({ix, iy})]) ++observable;
        }
      }
      sg.observable_cells[i] = observable;
      if (observable == 0) {
        // entirely wall interior or sealed space: nothing a robot could learn
        sg.coverage[i] = 1.0;
        sg.explored[i] = 1;
      }
    }
  }
  return sg;
}

int update_coverage(SubareaGrid& sg, const OccupancyGrid& merged,
                    const Observability& obs, double delta,
                    const std::vector<std::uint8_t>* delta_eligible) {
  if (merged.cells_x() != sg.map_cells_x || merged.cells_y() != sg.map_cells_y) {
    throw std::invalid_argument("update_coverage: grid geometry mismatch");
  }
  int newly_explored = 0;
  for (int i = 0; i < sg.count(); ++i) {
    if (sg.explored_by_exception[i]) continue;
    if (sg.observable_cells[i] == 0) continue;
    const CellRect rect = sg.cell_rect_of(i);
    int known = 0;
    for (int iy = rect.y0; iy < rect.y1; ++iy) {
      for (int ix = rect.x0; ix < rect.x1; ++ix) {
        const std::size_t f = merged.idx({ix, iy});
        if (obs.observable[f] && merged.at_flat(f) != Knowledge::Unknown) ++known;
      }
    }
    sg.coverage[i] = static_cast<double>(known) / sg.observable_cells[i];
    const bool eligible = !delta_eligible || (*delta_eligible)[i];
    const bool done =
        eligible ? sg.coverage[i] >= delta : known == sg.observable_cells[i];
    if (!sg.explored[i] && done) {
      sg.explored[i] = 1;
      ++newly_explored;
    }
  }
  return newly_explored;
}

}  // namespace reactsim
