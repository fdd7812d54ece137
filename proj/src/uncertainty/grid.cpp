#include "pmd/uncertainty/grid.hpp"

#include <algorithm>
#include <cmath>

#include "pmd/error.hpp"

namespace pmd {

void Grid::check() const {
  if (width_cells == 0 || height_cells == 0) {
    throw Error(ErrorCode::kEmptyGrid, "grid has no cells");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw Error(ErrorCode::kInvalidConfig, "cell size must be positive");
  }
}

Cell Grid::snap(geo::LocalPoint p) const {
  check();
  const auto clamp_index = [this](double v, std::size_t n) {
    const double i = std::floor(v / cell_size);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(n - 1)));
  };
  if (!std::isfinite(p.east) || !std::isfinite(p.north)) {
    throw Error(ErrorCode::kOutOfGrid, "non-finite position");
  }
  const Cell c{clamp_index(p.north, height_cells), clamp_index(p.east, width_cells)};
  if (geo::norm(p - center(c)) > cell_size) {
    throw Error(ErrorCode::kOutOfGrid, "position (" + std::to_string(p.east) + ", " +
                                           std::to_string(p.north) +
                                           ") is outside the mission grid");
  }
  return c;
}

std::string to_string(Cell c) {
  return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")";
}

}  // namespace pmd
