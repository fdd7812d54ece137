#pragma once

#include <cstddef>
#include <string>

#include "pmd/geodata/geometry.hpp"

namespace pmd {

/// Row-major cell index; row 0 is the southern edge.
struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Regular mission grid whose south-west corner sits at `origin`.
struct Grid {
  geo::GeoPoint origin;
  std::size_t width_cells = 0;
  std::size_t height_cells = 0;
  double cell_size = 0.0;  // meters

  std::size_t size() const noexcept { return width_cells * height_cells; }
  bool contains(Cell c) const noexcept { return c.row < height_cells && c.col < width_cells; }
  std::size_t index(Cell c) const noexcept { return c.row * width_cells + c.col; }
  Cell cell(std::size_t index) const noexcept {
    return {index / width_cells, index % width_cells};
  }
  geo::LocalPoint center(Cell c) const noexcept {
    return {(static_cast<double>(c.col) + 0.5) * cell_size,
            (static_cast<double>(c.row) + 0.5) * cell_size};
  }

  /// Nearest cell center. Throws Error(kOutOfGrid) when the point is more
  /// than one cell size away from every center.
  Cell snap(geo::LocalPoint p) const;

  /// Throws Error(kEmptyGrid) / Error(kInvalidConfig).
  void check() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

std::string to_string(Cell c);

}  // namespace pmd
