#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmd/landscape/pml.hpp"

namespace pmd {

struct NavEdge {
  std::size_t to = 0;
  double weight = 0.0;
};

/// 8-connected lattice over the PML. An edge into v exists iff
/// P(v) >= t_p; its weight is 1 - P(v).
struct NavGraph {
  Grid grid;
  std::vector<double> probability;
  double t_p = 0.0;
  std::vector<std::vector<NavEdge>> out;  // sorted by target index

  std::size_t edge_count() const;
  bool admits(std::size_t cell) const { return probability[cell] >= t_p; }
};

/// Throws Error(kInvalidConfig) unless t_p is in [0, 1].
NavGraph build_graph(const Pml& pml, double t_p);

struct Path {
  std::vector<Cell> cells;  // start ... goal
  std::vector<geo::LocalPoint> via_points;
  double total_weight = 0.0;

  std::size_t size() const noexcept { return cells.size(); }
  /// Digest of the cell sequence.
  std::string digest() const;

  friend bool operator==(const Path&, const Path&) = default;
};

/// Minimum-weight path, or nullopt when the start is below t_p or no path
/// survives pruning. Among equal-weight paths the predecessor of each cell
/// is the smallest-index cell settled before it. Throws Error(kOutOfBounds).
std::optional<Path> shortest_path(const NavGraph& graph, Cell start, Cell goal);

/// Mean violation probability over all via-points, start and goal included.
double path_cost(const Path& path, const Pml& pml);

/// Document with (row, col, east, north) per via-point, J and the digest of
/// the PML the path was planned on.
std::string path_document(const Path& path, const Pml& pml);

}  // namespace pmd
