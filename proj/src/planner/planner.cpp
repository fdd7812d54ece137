#include "pmd/planner/planner.hpp"

#include <limits>
#include <algorithm>
#include <queue>
#include <tuple>

#include <json.hpp>

#include "pmd/digest.hpp"
#include "pmd/error.hpp"

namespace pmd {

std::size_t NavGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : out) n += e.size();
  return n;
}

NavGraph build_graph(const Pml& pml, double t_p) {
  if (!(t_p >= 0.0 && t_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "t_p must be within [0, 1]");
  }
  pml.grid.check();
  NavGraph g;
  g.grid = pml.grid;
  g.probability = pml.values;
  g.t_p = t_p;
  g.out.resize(g.grid.size());
  const auto h = static_cast<long>(g.grid.height_cells);
  const auto w = static_cast<long>(g.grid.width_cells);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      auto& edges = g.out[g.grid.index({static_cast<std::size_t>(r), static_cast<std::size_t>(c)})];
      for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const long rr = r + dr;
          const long cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t v =
              g.grid.index({static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)});
          if (g.admits(v)) edges.push_back({v, 1.0 - g.probability[v]});
        }
      }
    }
  }
  return g;
}

std::optional<Path> shortest_path(const NavGraph& graph, Cell start, Cell goal) {
  if (!graph.grid.contains(start) || !graph.grid.contains(goal)) {
    throw Error(ErrorCode::kOutOfBounds, "start or goal is outside the grid");
  }
  const std::size_t s = graph.grid.index(start);
  const std::size_t t = graph.grid.index(goal);
  if (!graph.admits(s)) return std::nullopt;

  const std::size_t n = graph.grid.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> pred(n, kNone);
  std::vector<bool> done(n, false);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[s] = 0.0;
  queue.push({0.0, s});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == t) break;
    for (const auto& e : graph.out[u]) {
      if (done[e.to]) continue;
      const double nd = d + e.weight;
      if (nd < dist[e.to] || (nd == dist[e.to] && u < pred[e.to])) {
        const bool improved = nd < dist[e.to];
        dist[e.to] = nd;
        pred[e.to] = u;
        if (improved) queue.push({nd, e.to});
      }
    }
  }
  if (!done[t]) return std::nullopt;

  Path p;
  for (std::size_t v = t; v != kNone; v = pred[v]) p.cells.push_back(graph.grid.cell(v));
  std::reverse(p.cells.begin(), p.cells.end());
  for (const Cell c : p.cells) p.via_points.push_back(graph.grid.center(c));
  p.total_weight = dist[t];
  return p;
}

double path_cost(const Path& path, const Pml& pml) {
  if (path.cells.empty()) return 0.0;
  double sum = 0.0;
  for (const Cell c : path.cells) {
    if (!pml.grid.contains(c)) {
      throw Error(ErrorCode::kOutOfBounds, "path cell " + to_string(c) + " is outside the grid");
    }
    sum += 1.0 - pml.at(c);
  }
  return sum / static_cast<double>(path.cells.size());
}

std::string Path::digest() const {
  Digest d;
  for (const Cell c : cells) d.field(std::to_string(c.row) + "," + std::to_string(c.col));
  return d.hex();
}

std::string path_document(const Path& path, const Pml& pml) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    points.push_back({{"row", path.cells[i].row},
                      {"col", path.cells[i].col},
                      {"east", path.via_points[i].east},
                      {"north", path.via_points[i].north}});
  }
  const nlohmann::json j = {{"via_points", points},
                            {"J", path_cost(path, pml)},
                            {"total_weight", path.total_weight},
                            {"path_digest", path.digest()},
                            {"pml_digest", digest_of(pml.to_json())}};
  return j.dump();
}

}  // namespace pmd
