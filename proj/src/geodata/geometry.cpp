#include "pmd/geodata/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmd/error.hpp"

namespace pmd::geo {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool on_segment(LocalPoint p, LocalPoint a, LocalPoint b) {
  if (cross(b - a, p - a) != 0.0) return false;
  return std::min(a.east, b.east) <= p.east && p.east <= std::max(a.east, b.east) &&
         std::min(a.north, b.north) <= p.north && p.north <= std::max(a.north, b.north);
}

int orientation(LocalPoint a, LocalPoint b, LocalPoint c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool segments_intersect(LocalPoint p1, LocalPoint p2, LocalPoint q1, LocalPoint q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
         (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

LocalPoint left_normal(LocalPoint a, LocalPoint b) {
  const LocalPoint d = b - a;
  const double len = norm(d);
  return {-d.north / len, d.east / len};
}

}  // namespace

double norm(LocalPoint v) { return std::hypot(v.east, v.north); }
double dot(LocalPoint a, LocalPoint b) { return a.east * b.east + a.north * b.north; }
double cross(LocalPoint a, LocalPoint b) { return a.east * b.north - a.north * b.east; }

// Both kernels only use coordinate differences relative to the query point,
// so translating point and geometry together leaves results bit-identical
// whenever the differences themselves are exact.
double distance_to_segment(LocalPoint p, LocalPoint a, LocalPoint b) {
  const LocalPoint ap = p - a;
  const LocalPoint ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(ap);
  const double t = std::clamp(dot(ap, ab) / len2, 0.0, 1.0);
  if (t == 0.0) return norm(ap);
  if (t == 1.0) return norm(p - b);
  return norm(ap - t * ab);
}

bool point_in_polygon(LocalPoint p, std::span<const LocalPoint> ring) {
  const std::size_t n = ring.size();
  const LocalPoint origin{};
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const LocalPoint a = ring[i] - p;
    const LocalPoint b = ring[j] - p;
    if (on_segment(origin, a, b)) return true;
    if ((a.north > 0.0) != (b.north > 0.0)) {
      const double x = (b.east - a.east) * (-a.north) / (b.north - a.north) + a.east;
      if (0.0 < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_feature(LocalPoint p, const Feature& f) {
  return std::visit(
      Overloaded{
          [&](const PointGeometry& g) { return norm(p - g.position); },
          [&](const Polyline& g) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i) {
              best = std::min(best, distance_to_segment(p, g.vertices[i], g.vertices[i + 1]));
            }
            return best;
          },
          [&](const Polygon& g) {
            if (point_in_polygon(p, g.ring)) return 0.0;
            double best = std::numeric_limits<double>::infinity();
            const std::size_t n = g.ring.size();
            for (std::size_t i = 0; i < n; ++i) {
              best = std::min(best, distance_to_segment(p, g.ring[i], g.ring[(i + 1) % n]));
            }
            return best;
          },
      },
      f.geometry);
}

bool is_simple_ring(std::span<const LocalPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const LocalPoint a1 = ring[i];
    const LocalPoint a2 = ring[(i + 1) % n];
    if (a1 == a2) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const LocalPoint b1 = ring[j];
      const LocalPoint b2 = ring[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Neighbors share one vertex; they must not fold back onto each other.
        const LocalPoint shared = j == i + 1 ? a2 : a1;
        const LocalPoint other_a = j == i + 1 ? a1 : a2;
        const LocalPoint other_b = j == i + 1 ? b2 : b1;
        if (orientation(other_a, shared, other_b) == 0 &&
            dot(other_a - shared, other_b - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

LocalPoint vertex_centroid(const Geometry& g) {
  auto mean = [](const std::vector<LocalPoint>& pts) {
    LocalPoint sum;
    for (const auto& p : pts) sum = sum + p;
    return (1.0 / static_cast<double>(pts.size())) * sum;
  };
  return std::visit(Overloaded{
                        [](const PointGeometry& p) { return p.position; },
                        [&](const Polyline& l) { return mean(l.vertices); },
                        [&](const Polygon& r) { return mean(r.ring); },
                    },
                    g);
}

Feature translate(const Feature& f, LocalPoint offset) {
  Feature out = f;
  std::visit(Overloaded{
                 [&](PointGeometry& p) { p.position = p.position + offset; },
                 [&](Polyline& l) {
                   for (auto& v : l.vertices) v = v + offset;
                 },
                 [&](Polygon& r) {
                   for (auto& v : r.ring) v = v + offset;
                 },
             },
             out.geometry);
  return out;
}

Feature buffer_polyline(const Feature& f, double width) {
  if (!(width > 0.0)) {
    throw Error(ErrorCode::kZeroWidth, "buffer width must be positive");
  }
  const auto* line = std::get_if<Polyline>(&f.geometry);
  if (line == nullptr) {
    throw Error(ErrorCode::kInvalidGeometry, "feature " + f.id + " is not a polyline");
  }
  std::vector<LocalPoint> pts;
  for (const auto& v : line->vertices) {
    if (pts.empty() || !(pts.back() == v)) pts.push_back(v);
  }
  if (pts.size() < 2) {
    throw Error(ErrorCode::kInvalidGeometry, "feature " + f.id + " has zero length");
  }
  const double half = width / 2.0;
  // Miters longer than this many half-widths are clamped.
  constexpr double kMiterLimit = 4.0;
  const std::size_t n = pts.size();
  std::vector<LocalPoint> left(n);
  std::vector<LocalPoint> right(n);
  for (std::size_t i = 0; i < n; ++i) {
    LocalPoint offset;
    if (i == 0) {
      offset = half * left_normal(pts[0], pts[1]);
    } else if (i + 1 == n) {
      offset = half * left_normal(pts[n - 2], pts[n - 1]);
    } else {
      const LocalPoint n1 = left_normal(pts[i - 1], pts[i]);
      const LocalPoint n2 = left_normal(pts[i], pts[i + 1]);
      LocalPoint bisector = n1 + n2;
      const double len = norm(bisector);
      if (len < 1e-12) {
        offset = half * n1;
      } else {
        bisector = (1.0 / len) * bisector;
        const double scale = std::min(half / dot(bisector, n1), kMiterLimit * half);
        offset = scale * bisector;
      }
    }
    left[i] = pts[i] + offset;
    right[i] = pts[i] - offset;
  }
  Polygon ring;
  ring.ring = left;
  ring.ring.insert(ring.ring.end(), right.rbegin(), right.rend());
  return Feature{f.id, f.feature_class, std::move(ring)};
}

}  // namespace pmd::geo
