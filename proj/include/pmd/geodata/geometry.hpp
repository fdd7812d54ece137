#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pmd::geo {

/// WGS84 coordinates in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Meters east/north of a mission origin.
struct LocalPoint {
  double east = 0.0;
  double north = 0.0;

  friend LocalPoint operator+(LocalPoint a, LocalPoint b) {
    return {a.east + b.east, a.north + b.north};
  }
  friend LocalPoint operator-(LocalPoint a, LocalPoint b) {
    return {a.east - b.east, a.north - b.north};
  }
  friend LocalPoint operator*(double s, LocalPoint p) { return {s * p.east, s * p.north}; }
  friend bool operator==(const LocalPoint&, const LocalPoint&) = default;
};

double norm(LocalPoint v);
double dot(LocalPoint a, LocalPoint b);
double cross(LocalPoint a, LocalPoint b);

struct PointGeometry {
  LocalPoint position;
  friend bool operator==(const PointGeometry&, const PointGeometry&) = default;
};

struct Polyline {
  std::vector<LocalPoint> vertices;  // at least 2
  friend bool operator==(const Polyline&, const Polyline&) = default;
};

/// Simple ring, implicitly closed (first vertex is not repeated).
struct Polygon {
  std::vector<LocalPoint> ring;  // at least 3
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

using Geometry = std::variant<PointGeometry, Polyline, Polygon>;

struct Feature {
  std::string id;
  std::string feature_class;
  Geometry geometry;
  friend bool operator==(const Feature&, const Feature&) = default;
};

/// Euclidean distance from `p` to the closed segment [a, b].
double distance_to_segment(LocalPoint p, LocalPoint a, LocalPoint b);

/// Even-odd containment; points on the boundary count as inside.
bool point_in_polygon(LocalPoint p, std::span<const LocalPoint> ring);

/// Point: Euclidean distance. Polyline: nearest segment. Polygon: zero inside
/// or on the boundary, otherwise distance to the boundary.
double distance_to_feature(LocalPoint p, const Feature& f);

/// True if no two non-adjacent edges of the closed ring touch and no
/// adjacent edges overlap.
bool is_simple_ring(std::span<const LocalPoint> ring);

/// Arithmetic mean of the vertices (ring vertices counted once).
LocalPoint vertex_centroid(const Geometry& g);

Feature translate(const Feature& f, LocalPoint offset);

/// Flat-capped buffer of a polyline as one ring with mitered joins. Throws
/// Error(kZeroWidth) for width <= 0 and Error(kInvalidGeometry) for
/// non-polyline input.
Feature buffer_polyline(const Feature& f, double width);

}  // namespace pmd::geo
