#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmd/geodata/geometry.hpp"

namespace pmd::geo {

inline constexpr double kEarthRadius = 6371000.0;  // meters

/// Equirectangular tangent plane at `origin`.
LocalPoint project(GeoPoint p, GeoPoint origin);
GeoPoint unproject(LocalPoint p, GeoPoint origin);

struct MapLayer {
  GeoPoint origin;
  std::vector<Feature> features;

  std::vector<const Feature*> of_class(std::string_view feature_class) const;
};

struct ClassRule {
  std::string key;
  std::string value;  // "*" matches any value
  std::string feature_class;
  double buffer_width = 0.0;  // meters; only used for polylines
};

/// Ordered tag -> class rules; the first match wins.
class ClassMapping {
 public:
  ClassMapping() = default;
  explicit ClassMapping(std::vector<ClassRule> rules);

  /// highway=primary/secondary/tertiary (6/5/4 m buffers), leisure=park,
  /// building=*.
  static ClassMapping defaults();

  /// `{"rules": [{"key", "value", "class", "buffer_width"}, ...]}`.
  /// Throws Error(kMalformedDocument).
  static ClassMapping from_json(std::string_view text);
  std::string to_json() const;

  const ClassRule* match(const std::map<std::string, std::string>& tags) const;
  /// Buffer width of the first rule producing `feature_class`, 0 if none.
  double buffer_width(std::string_view feature_class) const;
  bool knows(std::string_view feature_class) const;

  const std::vector<ClassRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<ClassRule> rules_;
};

/// The class reserved for the mission operator's position.
inline constexpr const char* kOperatorClass = "operator";

/// Builds typed features from an Overpass JSON response
/// (`{"elements": [...]}` with node and way elements). Ways whose first and
/// last node ids coincide become polygons, other ways polylines, tagged
/// nodes points. Untagged or unmapped elements are dropped.
///
/// Throws Error(kMalformedDocument), Error(kDanglingNodeReference) or
/// Error(kInvalidGeometry) (self-intersecting ring, degenerate way).
MapLayer ingest_overpass(std::string_view document, const ClassMapping& mapping,
                         GeoPoint origin);

struct BoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;
};

/// Overpass QL request for every mapped tag inside the box, in the
/// `[out:json]` shape that ingest_overpass consumes.
std::string overpass_query(const ClassMapping& mapping, const BoundingBox& bbox);

}  // namespace pmd::geo
