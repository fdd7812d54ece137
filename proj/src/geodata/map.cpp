#include "pmd/geodata/map.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "pmd/error.hpp"

namespace pmd::geo {
namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, "malformed Overpass document: " + what);
}

std::map<std::string, std::string> read_tags(const json& element) {
  std::map<std::string, std::string> tags;
  const auto it = element.find("tags");
  if (it == element.end()) return tags;
  if (!it->is_object()) malformed("tags must be an object");
  for (const auto& [k, v] : it->items()) {
    if (v.is_string()) tags[k] = v.get<std::string>();
  }
  return tags;
}

std::int64_t read_id(const json& element) {
  const auto it = element.find("id");
  if (it == element.end() || !it->is_number_integer()) malformed("element without integer id");
  return it->get<std::int64_t>();
}

}  // namespace

LocalPoint project(GeoPoint p, GeoPoint origin) {
  const double cos_lat0 = std::cos(origin.lat * kDegToRad);
  return {(p.lon - origin.lon) * kDegToRad * cos_lat0 * kEarthRadius,
          (p.lat - origin.lat) * kDegToRad * kEarthRadius};
}

GeoPoint unproject(LocalPoint p, GeoPoint origin) {
  const double cos_lat0 = std::cos(origin.lat * kDegToRad);
  return {origin.lat + p.north / kEarthRadius / kDegToRad,
          origin.lon + p.east / (kEarthRadius * cos_lat0) / kDegToRad};
}

std::vector<const Feature*> MapLayer::of_class(std::string_view feature_class) const {
  std::vector<const Feature*> out;
  for (const auto& f : features) {
    if (f.feature_class == feature_class) out.push_back(&f);
  }
  return out;
}

ClassMapping::ClassMapping(std::vector<ClassRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_) {
    if (r.buffer_width < 0.0 || !std::isfinite(r.buffer_width)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "buffer width of class '" + r.feature_class + "' must be >= 0");
    }
    if (r.key.empty() || r.value.empty() || r.feature_class.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "class rules need key, value and class");
    }
  }
}

ClassMapping ClassMapping::defaults() {
  return ClassMapping({
      {"highway", "primary", "primary", 6.0},
      {"highway", "secondary", "secondary", 5.0},
      {"highway", "tertiary", "tertiary", 4.0},
      {"leisure", "park", "park", 0.0},
      {"building", "*", "building", 0.0},
  });
}

ClassMapping ClassMapping::from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("rules") ||
      !doc["rules"].is_array()) {
    throw Error(ErrorCode::kMalformedDocument, "class mapping needs a 'rules' array");
  }
  std::vector<ClassRule> rules;
  try {
    for (const auto& r : doc["rules"]) {
      rules.push_back({r.at("key").get<std::string>(), r.at("value").get<std::string>(),
                       r.at("class").get<std::string>(), r.value("buffer_width", 0.0)});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("class mapping: ") + e.what());
  }
  return ClassMapping(std::move(rules));
}

std::string ClassMapping::to_json() const {
  json rules = json::array();
  for (const auto& r : rules_) {
    rules.push_back({{"key", r.key},
                     {"value", r.value},
                     {"class", r.feature_class},
                     {"buffer_width", r.buffer_width}});
  }
  return json{{"rules", rules}}.dump(2);
}

const ClassRule* ClassMapping::match(const std::map<std::string, std::string>& tags) const {
  for (const auto& r : rules_) {
    const auto it = tags.find(r.key);
    if (it != tags.end() && (r.value == "*" || r.value == it->second)) return &r;
  }
  return nullptr;
}

double ClassMapping::buffer_width(std::string_view feature_class) const {
  for (const auto& r : rules_) {
    if (r.feature_class == feature_class) return r.buffer_width;
  }
  return 0.0;
}

bool ClassMapping::knows(std::string_view feature_class) const {
  for (const auto& r : rules_) {
    if (r.feature_class == feature_class) return true;
  }
  return false;
}

MapLayer ingest_overpass(std::string_view document, const ClassMapping& mapping,
                         GeoPoint origin) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) malformed("not valid JSON");
  if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array()) {
    malformed("missing 'elements' array");
  }
  const json& elements = doc["elements"];

  std::unordered_map<std::int64_t, GeoPoint> nodes;
  for (const auto& e : elements) {
    if (!e.is_object() || !e.contains("type") || !e["type"].is_string()) {
      malformed("element without type");
    }
    if (e["type"] != "node") continue;
    if (!e.contains("lat") || !e.contains("lon") || !e["lat"].is_number() ||
        !e["lon"].is_number()) {
      malformed("node without coordinates");
    }
    const GeoPoint p{e["lat"].get<double>(), e["lon"].get<double>()};
    if (std::abs(p.lat) > 90.0 || std::abs(p.lon) > 180.0) malformed("node out of range");
    nodes[read_id(e)] = p;
  }

  MapLayer layer{origin, {}};
  for (const auto& e : elements) {
    const std::string type = e["type"].get<std::string>();
    const auto tags = read_tags(e);
    if (tags.empty()) continue;
    const ClassRule* rule = mapping.match(tags);
    if (rule == nullptr) continue;
    const std::int64_t id = read_id(e);

    if (type == "node") {
      layer.features.push_back({"node/" + std::to_string(id), rule->feature_class,
                                PointGeometry{project(nodes.at(id), origin)}});
      continue;
    }
    if (type != "way") continue;

    const auto refs_it = e.find("nodes");
    if (refs_it == e.end() || !refs_it->is_array()) malformed("way without node list");
    std::vector<std::int64_t> refs;
    for (const auto& r : *refs_it) {
      if (!r.is_number_integer()) malformed("non-integer node reference");
      refs.push_back(r.get<std::int64_t>());
    }
    std::vector<LocalPoint> pts;
    for (std::int64_t ref : refs) {
      const auto node = nodes.find(ref);
      if (node == nodes.end()) {
        throw Error(ErrorCode::kDanglingNodeReference,
                    "way " + std::to_string(id) + " references missing node " +
                        std::to_string(ref));
      }
      pts.push_back(project(node->second, origin));
    }
    const std::string fid = "way/" + std::to_string(id);
    if (refs.size() >= 2 && refs.front() == refs.back()) {
      pts.pop_back();
      if (!is_simple_ring(pts)) {
        throw Error(ErrorCode::kInvalidGeometry, "way " + std::to_string(id) +
                                                     " is not a simple polygon");
      }
      layer.features.push_back({fid, rule->feature_class, Polygon{std::move(pts)}});
    } else {
      if (pts.size() < 2) {
        throw Error(ErrorCode::kInvalidGeometry,
                    "way " + std::to_string(id) + " has fewer than two nodes");
      }
      layer.features.push_back({fid, rule->feature_class, Polyline{std::move(pts)}});
    }
  }
  return layer;
}

std::string overpass_query(const ClassMapping& mapping, const BoundingBox& bbox) {
  std::ostringstream box;
  box.precision(9);
  box << bbox.south << "," << bbox.west << "," << bbox.north << "," << bbox.east;
  std::ostringstream q;
  q << "[out:json][timeout:25];\n(\n";
  for (const auto& r : mapping.rules()) {
    const std::string filter = r.value == "*" ? "[\"" + r.key + "\"]"
                                              : "[\"" + r.key + "\"=\"" + r.value + "\"]";
    q << "    way" << filter << "(" << box.str() << ");\n";
    q << "    node" << filter << "(" << box.str() << ");\n";
  }
  q << ");\nout body; >; out skel qt;\n";
  return q.str();
}

}  // namespace pmd::geo
