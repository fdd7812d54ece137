#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "pmd/error.hpp"
#include "pmd/geodata/geometry.hpp"
#include "pmd/geodata/map.hpp"

using namespace pmd;
using namespace pmd::geo;

namespace {

const std::vector<LocalPoint> kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Feature polyline(std::vector<LocalPoint> pts) { return {"l", "primary", Polyline{std::move(pts)}}; }
Feature polygon(std::vector<LocalPoint> pts) { return {"g", "park", Polygon{std::move(pts)}}; }

// Independent containment oracle: winding number with an explicit boundary
// test.
bool winding_contains(LocalPoint p, const std::vector<LocalPoint>& ring) {
  int winding = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const LocalPoint a = ring[i];
    const LocalPoint b = ring[(i + 1) % n];
    const double side = (b.east - a.east) * (p.north - a.north) - (p.east - a.east) * (b.north - a.north);
    const bool within = std::min(a.east, b.east) <= p.east && p.east <= std::max(a.east, b.east) &&
                        std::min(a.north, b.north) <= p.north && p.north <= std::max(a.north, b.north);
    if (side == 0.0 && within) return true;
    if (a.north <= p.north) {
      if (b.north > p.north && side > 0) ++winding;
    } else if (b.north <= p.north && side < 0) {
      --winding;
    }
  }
  return winding != 0;
}

std::vector<LocalPoint> random_convex(std::mt19937& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> radius(1.0, 50.0);
  std::uniform_real_distribution<double> centre(-100.0, 100.0);
  const int n = std::uniform_int_distribution<int>(3, 12)(rng);
  std::vector<double> angles(n);
  for (auto& a : angles) a = angle(rng);
  std::sort(angles.begin(), angles.end());
  const LocalPoint c{centre(rng), centre(rng)};
  const double r = radius(rng);
  std::vector<LocalPoint> ring;
  for (double a : angles) ring.push_back({c.east + r * std::cos(a), c.north + r * std::sin(a)});
  return ring;
}

std::string overpass_park() {
  return R"({"elements": [
    {"type": "way", "id": 10, "nodes": [1, 2, 3, 4, 1], "tags": {"leisure": "park"}},
    {"type": "node", "id": 1, "lat": 49.870, "lon": 8.650},
    {"type": "node", "id": 2, "lat": 49.870, "lon": 8.652},
    {"type": "node", "id": 3, "lat": 49.872, "lon": 8.652},
    {"type": "node", "id": 4, "lat": 49.872, "lon": 8.650}
  ]})";
}

}  // namespace

TEST_CASE("projection") {
  const GeoPoint origin{49.87, 8.65};
  const LocalPoint zero = project(origin, origin);
  CHECK(zero.east == 0.0);
  CHECK(zero.north == 0.0);

  const LocalPoint p = project({0.0, 0.001}, {0.0, 0.0});
  CHECK(p.east == doctest::Approx(111.19492664455875).epsilon(1e-12));
  CHECK(p.north == 0.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint q{origin.lat + jitter(rng), origin.lon + jitter(rng)};
    const GeoPoint back = unproject(project(q, origin), origin);
    CHECK(std::abs(back.lat - q.lat) <= 1e-12);
    CHECK(std::abs(back.lon - q.lon) <= 1e-12);
  }
}

TEST_CASE("distance_to_feature") {
  const Feature road = polyline({{0, 0}, {10, 0}});
  CHECK(distance_to_feature({0, 5}, road) == 5.0);
  CHECK(distance_to_feature({13, 4}, road) == 5.0);
  CHECK(distance_to_feature({5, 0}, road) == 0.0);
  CHECK(distance_to_feature({0.5, 0.5}, polygon(kUnitSquare)) == 0.0);
  CHECK(distance_to_feature({3, 0.5}, polygon(kUnitSquare)) == 2.0);
  CHECK(distance_to_feature({4, 5}, Feature{"p", "operator", PointGeometry{{1, 1}}}) == 5.0);
  CHECK(distance_to_feature({-3, 4}, polyline({{0, 0}, {10, 0}, {10, 10}})) == 5.0);
}

TEST_CASE("point_in_polygon") {
  CHECK(point_in_polygon({0.5, 0.5}, kUnitSquare));
  CHECK_FALSE(point_in_polygon({2, 2}, kUnitSquare));
  CHECK(point_in_polygon({0.5, 0}, kUnitSquare));
  CHECK(point_in_polygon({1, 1}, kUnitSquare));
  CHECK_FALSE(point_in_polygon({1.5, 0}, kUnitSquare));
  const std::vector<LocalPoint> concave{{0, 0}, {4, 0}, {4, 4}, {2, 1}, {0, 4}};
  CHECK_FALSE(point_in_polygon({2, 3}, concave));
  CHECK(point_in_polygon({1, 1}, concave));
}

TEST_CASE("property: ray casting agrees with winding number") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> q(-160.0, 160.0);
  for (int i = 0; i < 1000; ++i) {
    const auto ring = random_convex(rng);
    for (int k = 0; k < 10; ++k) {
      const LocalPoint p{q(rng), q(rng)};
      REQUIRE(point_in_polygon(p, ring) == winding_contains(p, ring));
    }
    // Vertices lie on the boundary.
    CHECK(point_in_polygon(ring[0], ring));
  }
}

TEST_CASE("property: distance is non-negative, zero exactly on the geometry") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> q(-160.0, 160.0);
  for (int i = 0; i < 300; ++i) {
    const auto ring = random_convex(rng);
    const Feature area = polygon(ring);
    const Feature line = polyline(ring);
    for (int k = 0; k < 10; ++k) {
      const LocalPoint p{q(rng), q(rng)};
      const double d = distance_to_feature(p, area);
      CHECK(d >= 0.0);
      CHECK((d == 0.0) == point_in_polygon(p, ring));
      CHECK(distance_to_feature(p, line) >= d);
    }
    CHECK(distance_to_feature(ring[1], line) == 0.0);
  }
}

TEST_CASE("property: translation equivariance is exact") {
  // Quarter-meter lattice coordinates keep every difference exact.
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coord(-4000, 4000);
  auto lattice = [&] { return LocalPoint{coord(rng) / 4.0, coord(rng) / 4.0}; };
  for (int i = 0; i < 500; ++i) {
    std::vector<LocalPoint> pts{lattice(), lattice(), lattice()};
    const LocalPoint t{coord(rng) * 8.0, coord(rng) * 8.0};
    const LocalPoint p = lattice();
    for (const Feature& f : {polyline(pts), polygon(pts), Feature{"n", "operator", PointGeometry{pts[0]}}}) {
      CHECK(distance_to_feature(p + t, translate(f, t)) == distance_to_feature(p, f));
    }
  }
}

TEST_CASE("buffer_polyline") {
  const Feature road = polyline({{0, 0}, {10, 0}});
  const Feature buffered = buffer_polyline(road, 4.0);
  const auto& ring = std::get<Polygon>(buffered.geometry).ring;
  CHECK(buffered.feature_class == "primary");
  CHECK(point_in_polygon({5, 1}, ring));
  CHECK(point_in_polygon({5, 2}, ring));
  CHECK(point_in_polygon({0, -2}, ring));
  CHECK_FALSE(point_in_polygon({5, 3}, ring));
  CHECK_FALSE(point_in_polygon({-0.5, 0}, ring));
  CHECK_FALSE(point_in_polygon({10.5, 0}, ring));
  CHECK(is_simple_ring(ring));

  const Feature bend = buffer_polyline(polyline({{0, 0}, {10, 0}, {10, 10}}), 2.0);
  const auto& bend_ring = std::get<Polygon>(bend.geometry).ring;
  CHECK(is_simple_ring(bend_ring));
  CHECK(point_in_polygon({10.9, -0.9}, bend_ring));  // mitered outer corner
  CHECK(point_in_polygon({9.5, 5}, bend_ring));
  CHECK_FALSE(point_in_polygon({8.5, 5}, bend_ring));

  try {
    buffer_polyline(road, 0.0);
    FAIL("expected ZeroWidth");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroWidth);
  }
  CHECK_THROWS_AS(buffer_polyline(polygon(kUnitSquare), 1.0), Error);
}

TEST_CASE("simple ring detection") {
  CHECK(is_simple_ring(kUnitSquare));
  CHECK_FALSE(is_simple_ring(std::vector<LocalPoint>{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
  CHECK_FALSE(is_simple_ring(std::vector<LocalPoint>{{0, 0}, {1, 0}}));
  CHECK_FALSE(is_simple_ring(std::vector<LocalPoint>{{0, 0}, {2, 0}, {1, 0}, {1, 1}}));
}

TEST_CASE("ingest_overpass") {
  const GeoPoint origin{49.87, 8.65};
  const ClassMapping mapping = ClassMapping::defaults();

  SUBCASE("closed way becomes a polygon") {
    const MapLayer layer = ingest_overpass(overpass_park(), mapping, origin);
    REQUIRE(layer.features.size() == 1);
    const Feature& park = layer.features[0];
    CHECK(park.id == "way/10");
    CHECK(park.feature_class == "park");
    const auto& ring = std::get<Polygon>(park.geometry).ring;
    REQUIRE(ring.size() == 4);
    CHECK(ring[0].east == 0.0);
    CHECK(ring[0].north == 0.0);
    const GeoPoint corner = unproject(ring[2], origin);
    CHECK(std::abs(corner.lat - 49.872) <= 1e-9);
    CHECK(std::abs(corner.lon - 8.652) <= 1e-9);
  }

  SUBCASE("empty document") {
    CHECK(ingest_overpass(R"({"elements": []})", mapping, origin).features.empty());
  }

  SUBCASE("open ways, tagged nodes and dropped elements") {
    const auto layer = ingest_overpass(R"({"elements": [
      {"type": "node", "id": 1, "lat": 49.87, "lon": 8.65},
      {"type": "node", "id": 2, "lat": 49.871, "lon": 8.651, "tags": {"building": "yes"}},
      {"type": "node", "id": 3, "lat": 49.872, "lon": 8.652, "tags": {"amenity": "bench"}},
      {"type": "way", "id": 7, "nodes": [1, 2, 3], "tags": {"highway": "primary"}},
      {"type": "way", "id": 8, "nodes": [1, 3], "tags": {"highway": "footway"}},
      {"type": "way", "id": 9, "nodes": [2, 3]},
      {"type": "relation", "id": 4, "members": [], "tags": {"leisure": "park"}}
    ]})",
                                       mapping, origin);
    REQUIRE(layer.features.size() == 2);
    CHECK(layer.features[0].id == "node/2");
    CHECK(layer.features[0].feature_class == "building");
    CHECK(std::holds_alternative<PointGeometry>(layer.features[0].geometry));
    CHECK(layer.features[1].feature_class == "primary");
    CHECK(std::get<Polyline>(layer.features[1].geometry).vertices.size() == 3);
    CHECK(layer.of_class("primary").size() == 1);
  }

  SUBCASE("dangling node reference") {
    try {
      ingest_overpass(R"({"elements": [{"type": "way", "id": 1, "nodes": [5, 6], "tags": {"highway": "primary"}}]})",
                      mapping, origin);
      FAIL("expected DanglingNodeReference");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDanglingNodeReference);
    }
  }

  SUBCASE("malformed documents") {
    for (const char* doc : {"not json", "[]", R"({"elements": 3})", R"({"elements": [{"id": 1}]})",
                            R"({"elements": [{"type": "node", "id": 1}]})"}) {
      try {
        ingest_overpass(doc, mapping, origin);
        FAIL("expected MalformedDocument");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kMalformedDocument);
      }
    }
  }

  SUBCASE("self-intersecting ring") {
    try {
      ingest_overpass(R"({"elements": [
        {"type": "node", "id": 1, "lat": 49.870, "lon": 8.650},
        {"type": "node", "id": 2, "lat": 49.872, "lon": 8.652},
        {"type": "node", "id": 3, "lat": 49.870, "lon": 8.652},
        {"type": "node", "id": 4, "lat": 49.872, "lon": 8.650},
        {"type": "way", "id": 1, "nodes": [1, 2, 3, 4, 1], "tags": {"leisure": "park"}}]})",
                      mapping, origin);
      FAIL("expected InvalidGeometry");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidGeometry);
    }
  }
}

TEST_CASE("property: ingest, project, unproject preserves node coordinates") {
  const GeoPoint origin{49.87, 8.65};
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> jitter(-0.006, 0.006);
  for (int trial = 0; trial < 50; ++trial) {
    std::string doc = R"({"elements": [{"type": "way", "id": 1, "nodes": [)";
    std::vector<GeoPoint> nodes;
    for (int i = 0; i < 8; ++i) {
      nodes.push_back({origin.lat + jitter(rng), origin.lon + jitter(rng)});
      doc += (i ? ", " : "") + std::to_string(i + 100);
    }
    doc += R"(], "tags": {"highway": "secondary"}})";
    char buf[128];
    for (int i = 0; i < 8; ++i) {
      std::snprintf(buf, sizeof buf, R"(, {"type": "node", "id": %d, "lat": %.17g, "lon": %.17g})", i + 100,
                    nodes[i].lat, nodes[i].lon);
      doc += buf;
    }
    doc += "]}";
    const MapLayer layer = ingest_overpass(doc, ClassMapping::defaults(), origin);
    REQUIRE(layer.features.size() == 1);
    const auto& pts = std::get<Polyline>(layer.features[0].geometry).vertices;
    REQUIRE(pts.size() == nodes.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const GeoPoint back = unproject(pts[i], origin);
      CHECK(std::abs(back.lat - nodes[i].lat) <= 1e-9);
      CHECK(std::abs(back.lon - nodes[i].lon) <= 1e-9);
    }
  }
}

TEST_CASE("class mapping") {
  const ClassMapping m = ClassMapping::defaults();
  CHECK(m.match({{"highway", "primary"}})->feature_class == "primary");
  CHECK(m.match({{"building", "house"}})->feature_class == "building");
  CHECK(m.match({{"highway", "footway"}}) == nullptr);
  CHECK(m.buffer_width("primary") == 6.0);
  CHECK(m.buffer_width("secondary") == 5.0);
  CHECK(m.buffer_width("tertiary") == 4.0);
  CHECK(m.buffer_width("park") == 0.0);

  const ClassMapping first_wins({{"highway", "*", "road", 3.0}, {"highway", "primary", "primary", 6.0}});
  CHECK(first_wins.match({{"highway", "primary"}})->feature_class == "road");

  const ClassMapping round = ClassMapping::from_json(m.to_json());
  CHECK(round.rules().size() == m.rules().size());
  CHECK(round.buffer_width("tertiary") == 4.0);
  CHECK_THROWS_AS(ClassMapping::from_json("{}"), Error);
  CHECK_THROWS_AS(ClassMapping({{"highway", "primary", "primary", -1.0}}), Error);
}

TEST_CASE("overpass query template") {
  const std::string q = overpass_query(ClassMapping::defaults(), {49.86, 8.64, 49.88, 8.66});
  CHECK(q.starts_with("[out:json][timeout:25];"));
  CHECK(q.find("way[\"highway\"=\"primary\"](49.86,8.64,49.88,8.66);") != std::string::npos);
  CHECK(q.find("way[\"building\"](") != std::string::npos);
  CHECK(q.find("out body; >; out skel qt;") != std::string::npos);
}
