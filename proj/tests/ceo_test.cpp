#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "pmd/ceo/ceo.hpp"
#include "pmd/dsl/parser.hpp"
#include "pmd/error.hpp"
#include "test_support.hpp"

using namespace pmd;
using namespace pmd::geo;

namespace {

Pml row_pml(std::vector<double> values) {
  Pml p;
  p.grid = {{49.87, 8.65}, values.size(), 1, 10};
  p.values = std::move(values);
  p.query = default_query();
  return p;
}

MapLayer synthetic_layer() {
  MapLayer layer;
  layer.origin = {49.87, 8.65};
  layer.features.push_back(
      {"way/1", "park", Polygon{{{380, 520}, {760, 520}, {760, 880}, {380, 880}}}});
  layer.features.push_back({"way/2", "primary", Polyline{{{620, 0}, {620, 700}}}});
  layer.features.push_back({"way/3", "secondary", Polyline{{{0, 300}, {1000, 320}}}});
  layer.features.push_back({"way/4", "tertiary", Polyline{{{200, 0}, {210, 1000}}}});
  layer.features.push_back({"node/5", "operator", PointGeometry{{740, 860}}});
  return layer;
}

std::shared_ptr<const RelationField> synthetic_field() {
  RelationRequest req;
  req.classes = {"operator", "park", "primary", "secondary", "tertiary"};
  for (const auto& c : req.classes) {
    if (c != "operator") req.noise[c] = AffineNoiseModel::translation(10, 10);
  }
  req.buffer_widths = {{"primary", 6}, {"secondary", 5}, {"tertiary", 4}};
  req.sampling = {60, 99};
  return std::make_shared<const RelationField>(
      estimate_relations(synthetic_layer(), {{49.87, 8.65}, 20, 20, 50.0}, req));
}

ceo::Problem listing_problem() {
  static const auto field = synthetic_field();
  ceo::Problem p;
  p.program = dsl::parse(testing::read_file("tests/fixtures/uam_model.pl"));
  p.field = field;
  p.cache = std::make_shared<PmlCache>();
  p.start = {625, 575};
  p.goal = {325, 25};
  p.t_p = 0.5;
  p.t_j = 0.1;
  return p;
}

}  // namespace

TEST_CASE("clearance on hand-made landscapes") {
  const auto ones = row_pml({1, 1, 1});
  ceo::Mission m;
  for (int i = 0; i < 3; ++i) m.via_points.push_back({{5.0 + 10 * i, 5}, 0.0, {}});
  auto v = ceo::clearance(m, ones, 0.1);
  CHECK(v.J == 0.0);
  CHECK(v.cleared);
  CHECK(v.per_point.size() == 3);

  const auto pml = row_pml({0.9, 0.8, 1.0});
  v = ceo::clearance(m, pml, 0.1);
  CHECK(v.J == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_FALSE(v.cleared);
  CHECK(ceo::clearance(m, pml, 0.1 + 1e-9).cleared);
  CHECK(v.per_point[1].probability == 0.8);
  CHECK(v.per_point[1].cell == Cell{0, 1});

  const auto doc = nlohmann::json::parse(ceo::verdict_document(v, pml));
  CHECK(doc["cleared"] == false);
  CHECK(doc["per_point"].size() == 3);
}

TEST_CASE("clearance rejects bad missions") {
  auto pml = row_pml({1, 1});
  pml.assignment = {{"day", "day"}};
  ceo::Mission m{{{{5, 5}, 0.0, {}}}, {{"day", "night"}}};
  try {
    ceo::clearance(m, pml, 0.1);
    FAIL("expected a mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAssignmentMismatch);
  }
  m.assignment = {{"day", "day"}};
  CHECK_NOTHROW(ceo::clearance(m, pml, 0.1));
  m.via_points[0].labels = {{"day", "night"}};
  CHECK_THROWS_AS(ceo::clearance(m, pml, 0.1), Error);
  m.via_points[0].labels = {};
  m.via_points[0].yaw = std::numbers::pi;
  CHECK_THROWS_AS(ceo::clearance(m, pml, 0.1), Error);
  m.via_points[0].yaw = -std::numbers::pi;
  CHECK_NOTHROW(ceo::clearance(m, pml, 0.1));

  m.via_points.push_back({{500, 5}, 0.0, {}});
  try {
    ceo::clearance(m, pml, 0.1);
    FAIL("expected off-grid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfGrid);
  }
  m.via_points.clear();
  CHECK_THROWS_AS(ceo::clearance(m, pml, 0.1), Error);
}

TEST_CASE("plan, clear and cache transparency") {
  auto problem = listing_problem();
  const auto cached = ceo::plan(problem, {});
  REQUIRE(cached.error.empty());
  CHECK(cached.assignment == dsl::Assignment{{"day", "day"}, {"standard", "standard"}});

  auto uncached_problem = problem;
  uncached_problem.cache = nullptr;
  const auto uncached = ceo::plan(uncached_problem, {});
  CHECK(uncached.pml->values == cached.pml->values);
  CHECK(uncached.path == cached.path);
  CHECK(uncached.J == cached.J);
  // A second request is served from the cache.
  const auto again = ceo::plan(problem, {{"day", "day"}});
  CHECK(again.pml == cached.pml);
  CHECK(problem.cache->hits() >= 1);

  if (cached.path) {
    const auto mission = ceo::mission_from_path(*cached.path, cached.assignment);
    const auto verdict = ceo::clearance(mission, *cached.pml, problem.t_j);
    CHECK(verdict.J == doctest::Approx(*cached.J).epsilon(1e-12));
    CHECK(verdict.cleared == cached.cleared);
  }
  problem.start = {5000, 5000};
  CHECK_THROWS_AS(ceo::plan(problem, {}), Error);
  problem.start = {625, 575};
  CHECK_THROWS_AS(ceo::plan(problem, {{"weather", "rain"}}), Error);
}

TEST_CASE("explanation modes") {
  const auto problem = listing_problem();
  const auto oat = ceo::explain(problem, {}, ceo::ExplainMode::kOneAtATime);
  REQUIRE(oat.rows.size() == 2);
  CHECK(oat.rows[0].assignment == dsl::Assignment{{"day", "day"}, {"standard", "special"}});
  CHECK(oat.rows[1].assignment == dsl::Assignment{{"day", "night"}, {"standard", "standard"}});
  const auto full = ceo::explain(problem, {}, ceo::ExplainMode::kFullFactorial);
  CHECK(full.rows.size() == 4);
  for (const auto& r : full.rows) {
    if (r.J && full.proposed.J) {
      REQUIRE(r.delta_J);
      CHECK(*r.delta_J == doctest::Approx(*r.J - *full.proposed.J));
    } else {
      CHECK_FALSE(r.delta_J);
    }
  }
  const auto doc = nlohmann::json::parse(full.to_json());
  CHECK(doc["mode"] == "full-factorial");
  CHECK(doc["rows"].size() == 4);

  auto fixed = problem;
  fixed.program = dsl::parse("0.8::ok. landscape(X, Y) :- ok.");
  const auto none = ceo::explain(fixed, {}, ceo::ExplainMode::kOneAtATime);
  CHECK(none.rows.empty());
  CHECK(none.proposed.J);
  CHECK(ceo::explain(fixed, {}, ceo::ExplainMode::kFullFactorial).rows.empty());

  CHECK(ceo::parse_mode("oat") == ceo::ExplainMode::kOneAtATime);
  CHECK(ceo::parse_mode("factorial") == ceo::ExplainMode::kFullFactorial);
  CHECK_FALSE(ceo::parse_mode("random"));
}

TEST_CASE("optimization") {
  const auto problem = listing_problem();
  const auto best = ceo::optimize(problem);
  CHECK(best.evaluated == 4);
  const auto full = ceo::explain(problem, {}, ceo::ExplainMode::kFullFactorial);
  bool any = false;
  for (const auto& r : full.rows) {
    if (!r.J) continue;
    any = true;
    CHECK(best.best_J <= *r.J);
  }
  CHECK(best.feasible == any);
  const auto doc = nlohmann::json::parse(best.to_json());
  CHECK(doc["feasible"] == best.feasible);

  // Nothing is admissible at t_p = 1 when every cell is below one.
  auto strict = problem;
  strict.program = dsl::parse("0.5::ok. 1.0::a; 0.0::b. landscape(X, Y) :- ok.");
  strict.t_p = 1.0;
  const auto none = ceo::optimize(strict);
  CHECK_FALSE(none.feasible);
  CHECK(none.evaluated == 2);
  CHECK(nlohmann::json::parse(none.to_json())["best_J"] == "infeasible");
}

TEST_CASE("irrelevant parameters and threshold monotonicity") {
  auto problem = listing_problem();
  problem.program = dsl::parse(
      "0.7::ok. 1.0::calm; 0.0::windy. 1.0::low; 0.0::high.\n"
      "landscape(X, Y) :- ok, over(X, Y, park).\n"
      "landscape(X, Y) :- ok, distance(X, Y, primary) < 100.");
  const auto report = ceo::explain(problem, {}, ceo::ExplainMode::kFullFactorial);
  REQUIRE(report.rows.size() == 4);
  for (const auto& r : report.rows) {
    CHECK(r.J == report.proposed.J);
    CHECK(r.path_digest == report.proposed.path_digest);
    if (r.delta_J) CHECK(*r.delta_J == 0.0);
  }
  // The first minimum in enumeration order wins.
  const auto best = ceo::optimize(problem);
  if (best.feasible) {
    CHECK(best.best_assignment == dsl::Assignment{{"calm", "calm"}, {"low", "low"}});
  }

  problem = listing_problem();
  bool was_cleared = false;
  for (double t_j : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.01}) {
    problem.t_j = t_j;
    const auto o = ceo::plan(problem, {});
    if (!o.feasible()) break;
    if (was_cleared) CHECK(o.cleared);
    was_cleared = o.cleared;
    if (t_j > 1.0) CHECK(o.cleared);
  }
}
