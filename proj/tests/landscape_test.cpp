#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "inference_oracle.hpp"
#include "pmd/dsl/parser.hpp"
#include "pmd/error.hpp"
#include "pmd/landscape/pml.hpp"
#include "test_support.hpp"

using namespace pmd;
using namespace pmd::geo;

namespace {

RelationField empty_field(std::size_t w, std::size_t h) {
  RelationField f;
  f.grid = {{49.87, 8.65}, w, h, 40};
  return f;
}

// Small map in the spirit of the mission scenario: a park, a north-south
// primary road, a secondary and a tertiary road, and the operator.
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

RelationField synthetic_field(std::size_t n_cells) {
  RelationRequest req;
  req.classes = {"operator", "park", "primary", "secondary", "tertiary"};
  for (const auto& c : req.classes) {
    if (c != "operator") req.noise[c] = AffineNoiseModel::translation(10, 10);
  }
  req.buffer_widths = {{"primary", 6}, {"secondary", 5}, {"tertiary", 4}};
  req.sampling = {100, 31337};
  return estimate_relations(synthetic_layer(), {{49.87, 8.65}, n_cells, n_cells, 1000.0 / n_cells},
                            req);
}

dsl::Program listing() { return dsl::parse(testing::read_file("tests/fixtures/uam_model.pl")); }

}  // namespace

TEST_CASE("constant programs") {
  const auto f = empty_field(4, 3);
  const auto one = compute_pml(dsl::parse("1.0::ok. landscape(X, Y) :- ok."), f, {});
  CHECK(one.values == std::vector<double>(12, 1.0));
  const auto zero = compute_pml(dsl::parse("0.0::ok. landscape(X, Y) :- ok."), f, {});
  CHECK(zero.values == std::vector<double>(12, 0.0));
  CHECK(one.query == default_query());
}

TEST_CASE("mission model landscape equals per-cell evaluation") {
  const auto field = synthetic_field(25);
  const auto prog = listing();
  const auto pml = compute_pml(prog, field, {});
  REQUIRE(pml.values.size() == 625);
  CHECK(pml.assignment == dsl::Assignment{{"day", "day"}, {"standard", "standard"}});
  for (std::size_t i = 0; i < 625; ++i) {
    const auto gp = inference::ground(prog, field.grid.cell(i), field, default_query());
    CHECK(pml.values[i] == inference::query_probability(gp));
  }

  // Spot-check a few cells against direct sampling.
  std::mt19937_64 gen(8);
  for (int k = 0; k < 5; ++k) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, 624)(gen);
    const Cell c = field.grid.cell(i);
    testing::OracleField of;
    of.x = inference::column_constant(c.col);
    of.y = inference::row_constant(c.row);
    for (const auto& cls : field.classes) {
      const auto& r = field.of(cls);
      of.distance[cls] = {r.distance_mean[i], std::sqrt(r.distance_var[i])};
      of.over[cls] = r.over_prob[i];
    }
    const std::size_t n = 200000;
    const double mc = testing::MonteCarloOracle(prog, default_query(), of).estimate(n, 90 + k);
    const double se = std::sqrt(std::max(mc * (1 - mc), 1e-12) / n);
    INFO("cell " << to_string(c) << " exact " << pml.values[i] << " mc " << mc);
    CHECK(std::abs(pml.values[i] - mc) <= std::max(0.005, 3 * se));
  }
}

TEST_CASE("parallel evaluation matches serial") {
  const auto field = synthetic_field(12);
  const auto prog = listing();
  const auto serial = compute_pml(prog, field, {{"standard", "special"}}, default_query());
  for (unsigned t : {2u, 3u, 7u}) {
    CHECK(compute_pml(prog, field, {{"standard", "special"}}, default_query(), {t}) == serial);
  }
}

TEST_CASE("assignment equals reassigned defaults") {
  auto prog = listing();
  prog.parameter_labels = {{"standard", "license"}, {"day", "time"}};
  const auto field = synthetic_field(8);
  for (const auto& a : dsl::identify_parameters(prog).enumerate()) {
    const auto direct = compute_pml(prog, field, a);
    const auto reassigned = compute_pml(dsl::reassign(prog, a), field, {});
    CHECK(direct == reassigned);
    CHECK(direct.assignment == a);
  }
}

TEST_CASE("errors name the offending cell") {
  const auto prog = dsl::parse("landscape(X, Y) :- over(X, Y, river).");
  try {
    compute_pml(prog, empty_field(2, 2), {});
    FAIL("expected UnknownClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownClass);
    CHECK(std::string(e.what()).starts_with("cell (0, 0)"));
  }
  try {
    compute_pml(listing(), empty_field(2, 2), {{"weather", "x"}});
    FAIL("expected UnknownParameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownParameter);
  }
}

TEST_CASE("document round trip and validation") {
  Pml p;
  p.grid = {{49.87, 8.65}, 2, 2, 10};
  p.values = {0.1, 1.0 / 3.0, 0.0, 1.0};
  p.query = default_query();
  p.assignment = {{"license", "special"}, {"time", "day"}};
  p.program_digest = "abc";
  p.field_digest = "def";
  p.seed = 18446744073709551615ull;
  const std::string text = p.to_json();
  CHECK(Pml::from_json(text) == p);
  CHECK(p.to_csv() == "0.1,0.3333333333333333\n0,1\n");

  auto doc = nlohmann::json::parse(text);
  doc["values"] = {0.1, 0.2, 0.3};
  try {
    Pml::from_json(doc.dump());
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  doc["values"] = {0.1, 0.2, 0.3, 1.5};
  try {
    Pml::from_json(doc.dump());
    FAIL("expected MalformedDocument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedDocument);
  }
  for (const char* bad : {"", "[]", "{\"format\":\"x\"}", "{\"format\":\"pmd-pml\",\"version\":1}"}) {
    try {
      Pml::from_json(bad);
      FAIL("expected MalformedDocument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedDocument);
    }
  }
}

TEST_CASE("cache reuses landscapes") {
  auto prog = listing();
  prog.parameter_labels = {{"standard", "license"}, {"day", "time"}};
  const auto field = synthetic_field(6);
  PmlCache cache;
  const auto a = cache.get(prog, field, {});
  const auto b = cache.get(prog, field, {{"license", "standard"}, {"time", "day"}});
  CHECK(a == b);
  CHECK(cache.hits() == 1);
  const auto c = cache.get(prog, field, {{"time", "night"}});
  CHECK(c != a);
  CHECK(cache.size() == 2);
  CHECK(*c == compute_pml(prog, field, {{"time", "night"}}));
}
