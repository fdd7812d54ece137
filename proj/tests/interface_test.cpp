#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "pmd/digest.hpp"
#include "pmd/error.hpp"
#include "pmd/interface/documents.hpp"
#include "pmd/interface/scenario.hpp"
#include "pmd/interface/service.hpp"
#include "test_support.hpp"

using namespace pmd;
using namespace pmd::interface;
using nlohmann::json;

namespace {

const std::string kScenario = testing::source_path("data/scenario/scenario.json");

std::shared_ptr<const Engine> bundled() {
  static const auto engine = Engine::load(Scenario::load(kScenario));
  return engine;
}

std::string run(const std::string& command, int* status = nullptr) {
  std::string out;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int rc = pclose(pipe);
  if (status) *status = WEXITSTATUS(rc);
  return out;
}

std::string minimal_scenario(const std::string& extra) {
  return R"({"format": "pmd-scenario", "version": 1, "program": "p.pl", "map": "m.json",
             "grid": {"origin": {"lat": 49.87, "lon": 8.65}, "width_cells": 4,
                      "height_cells": 4, "cell_size": 10},
             "start": {"east": 5, "north": 5}, "goal": {"east": 35, "north": 35})" +
         extra + "}";
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto s = Scenario::from_json(minimal_scenario(""), "/tmp");
  CHECK(s.grid.width_cells == 4);
  CHECK_FALSE(s.operator_position);
  CHECK(s.resolve("p.pl") == std::filesystem::path("/tmp/p.pl"));
  CHECK(s.t_p == 0.5);

  const auto op = Scenario::from_json(
      minimal_scenario(R"(, "operator": {"east": 1, "north": 2},
                          "noise": {"park": {"sigma_east": 3, "sigma_north": 4, "correlation": 0.5}})"),
      "/tmp");
  REQUIRE(op.operator_position);
  CHECK(op.operator_position->north == 2);
  CHECK(op.noise.at("park").cov_ee == 9);
  CHECK(op.noise.at("park").cov_en == 6);

  const auto code_of = [](const std::string& text) {
    try {
      Scenario::from_json(text, "/tmp");
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  CHECK(code_of(minimal_scenario(R"(, "t_j": 1.5)")) == ErrorCode::kInvalidConfig);
  CHECK(code_of(minimal_scenario(R"(, "operator": "north")")) == ErrorCode::kMalformedDocument);
  CHECK(code_of(R"({"format": "pmd-scenario", "version": 2})") == ErrorCode::kMalformedDocument);
  CHECK(code_of("[1, 2") == ErrorCode::kMalformedDocument);
  CHECK_THROWS_AS(Scenario::load("/nonexistent/scenario.json"), Error);
}

TEST_CASE("bundled scenario engine") {
  const auto& e = *bundled();
  CHECK(e.field().grid.width_cells == 25);
  CHECK(e.field().grid.height_cells == 25);
  CHECK(e.field().has_class("operator"));
  // The operator sits at the start and is noise-free.
  const Cell start = e.field().grid.snap(e.scenario().start);
  CHECK(e.field().of("operator").distance_mean[e.field().grid.index(start)] < 1e-9);
  CHECK(e.proposed() == dsl::Assignment{{"license", "standard"}, {"time", "day"}});

  const auto summary = json::parse(e.summary_json());
  REQUIRE(summary["parameters"].size() == 2);
  CHECK(summary["parameters"][0]["name"] == "license");
  CHECK(summary["parameters"][0]["domain"].size() == 2);
  CHECK(summary["parameters"][1]["name"] == "time");
  CHECK(summary["parameters"][1]["domain"].size() == 2);
  CHECK(summary["grid"]["cell_size"] == 40.0);

  CHECK(parse_assignment({"a=b", "c=d"}) == dsl::Assignment{{"a", "b"}, {"c", "d"}});
  CHECK_THROWS_AS(parse_assignment({"ab"}), Error);
  CHECK_THROWS_AS(parse_assignment({"=b"}), Error);
}

TEST_CASE("service endpoints") {
  const Service service(bundled());
  auto r = service.handle("GET", "/api/scenario", "");
  CHECK(r.status == 200);
  CHECK(json::parse(r.body)["t_j"] == 0.03);

  r = service.handle("POST", "/api/pml", R"({"assignment": {"license": "special"}})");
  REQUIRE(r.status == 200);
  const auto pml = Pml::from_json(r.body);
  CHECK(pml.values.size() == 625);
  CHECK(pml.assignment == dsl::Assignment{{"license", "special"}, {"time", "day"}});

  r = service.handle("POST", "/api/pml", R"({"assignment": {"weather": "rain"}})");
  CHECK(r.status == 400);
  CHECK(json::parse(r.body)["code"] == "UnknownParameter");
  r = service.handle("POST", "/api/pml", R"({"assignment": {"license": "pilot"}})");
  CHECK(r.status == 400);
  CHECK(json::parse(r.body)["code"] == "ValueNotInDomain");
  r = service.handle("POST", "/api/pml", "{oops");
  CHECK(r.status == 400);
  CHECK(json::parse(r.body)["code"] == "MalformedDocument");

  r = service.handle("POST", "/api/plan", R"({"assignment": {"license": "special"}})");
  REQUIRE(r.status == 200);
  const auto plan = json::parse(r.body);
  CHECK(plan["cleared"] == true);
  CHECK(plan["pml_digest"] == digest_of(pml.to_json()));

  r = service.handle("POST", "/api/plan", R"({"assignment": {"time": "night"}})");
  CHECK(r.status == 422);
  const auto infeasible = json::parse(r.body);
  CHECK(infeasible["code"] == "Infeasible");
  CHECK(infeasible["detail"]["J"] == "infeasible");

  r = service.handle("POST", "/api/plan", R"({"start": {"east": 5000, "north": 0}})");
  CHECK(r.status == 400);
  CHECK(json::parse(r.body)["code"] == "OutOfGrid");

  // Clearance of the returned path reproduces the plan's J.
  json clear_req = {{"assignment", plan["assignment"]}, {"path", plan}};
  r = service.handle("POST", "/api/clearance", clear_req.dump());
  REQUIRE(r.status == 200);
  const auto verdict = json::parse(r.body);
  CHECK(verdict["J"].get<double>() == doctest::Approx(plan["J"].get<double>()).epsilon(1e-12));
  CHECK(verdict["cleared"] == true);
  // The same path judged under the standard license.
  clear_req["assignment"] = {{"license", "standard"}};
  r = service.handle("POST", "/api/clearance", clear_req.dump());
  REQUIRE(r.status == 200);
  CHECK(json::parse(r.body)["J"].get<double>() >= verdict["J"].get<double>());
  r = service.handle("POST", "/api/clearance", R"({"assignment": {}})");
  CHECK(r.status == 400);

  r = service.handle("POST", "/api/explain", R"({"mode": "factorial"})");
  REQUIRE(r.status == 200);
  const auto report = json::parse(r.body);
  REQUIRE(report["rows"].size() == 4);
  int infeasible_rows = 0;
  for (const auto& row : report["rows"]) infeasible_rows += row["J"] == "infeasible";
  CHECK(infeasible_rows == 2);
  r = service.handle("POST", "/api/explain", R"({"mode": "sideways"})");
  CHECK(r.status == 400);
  r = service.handle("POST", "/api/explain", "{}");
  CHECK(json::parse(r.body)["rows"].size() == 2);

  r = service.handle("POST", "/api/optimize", "{}");
  REQUIRE(r.status == 200);
  const auto best = json::parse(r.body);
  CHECK(best["best_assignment"]["license"] == "special");
  CHECK(best["cleared"] == true);

  CHECK(service.handle("GET", "/api/nothing", "").status == 404);
  CHECK(service.handle("GET", "/api/pml", "").status == 405);
  CHECK(service.handle("POST", "/api/scenario", "").status == 405);
}

TEST_CASE("concurrent identical landscape requests agree") {
  const Service service(bundled());
  const std::string body = R"({"assignment": {"license": "special", "time": "night"}})";
  std::vector<std::string> bodies(8);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    threads.emplace_back([&, i] { bodies[i] = service.handle("POST", "/api/pml", body).body; });
  }
  for (auto& t : threads) t.join();
  for (const auto& b : bodies) CHECK(b == bodies[0]);
}

TEST_CASE("mission documents") {
  const dsl::Assignment a{{"license", "standard"}};
  const json bare = json::array({{{"east", 1.0}, {"north", 2.0}, {"yaw", 0.5}}});
  auto m = mission_from_json(bare, a);
  REQUIRE(m.via_points.size() == 1);
  CHECK(m.via_points[0].yaw == 0.5);
  CHECK(m.assignment == a);
  m = mission_from_json(json{{"via_points", bare}}, a);
  CHECK(m.via_points.size() == 1);
  m = mission_from_json(json{{"path", {{"via_points", bare}}}}, a);
  CHECK(m.via_points.size() == 1);
  CHECK_THROWS_AS(mission_from_json(json{{"x", 1}}, a), Error);
  CHECK_THROWS_AS(mission_from_json(json::array({{{"east", 1.0}}}), a), Error);
}

TEST_CASE("HTTP transport") {
  const Service service(bundled());
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread worker([&] { server.run(); });
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/scenario");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == service.handle("GET", "/api/scenario", "").body);
  res = client.Post("/api/pml", R"({"assignment": {"license": "pilot"}})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = client.Post("/api/plan", R"({"assignment": {"time": "night"}})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 422);
  server.stop();
  worker.join();
}

TEST_CASE("command-line tool") {
  const std::string pmd = PMD_CLI;
  const std::string dir = (std::filesystem::temp_directory_path() / "pmd_cli_test").string();
  std::filesystem::create_directories(dir);
  const Service service(bundled());
  int rc = -1;

  // Same documents as the service.
  const std::string pml_doc = run(pmd + " pml --scenario " + kScenario + " -a license=special --out " +
                                      dir + "/special.json",
                                  &rc);
  CHECK(rc == 0);
  CHECK(pml_doc == service.handle("POST", "/api/pml", R"({"assignment": {"license": "special"}})").body +
                       "\n");
  CHECK(std::filesystem::exists(dir + "/special.csv"));
  const std::string explain = run(pmd + " explain --scenario " + kScenario + " --mode factorial");
  CHECK(explain == service.handle("POST", "/api/explain", R"({"mode": "factorial"})").body + "\n");
  const std::string optimize = run(pmd + " optimize --scenario " + kScenario, &rc);
  CHECK(rc == 0);
  CHECK(optimize == service.handle("POST", "/api/optimize", "{}").body + "\n");

  run(pmd + " plan --scenario " + kScenario + " --pml " + dir + "/special.json --out " + dir +
          "/plan.json",
      &rc);
  CHECK(rc == 0);
  run(pmd + " clear --scenario " + kScenario + " --pml " + dir + "/special.json --path " + dir +
          "/plan.json",
      &rc);
  CHECK(rc == 0);

  // Standard license: planned, then denied.
  run(pmd + " pml --scenario " + kScenario + " --out " + dir + "/standard.json", &rc);
  run(pmd + " plan --scenario " + kScenario + " --pml " + dir + "/standard.json --out " + dir +
          "/plan_std.json",
      &rc);
  CHECK(rc == 0);
  run(pmd + " clear --scenario " + kScenario + " --pml " + dir + "/standard.json --path " + dir +
          "/plan_std.json",
      &rc);
  CHECK(rc == 2);
  // A path planned under one license cannot be cleared on the other's landscape.
  run(pmd + " clear --scenario " + kScenario + " --pml " + dir + "/standard.json --path " + dir +
          "/plan.json",
      &rc);
  CHECK(rc == 1);

  const std::string infeasible = run(pmd + " plan --scenario " + kScenario + " --pml " + dir +
                                         "/standard.json --t-p 1.0",
                                     &rc);
  CHECK(rc == 2);
  CHECK(json::parse(infeasible)["J"] == "infeasible");

  run(pmd + " pml --scenario " + kScenario + " -a license=pilot --out " + dir + "/x.json", &rc);
  CHECK(rc == 1);
  run(pmd + " frobnicate", &rc);
  CHECK(rc == 1);
  run("env -u PMD_OVERPASS_URL " + pmd + " fetch-map --bbox 1,2,3,4 --out " + dir + "/m.json", &rc);
  CHECK(rc == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("clear on an all-ones landscape") {
  const std::string pmd = PMD_CLI;
  const std::string dir = (std::filesystem::temp_directory_path() / "pmd_cli_ones").string();
  std::filesystem::create_directories(dir);
  Pml ones;
  ones.grid = bundled()->field().grid;
  ones.values.assign(ones.grid.size(), 1.0);
  ones.query = default_query();
  ones.assignment = bundled()->proposed();
  write_text(dir + "/ones.json", ones.to_json());
  write_text(dir + "/path.json", R"({"via_points": [{"east": 20, "north": 20}, {"east": 60, "north": 60}]})");
  int rc = -1;
  const auto out = run(pmd + " clear --scenario " + kScenario + " --pml " + dir +
                           "/ones.json --path " + dir + "/path.json",
                       &rc);
  CHECK(rc == 0);
  CHECK(json::parse(out)["J"] == 0.0);
  std::filesystem::remove_all(dir);
}
