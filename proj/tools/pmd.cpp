// pmd: command-line front end for the mission landscape engine.
//
// Exit codes: 0 success / cleared, 1 usage or input error, 2 denied or
// infeasible, 3 compute error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "pmd/ceo/ceo.hpp"
#include "pmd/error.hpp"
#include "pmd/interface/documents.hpp"
#include "pmd/interface/scenario.hpp"
#include "pmd/interface/service.hpp"

using namespace pmd;
using namespace pmd::interface;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDenied = 2;
constexpr int kExitCompute = 3;

void log(const std::string& msg) { std::cerr << "pmd: " << msg << "\n"; }

std::optional<geo::LocalPoint> parse_point(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorCode::kValidationError, "expected east,north, got '" + text + "'");
  }
  try {
    return geo::LocalPoint{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::kValidationError, "expected east,north, got '" + text + "'");
  }
}

struct Common {
  std::string scenario;
  std::vector<std::string> assignment;
  std::string start;
  std::string goal;
  std::optional<double> t_p;
  std::optional<double> t_j;
};

std::shared_ptr<const Engine> load_engine(const Common& c) {
  auto s = Scenario::load(c.scenario);
  if (c.t_p) s.t_p = *c.t_p;
  if (c.t_j) s.t_j = *c.t_j;
  if (auto p = parse_point(c.start)) s.start = *p;
  if (auto p = parse_point(c.goal)) s.goal = *p;
  log("estimating relations (" + std::to_string(s.sampling.sample_count) + " samples)");
  return Engine::load(s);
}

dsl::Assignment requested(const Engine& e, const Common& c) {
  auto a = e.scenario().proposed;
  for (const auto& [k, v] : parse_assignment(c.assignment)) a[k] = v;
  return ceo::complete_assignment(e.program(), a);
}

int exit_for(const Error& e) {
  if (e.code() == ErrorCode::kIoError) return kExitUsage;
  return status_for(e.code()) == 400 ? kExitUsage : kExitCompute;
}

void add_scenario(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "scenario file")->required()->check(CLI::ExistingFile);
}

void add_assignment(CLI::App* cmd, Common& c) {
  cmd->add_option("--assignment,-a", c.assignment, "parameter setting name=value (repeatable)");
}

void add_endpoints(CLI::App* cmd, Common& c) {
  cmd->add_option("--start", c.start, "start point east,north (meters)");
  cmd->add_option("--goal", c.goal, "goal point east,north (meters)");
  cmd->add_option("--t-p", c.t_p, "admissibility threshold")->check(CLI::Range(0.0, 1.0));
}

std::string with_extension(const std::string& path, const std::string& ext) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
  return path.substr(0, dot) + ext;
}

int fetch_map(const std::string& bbox_text, const std::string& classes, const std::string& out) {
  const char* url = std::getenv("PMD_OVERPASS_URL");
  if (url == nullptr || *url == '\0') {
    log("PMD_OVERPASS_URL is not set");
    return kExitUsage;
  }
  geo::BoundingBox bbox;
  if (std::sscanf(bbox_text.c_str(), "%lf,%lf,%lf,%lf", &bbox.south, &bbox.west, &bbox.north,
                  &bbox.east) != 4) {
    log("--bbox must be south,west,north,east");
    return kExitUsage;
  }
  const auto mapping = classes.empty() ? geo::ClassMapping::defaults()
                                       : geo::ClassMapping::from_json(read_text(classes));
  // http://host[:port]/path
  const std::string endpoint(url);
  const auto scheme_end = endpoint.find("://");
  const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string base = endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
  httplib::Client client(base);
  client.set_read_timeout(180, 0);
  const httplib::Params params{{"data", geo::overpass_query(mapping, bbox)}};
  const auto res = client.Post(path, params);
  if (!res || res->status != 200) {
    log("Overpass request failed" + (res ? " with status " + std::to_string(res->status) : ""));
    return kExitCompute;
  }
  write_text(out, res->body);
  std::cout << nlohmann::json{{"map", out}, {"bytes", res->body.size()}}.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic mission landscapes: compute, plan, clear, explain, optimize"};
  app.require_subcommand(1);

  Common c;
  std::string out, csv, pml_file, path_file, mode = "oat", host = "127.0.0.1", bbox, classes;
  int port = 8080;

  auto* pml_cmd = app.add_subcommand("pml", "compute a landscape and save it with a CSV export");
  add_scenario(pml_cmd, c);
  add_assignment(pml_cmd, c);
  pml_cmd->add_option("--out", out, "landscape document to write")->required();
  pml_cmd->add_option("--csv", csv, "CSV export (default: --out with .csv)");

  auto* plan_cmd = app.add_subcommand("plan", "plan the optimal path on a landscape");
  add_scenario(plan_cmd, c);
  add_assignment(plan_cmd, c);
  add_endpoints(plan_cmd, c);
  plan_cmd->add_option("--pml", pml_file, "landscape document (computed when omitted)");
  plan_cmd->add_option("--out", out, "also write the plan document here");

  auto* clear_cmd = app.add_subcommand("clear", "clearance verdict for a path");
  add_scenario(clear_cmd, c);
  clear_cmd->add_option("--pml", pml_file, "landscape document")->required();
  clear_cmd->add_option("--path", path_file, "plan or path document")->required();
  clear_cmd->add_option("--t-j", c.t_j, "clearance threshold")->check(CLI::Range(0.0, 1.0));

  auto* explain_cmd = app.add_subcommand("explain", "what-if report over mission parameters");
  add_scenario(explain_cmd, c);
  add_assignment(explain_cmd, c);
  add_endpoints(explain_cmd, c);
  explain_cmd->add_option("--mode", mode, "oat or factorial")
      ->check(CLI::IsMember({"oat", "one-at-a-time", "factorial", "full-factorial"}));

  auto* optimize_cmd = app.add_subcommand("optimize", "best assignment and path");
  add_scenario(optimize_cmd, c);
  add_endpoints(optimize_cmd, c);

  auto* serve_cmd = app.add_subcommand("serve", "HTTP service over the scenario");
  add_scenario(serve_cmd, c);
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "bind address");

  auto* fetch_cmd = app.add_subcommand("fetch-map", "download map data from an Overpass endpoint");
  fetch_cmd->add_option("--bbox", bbox, "south,west,north,east in degrees")->required();
  fetch_cmd->add_option("--classes", classes, "class mapping (default rules when omitted)");
  fetch_cmd->add_option("--out", out, "Overpass JSON to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fetch_cmd) return fetch_map(bbox, classes, out);

    const auto engine = load_engine(c);
    const Engine& e = *engine;

    if (*pml_cmd) {
      const auto pml = e.pml(requested(e, c));
      const std::string doc = pml->to_json();
      write_text(out, doc);
      const std::string csv_path = csv.empty() ? with_extension(out, ".csv") : csv;
      write_text(csv_path, pml->to_csv());
      std::cout << doc << "\n";
      log("wrote " + out + " and " + csv_path);
      return 0;
    }
    if (*plan_cmd) {
      ceo::PlanOutcome outcome;
      if (pml_file.empty()) {
        outcome = ceo::plan(e.problem(), requested(e, c));
        if (!outcome.error.empty()) {
          log(outcome.error_code + ": " + outcome.error);
          return kExitCompute;
        }
      } else {
        auto pml = std::make_shared<const Pml>(Pml::from_json(read_text(pml_file)));
        outcome = ceo::plan_on(std::move(pml), e.scenario().start, e.scenario().goal,
                               e.scenario().t_p, e.scenario().t_j);
      }
      const std::string doc = ceo::plan_document(outcome, e.scenario().t_j);
      if (!out.empty()) write_text(out, doc);
      std::cout << doc << "\n";
      if (!outcome.feasible()) {
        log("infeasible");
        return kExitDenied;
      }
      return 0;
    }
    if (*clear_cmd) {
      const Pml pml = Pml::from_json(read_text(pml_file));
      const auto path_doc = nlohmann::json::parse(read_text(path_file), nullptr, false);
      if (path_doc.is_discarded()) throw Error(ErrorCode::kMalformedDocument, "path: not JSON");
      dsl::Assignment a = pml.assignment;
      if (path_doc.is_object() && path_doc.contains("assignment")) {
        a = path_doc["assignment"].get<dsl::Assignment>();
      }
      const auto verdict = ceo::clearance(mission_from_json(path_doc, a), pml, e.scenario().t_j);
      std::cout << ceo::verdict_document(verdict, pml) << "\n";
      log(verdict.cleared ? "cleared" : "denied");
      return verdict.cleared ? 0 : kExitDenied;
    }
    if (*explain_cmd) {
      const auto m = ceo::parse_mode(mode);
      std::cout << ceo::explain(e.problem(), requested(e, c), *m).to_json() << "\n";
      return 0;
    }
    if (*optimize_cmd) {
      const auto result = ceo::optimize(e.problem());
      std::cout << result.to_json() << "\n";
      return result.feasible ? 0 : kExitDenied;
    }
    if (*serve_cmd) {
      const Service service(engine);
      HttpServer server(service);
      const int bound = server.bind(host, port);
      if (bound < 0) {
        log("cannot bind " + host + ":" + std::to_string(port));
        return kExitUsage;
      }
      log("serving on http://" + host + ":" + std::to_string(bound));
      return server.run() ? 0 : kExitCompute;
    }
  } catch (const Error& err) {
    log(std::string(to_string(err.code())) + ": " + err.what());
    return exit_for(err);
  } catch (const std::exception& err) {
    log(err.what());
    return kExitCompute;
  }
  return kExitUsage;
}
