#include "pmd/interface/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pmd/dsl/parser.hpp"
#include "pmd/error.hpp"
#include "pmd/json_io.hpp"

namespace pmd::interface {

using nlohmann::json;

namespace {

geo::LocalPoint point_from_json(const json& j) {
  return {j.at("east").get<double>(), j.at("north").get<double>()};
}

AffineNoiseModel noise_from_json(const json& j) {
  const double se = j.value("sigma_east", 0.0);
  const double sn = j.value("sigma_north", 0.0);
  const double rho = j.value("correlation", 0.0);
  AffineNoiseModel m;
  m.cov_ee = se * se;
  m.cov_nn = sn * sn;
  m.cov_en = rho * se * sn;
  m.rotation_sigma = j.value("rotation_sigma", 0.0);
  m.scale_sigma = j.value("scale_sigma", 0.0);
  m.check();
  return m;
}

void check_threshold(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, std::string(name) + " must be within [0, 1]");
  }
}

}  // namespace

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& file, std::string_view text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
}

Scenario Scenario::from_json(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = json_io::parse(text, "scenario");
  Scenario s;
  s.base_dir = base_dir;
  try {
    if (j.value("format", std::string()) != "pmd-scenario") {
      throw Error(ErrorCode::kMalformedDocument, "scenario: format must be \"pmd-scenario\"");
    }
    if (j.at("version").get<int>() != kScenarioVersion) {
      throw Error(ErrorCode::kMalformedDocument,
                  "scenario: unsupported version " + j.at("version").dump());
    }
    s.program_path = j.at("program").get<std::string>();
    s.map_path = j.at("map").get<std::string>();
    s.classes_path = j.value("classes", std::string());
    s.grid = json_io::grid_from_json(j.at("grid"));
    if (j.contains("noise")) {
      for (const auto& [cls, m] : j.at("noise").items()) s.noise[cls] = noise_from_json(m);
    }
    if (j.contains("sampling")) {
      s.sampling.sample_count = j.at("sampling").value("sample_count", s.sampling.sample_count);
      s.sampling.seed = j.at("sampling").value("seed", s.sampling.seed);
    }
    const json op = j.value("operator", json("start"));
    if (op.is_string()) {
      if (op.get<std::string>() != "start") {
        throw Error(ErrorCode::kMalformedDocument, "scenario: operator must be \"start\" or a point");
      }
    } else {
      s.operator_position = point_from_json(op);
    }
    s.start = point_from_json(j.at("start"));
    s.goal = point_from_json(j.at("goal"));
    s.t_j = j.value("t_j", s.t_j);
    s.t_p = j.value("t_p", s.t_p);
    if (j.contains("proposed")) s.proposed = j.at("proposed").get<dsl::Assignment>();
    if (j.contains("parameter_labels")) {
      s.parameter_labels = j.at("parameter_labels").get<std::map<std::string, std::string>>();
    }
    s.threads = j.value("threads", 1u);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("scenario: ") + e.what());
  }
  check_threshold(s.t_j, "t_j");
  check_threshold(s.t_p, "t_p");
  s.grid.check();
  if (s.sampling.sample_count < 2) {
    throw Error(ErrorCode::kInvalidConfig, "sample_count must be at least 2");
  }
  if (s.threads == 0) s.threads = 1;
  return s;
}

Scenario Scenario::load(const std::filesystem::path& file) {
  return from_json(read_text(file), file.parent_path());
}

std::filesystem::path Scenario::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

std::shared_ptr<const Engine> Engine::load(const Scenario& scenario) {
  auto e = std::make_shared<Engine>();
  e->scenario_ = scenario;
  e->program_ = dsl::parse(read_text(scenario.resolve(scenario.program_path)));
  for (const auto& [k, v] : scenario.parameter_labels) e->program_.parameter_labels[k] = v;

  const auto mapping = scenario.classes_path.empty()
                           ? geo::ClassMapping::defaults()
                           : geo::ClassMapping::from_json(
                                 read_text(scenario.resolve(scenario.classes_path)));
  e->layer_ = geo::ingest_overpass(read_text(scenario.resolve(scenario.map_path)), mapping,
                                   scenario.grid.origin);
  e->layer_.features.push_back({"operator", geo::kOperatorClass,
                                geo::PointGeometry{scenario.operator_position.value_or(scenario.start)}});

  RelationRequest req;
  std::set<std::string> classes{geo::kOperatorClass};
  for (const auto& r : mapping.rules()) {
    classes.insert(r.feature_class);
    if (r.buffer_width > 0.0 && !req.buffer_widths.contains(r.feature_class)) {
      req.buffer_widths[r.feature_class] = r.buffer_width;
    }
  }
  req.classes.assign(classes.begin(), classes.end());
  for (const auto& [cls, m] : scenario.noise) {
    if (cls != geo::kOperatorClass) req.noise[cls] = m;
  }
  req.sampling = scenario.sampling;
  req.threads = scenario.threads;
  e->field_ = std::make_shared<const RelationField>(
      estimate_relations(e->layer_, scenario.grid, req));
  e->cache_ = std::make_shared<PmlCache>(ComputeOptions{scenario.threads});

  // Fail early on proposals that do not fit the program.
  ceo::complete_assignment(e->program_, scenario.proposed);
  return e;
}

ceo::Problem Engine::problem() const {
  ceo::Problem p;
  p.program = program_;
  p.field = field_;
  p.cache = cache_;
  p.start = scenario_.start;
  p.goal = scenario_.goal;
  p.t_p = scenario_.t_p;
  p.t_j = scenario_.t_j;
  return p;
}

dsl::Assignment Engine::proposed() const {
  return ceo::complete_assignment(program_, scenario_.proposed);
}

std::shared_ptr<const Pml> Engine::pml(const dsl::Assignment& assignment) const {
  return cache_->get(program_, *field_, assignment);
}

std::string Engine::summary_json() const {
  json params = json::array();
  for (const auto& p : dsl::identify_parameters(program_).parameters) {
    params.push_back({{"name", p.name}, {"domain", p.domain}, {"current", p.current}});
  }
  const auto point = [](geo::LocalPoint p) { return json{{"east", p.east}, {"north", p.north}}; };
  const json j = {{"parameters", params},
                  {"proposed", proposed()},
                  {"grid", json_io::grid_to_json(scenario_.grid)},
                  {"t_j", scenario_.t_j},
                  {"t_p", scenario_.t_p},
                  {"start", point(scenario_.start)},
                  {"goal", point(scenario_.goal)},
                  {"operator", point(scenario_.operator_position.value_or(scenario_.start))},
                  {"sampling",
                   {{"sample_count", scenario_.sampling.sample_count},
                    {"seed", scenario_.sampling.seed}}},
                  {"program_digest", program_digest(program_)},
                  {"field_digest", field_->digest()}};
  return j.dump();
}

dsl::Assignment parse_assignment(const std::vector<std::string>& pairs) {
  dsl::Assignment a;
  for (const auto& s : pairs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw Error(ErrorCode::kValidationError, "expected name=value, got '" + s + "'");
    }
    a[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return a;
}

}  // namespace pmd::interface
