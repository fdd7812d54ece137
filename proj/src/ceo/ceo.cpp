#include "pmd/ceo/ceo.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "pmd/digest.hpp"
#include "pmd/error.hpp"

namespace pmd::ceo {

using nlohmann::json;

namespace {

// J within this of t_j counts as equal, so the strict test does not hinge on
// the last bits of the mean.
constexpr double kClearanceSlack = 1e-12;

bool below(double J, double t_j) { return J < t_j - kClearanceSlack; }

}  // namespace

Mission mission_from_path(const Path& path, const dsl::Assignment& assignment) {
  Mission m;
  m.assignment = assignment;
  for (const auto& p : path.via_points) m.via_points.push_back({p, 0.0, {}});
  return m;
}

ClearanceVerdict clearance(const Mission& mission, const Pml& pml, double t_j) {
  if (mission.via_points.empty()) {
    throw Error(ErrorCode::kValidationError, "mission has no via-points");
  }
  if (mission.assignment != pml.assignment) {
    throw Error(ErrorCode::kAssignmentMismatch,
                "mission assignment {" + dsl::to_string(mission.assignment) +
                    "} does not match the landscape's {" + dsl::to_string(pml.assignment) + "}");
  }
  ClearanceVerdict v;
  v.t_j = t_j;
  double sum = 0.0;
  for (const auto& p : mission.via_points) {
    if (!(p.yaw >= -std::numbers::pi && p.yaw < std::numbers::pi)) {
      throw Error(ErrorCode::kValidationError, "yaw must be within [-pi, pi)");
    }
    for (const auto& [k, value] : p.labels) {
      const auto it = mission.assignment.find(k);
      if (it == mission.assignment.end() || it->second != value) {
        throw Error(ErrorCode::kAssignmentMismatch,
                    "via-point label " + k + "=" + value + " disagrees with the mission");
      }
    }
    const Cell c = pml.grid.snap(p.position);
    const double prob = pml.at(c);
    v.per_point.push_back({c, prob});
    sum += 1.0 - prob;
  }
  v.J = sum / static_cast<double>(mission.via_points.size());
  v.cleared = below(v.J, t_j);
  return v;
}

dsl::Assignment complete_assignment(const dsl::Program& program,
                                    const dsl::Assignment& assignment) {
  return dsl::identify_parameters(dsl::reassign(program, assignment)).current();
}

PlanOutcome plan_on(std::shared_ptr<const Pml> pml, geo::LocalPoint start, geo::LocalPoint goal,
                    double t_p, double t_j) {
  PlanOutcome out;
  out.assignment = pml->assignment;
  const Cell s = pml->grid.snap(start);
  const Cell g = pml->grid.snap(goal);
  out.pml = std::move(pml);
  out.path = shortest_path(build_graph(*out.pml, t_p), s, g);
  if (out.path) {
    out.J = path_cost(*out.path, *out.pml);
    out.cleared = below(*out.J, t_j);
  }
  return out;
}

PlanOutcome plan(const Problem& problem, const dsl::Assignment& assignment) {
  const auto complete = complete_assignment(problem.program, assignment);
  const Grid& grid = problem.field->grid;
  grid.snap(problem.start);
  grid.snap(problem.goal);
  try {
    auto pml = problem.cache
                   ? problem.cache->get(problem.program, *problem.field, complete, problem.query)
                   : std::make_shared<const Pml>(
                         compute_pml(problem.program, *problem.field, complete, problem.query));
    return plan_on(std::move(pml), problem.start, problem.goal, problem.t_p, problem.t_j);
  } catch (const Error& e) {
    PlanOutcome out;
    out.assignment = complete;
    out.error = e.what();
    out.error_code = to_string(e.code());
    return out;
  }
}

std::string to_string(ExplainMode mode) {
  return mode == ExplainMode::kOneAtATime ? "one-at-a-time" : "full-factorial";
}

std::optional<ExplainMode> parse_mode(std::string_view text) {
  if (text == "oat" || text == "one-at-a-time") return ExplainMode::kOneAtATime;
  if (text == "factorial" || text == "full-factorial") return ExplainMode::kFullFactorial;
  return std::nullopt;
}

namespace {

ExplanationRow row_of(const PlanOutcome& o) {
  ExplanationRow r;
  r.assignment = o.assignment;
  r.J = o.J;
  r.cleared = o.cleared;
  r.error = o.error;
  if (o.path) r.path_digest = o.path->digest();
  return r;
}

json row_json(const ExplanationRow& r) {
  json j;
  j["assignment"] = r.assignment;
  if (r.J) {
    j["J"] = *r.J;
  } else {
    j["J"] = r.error.empty() ? json("infeasible") : json(nullptr);
  }
  j["delta_J"] = r.delta_J ? json(*r.delta_J) : json(nullptr);
  j["path_digest"] = r.path_digest.empty() ? json(nullptr) : json(r.path_digest);
  j["cleared"] = r.cleared;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json path_json(const Path& path) {
  json points = json::array();
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    points.push_back({{"row", path.cells[i].row},
                      {"col", path.cells[i].col},
                      {"east", path.via_points[i].east},
                      {"north", path.via_points[i].north}});
  }
  return {{"via_points", points}, {"total_weight", path.total_weight}, {"path_digest", path.digest()}};
}

}  // namespace

ExplanationReport explain(const Problem& problem, const dsl::Assignment& proposed,
                          ExplainMode mode) {
  ExplanationReport report;
  report.mode = mode;
  const PlanOutcome base = plan(problem, proposed);
  report.proposed = row_of(base);

  std::vector<dsl::Assignment> variants;
  const auto space = dsl::identify_parameters(problem.program);
  if (mode == ExplainMode::kFullFactorial) {
    variants = space.enumerate();
  } else {
    for (const auto& p : space.parameters) {
      for (const auto& value : p.domain) {
        if (value == base.assignment.at(p.name)) continue;
        dsl::Assignment a = base.assignment;
        a[p.name] = value;
        variants.push_back(std::move(a));
      }
    }
  }
  if (space.parameters.empty()) variants.clear();
  for (const auto& a : variants) {
    ExplanationRow row = row_of(plan(problem, a));
    if (row.J && report.proposed.J) row.delta_J = *row.J - *report.proposed.J;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string ExplanationReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) rows_json.push_back(row_json(r));
  const json j = {{"mode", to_string(mode)}, {"proposed", row_json(proposed)}, {"rows", rows_json}};
  return j.dump();
}

OptimizationResult optimize(const Problem& problem) {
  OptimizationResult result;
  for (const auto& a : dsl::identify_parameters(problem.program).enumerate()) {
    const PlanOutcome o = plan(problem, a);
    ++result.evaluated;
    if (!o.error.empty()) {
      result.skipped.push_back({o.assignment, o.error});
      continue;
    }
    if (!o.J) continue;
    if (!result.feasible || *o.J < result.best_J) {
      result.feasible = true;
      result.best_J = *o.J;
      result.best_assignment = o.assignment;
      result.best_path = o.path;
      result.cleared = o.cleared;
    }
  }
  return result;
}

std::string OptimizationResult::to_json() const {
  json j;
  j["feasible"] = feasible;
  j["evaluated"] = evaluated;
  json sk = json::array();
  for (const auto& [a, e] : skipped) sk.push_back({{"assignment", a}, {"error", e}});
  j["skipped"] = sk;
  if (feasible) {
    j["best_assignment"] = best_assignment;
    j["best_J"] = best_J;
    j["cleared"] = cleared;
    j["best_path"] = path_json(*best_path);
  } else {
    j["best_assignment"] = nullptr;
    j["best_J"] = "infeasible";
    j["cleared"] = false;
    j["best_path"] = nullptr;
  }
  return j.dump();
}

std::string plan_document(const PlanOutcome& outcome, double t_j) {
  json j;
  j["assignment"] = outcome.assignment;
  j["feasible"] = outcome.feasible();
  j["t_j"] = t_j;
  j["pml_digest"] = outcome.pml ? json(digest_of(outcome.pml->to_json())) : json(nullptr);
  if (outcome.path) {
    j["path"] = path_json(*outcome.path);
    j["J"] = *outcome.J;
    j["cleared"] = outcome.cleared;
  } else {
    j["path"] = nullptr;
    j["J"] = "infeasible";
    j["cleared"] = false;
  }
  if (!outcome.error.empty()) j["error"] = outcome.error;
  return j.dump();
}

std::string verdict_document(const ClearanceVerdict& verdict, const Pml& pml) {
  json points = json::array();
  for (const auto& p : verdict.per_point) {
    points.push_back({{"row", p.cell.row}, {"col", p.cell.col}, {"probability", p.probability}});
  }
  const json j = {{"J", verdict.J},
                  {"t_j", verdict.t_j},
                  {"cleared", verdict.cleared},
                  {"per_point", points},
                  {"assignment", pml.assignment},
                  {"pml_digest", digest_of(pml.to_json())}};
  return j.dump();
}

}  // namespace pmd::ceo
