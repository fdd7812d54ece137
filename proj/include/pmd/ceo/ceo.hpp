#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmd/dsl/parameters.hpp"
#include "pmd/landscape/pml.hpp"
#include "pmd/planner/planner.hpp"

namespace pmd::ceo {

/// One via-point of a mission. `labels` optionally repeats the parameter
/// values the point is flown under; they must agree with the mission's
/// assignment.
struct ViaPoint {
  geo::LocalPoint position;
  double yaw = 0.0;  // radians, [-pi, pi); carried but not scored
  dsl::Assignment labels;
};

struct Mission {
  std::vector<ViaPoint> via_points;
  dsl::Assignment assignment;
};

/// Mission flying the cell centers of `path` under `assignment`.
Mission mission_from_path(const Path& path, const dsl::Assignment& assignment);

struct PointScore {
  Cell cell;
  double probability = 0.0;
};

struct ClearanceVerdict {
  double J = 0.0;
  double t_j = 0.0;
  bool cleared = false;
  std::vector<PointScore> per_point;
};

/// J over the mission's via-points snapped to cells; cleared iff J < t_j
/// (J within 1e-12 of t_j is not below it).
/// Throws Error(kAssignmentMismatch) when the mission and the PML were made
/// for different parameters, Error(kOutOfGrid) for via-points off the grid,
/// Error(kValidationError) for an empty mission or a yaw outside [-pi, pi).
ClearanceVerdict clearance(const Mission& mission, const Pml& pml, double t_j);

/// Everything needed to plan under any assignment.
struct Problem {
  dsl::Program program;
  std::shared_ptr<const RelationField> field;
  std::shared_ptr<PmlCache> cache;
  geo::LocalPoint start;
  geo::LocalPoint goal;
  double t_p = 0.5;
  double t_j = 0.1;
  dsl::Atom query = default_query();
};

/// Outcome of planning under one assignment. `path` is empty when the
/// instance is infeasible or the computation failed (then `error` is set).
struct PlanOutcome {
  dsl::Assignment assignment;  // complete, after defaults
  std::shared_ptr<const Pml> pml;
  std::optional<Path> path;
  std::optional<double> J;
  bool cleared = false;
  std::string error;
  std::string error_code;

  bool feasible() const { return path.has_value(); }
};

/// Completes a partial assignment with the program's current values.
/// Throws Error(kUnknownParameter) / Error(kValueNotInDomain).
dsl::Assignment complete_assignment(const dsl::Program& program,
                                    const dsl::Assignment& assignment);

/// Computes (or fetches) the PML for `assignment` and plans start -> goal.
/// Throws for invalid assignments and off-grid endpoints; compute errors are
/// recorded in the outcome.
PlanOutcome plan(const Problem& problem, const dsl::Assignment& assignment);

/// Plans start -> goal on a given landscape; the outcome carries its
/// assignment. Throws Error(kOutOfGrid) for endpoints off the grid.
PlanOutcome plan_on(std::shared_ptr<const Pml> pml, geo::LocalPoint start, geo::LocalPoint goal,
                    double t_p, double t_j);

enum class ExplainMode { kOneAtATime, kFullFactorial };

std::string to_string(ExplainMode mode);
/// Accepts "oat"/"one-at-a-time" and "factorial"/"full-factorial".
std::optional<ExplainMode> parse_mode(std::string_view text);

struct ExplanationRow {
  dsl::Assignment assignment;
  std::optional<double> J;        // empty: infeasible or failed
  std::optional<double> delta_J;  // J - J(proposed), when both exist
  std::string path_digest;
  bool cleared = false;
  std::string error;
};

struct ExplanationReport {
  ExplainMode mode = ExplainMode::kOneAtATime;
  ExplanationRow proposed;
  std::vector<ExplanationRow> rows;

  std::string to_json() const;
};

/// One-at-a-time: one row per alternative value of each parameter, others
/// held at the proposed values. Full factorial: one row per assignment in
/// enumeration order (the proposed one included).
ExplanationReport explain(const Problem& problem, const dsl::Assignment& proposed,
                          ExplainMode mode);

struct OptimizationResult {
  bool feasible = false;
  dsl::Assignment best_assignment;
  std::optional<Path> best_path;
  double best_J = 0.0;
  bool cleared = false;
  std::size_t evaluated = 0;
  /// Assignments whose computation failed, with the error message.
  std::vector<std::pair<dsl::Assignment, std::string>> skipped;

  std::string to_json() const;
};

/// Exhaustive search over every assignment; the first minimum in
/// enumeration order wins ties.
OptimizationResult optimize(const Problem& problem);

/// Documents shared by the command-line tool and the service.
std::string plan_document(const PlanOutcome& outcome, double t_j);
std::string verdict_document(const ClearanceVerdict& verdict, const Pml& pml);

}  // namespace pmd::ceo
