#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "pmd/ceo/ceo.hpp"
#include "pmd/geodata/map.hpp"

namespace pmd::interface {

inline constexpr int kScenarioVersion = 1;

/// Scenario file, format "pmd-scenario" version 1. Paths are relative to
/// the file's directory.
///
///   {"format": "pmd-scenario", "version": 1,
///    "program": "mission.pl", "map": "map.json", "classes": "classes.json",
///    "grid": {"origin": {"lat", "lon"}, "width_cells", "height_cells", "cell_size"},
///    "noise": {"park": {"sigma_east": 10, "sigma_north": 10,
///                       "correlation": 0, "rotation_sigma": 0, "scale_sigma": 0}},
///    "sampling": {"sample_count": 100, "seed": 7},
///    "operator": "start" | {"east", "north"},
///    "start": {"east", "north"}, "goal": {"east", "north"},
///    "t_j": 0.05, "t_p": 0.5,
///    "proposed": {"license": "standard"},
///    "parameter_labels": {"standard": "license"},
///    "threads": 4}
struct Scenario {
  std::filesystem::path base_dir;
  std::string program_path;
  std::string map_path;
  std::string classes_path;
  Grid grid;
  std::map<std::string, AffineNoiseModel> noise;
  SampleConfig sampling;
  std::optional<geo::LocalPoint> operator_position;  // empty: the start point
  geo::LocalPoint start;
  geo::LocalPoint goal;
  double t_j = 0.1;
  double t_p = 0.5;
  dsl::Assignment proposed;
  std::map<std::string, std::string> parameter_labels;
  unsigned threads = 1;

  /// Throws Error(kMalformedDocument) / Error(kInvalidConfig).
  static Scenario from_json(std::string_view text, const std::filesystem::path& base_dir);
  /// Throws Error(kIoError) plus everything from_json throws.
  static Scenario load(const std::filesystem::path& file);

  std::filesystem::path resolve(const std::string& relative) const;
};

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, std::string_view text);

/// A scenario with its program parsed, map ingested, relation field
/// estimated and a shared landscape cache. Immutable apart from the cache.
class Engine {
 public:
  static std::shared_ptr<const Engine> load(const Scenario& scenario);

  const Scenario& scenario() const noexcept { return scenario_; }
  const dsl::Program& program() const noexcept { return program_; }
  const geo::MapLayer& layer() const noexcept { return layer_; }
  const RelationField& field() const noexcept { return *field_; }
  const std::shared_ptr<PmlCache>& cache() const noexcept { return cache_; }

  /// Planning problem over the scenario's start, goal and thresholds.
  ceo::Problem problem() const;
  /// Proposed assignment completed with the program defaults.
  dsl::Assignment proposed() const;
  std::shared_ptr<const Pml> pml(const dsl::Assignment& assignment) const;

  /// Parameter space, grid, thresholds, start and goal.
  std::string summary_json() const;

 private:
  Scenario scenario_;
  dsl::Program program_;
  geo::MapLayer layer_;
  std::shared_ptr<const RelationField> field_;
  std::shared_ptr<PmlCache> cache_;
};

/// "k=v" strings into an assignment. Throws Error(kValidationError).
dsl::Assignment parse_assignment(const std::vector<std::string>& pairs);

}  // namespace pmd::interface
