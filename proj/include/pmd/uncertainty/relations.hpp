#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pmd/geodata/map.hpp"
#include "pmd/uncertainty/grid.hpp"
#include "pmd/uncertainty/rng.hpp"

namespace pmd {

/// Rigid-plus-scale perturbation of one map feature per sample: rotation
/// and isotropic scale about the vertex centroid, then a Gaussian
/// translation.
struct AffineNoiseModel {
  // Translation covariance in m^2, symmetric.
  double cov_ee = 0.0;
  double cov_en = 0.0;
  double cov_nn = 0.0;
  double rotation_sigma = 0.0;  // radians
  double scale_sigma = 0.0;     // dimensionless, mean scale 1

  static AffineNoiseModel translation(double sigma_east, double sigma_north) {
    return {sigma_east * sigma_east, 0.0, sigma_north * sigma_north, 0.0, 0.0};
  }

  bool is_zero() const noexcept {
    return cov_ee == 0.0 && cov_en == 0.0 && cov_nn == 0.0 && rotation_sigma == 0.0 &&
           scale_sigma == 0.0;
  }
  /// Throws Error(kInvalidConfig) unless the covariance is PSD and the
  /// sigmas are non-negative.
  void check() const;

  friend bool operator==(const AffineNoiseModel&, const AffineNoiseModel&) = default;
};

/// Applies one draw of `model` to every vertex of `f`. Four normals are
/// consumed from `stream` regardless of the model, in the order rotation,
/// scale, translation east, translation north.
geo::Feature sample_feature(const geo::Feature& f, const AffineNoiseModel& model,
                            mc::NormalStream& stream);

struct SampleConfig {
  std::size_t sample_count = 100;
  std::uint64_t seed = 0;
};

/// Floor applied to per-cell distance variance.
inline constexpr double kVarianceFloor = 1e-12;

struct ClassRasters {
  std::vector<double> distance_mean;  // meters; +inf when the class is empty
  std::vector<double> distance_var;   // m^2, >= kVarianceFloor
  std::vector<double> over_prob;      // [0, 1]

  friend bool operator==(const ClassRasters&, const ClassRasters&) = default;
};

struct RelationField {
  Grid grid;
  std::vector<std::string> classes;
  std::map<std::string, ClassRasters> rasters;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
  std::string noise_digest;

  bool has_class(std::string_view c) const { return rasters.contains(std::string(c)); }
  const ClassRasters& of(std::string_view c) const;

  /// Structured-text document; doubles use shortest round-trip form and
  /// +inf distances are written as null.
  std::string to_json() const;
  /// Throws Error(kMalformedDocument) / Error(kDimensionMismatch).
  static RelationField from_json(std::string_view text);
  std::string digest() const;

  friend bool operator==(const RelationField&, const RelationField&) = default;
};

struct RelationRequest {
  std::vector<std::string> classes;
  /// Missing classes are treated as noise-free.
  std::map<std::string, AffineNoiseModel> noise;
  /// Buffer widths for evaluating `over` on polyline classes; 0 or missing
  /// means polylines of that class are never "over".
  std::map<std::string, double> buffer_widths;
  SampleConfig sampling;
  /// Worker threads for the per-cell pass; output does not depend on it.
  unsigned threads = 1;
};

/// Monte-Carlo estimate of the `distance` and `over` relation parameters at
/// every cell center. Each feature is perturbed once per sample, and that
/// draw is shared by all cells. Bit-reproducible for a given request.
///
/// Throws Error(kEmptyGrid), Error(kInvalidConfig).
RelationField estimate_relations(const geo::MapLayer& layer, const Grid& grid,
                                 const RelationRequest& request);

}  // namespace pmd
