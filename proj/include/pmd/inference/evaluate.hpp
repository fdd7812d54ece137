#pragma once

#include <cstdint>
#include <vector>

#include "pmd/inference/ground.hpp"

namespace pmd::inference {

/// Standard normal CDF.
double normal_cdf(double z);

/// Probabilities of the K+1 intervals (-inf, t0], (t0, t1], ..., (tK-1, inf)
/// induced by the source's thresholds.
std::vector<double> interval_probabilities(const ContinuousSource& source);

/// One value per source of the ground program (see value_count).
struct World {
  std::vector<std::size_t> values;
};

double world_probability(const GroundProgram& gp, const World& world);

/// Truth of the ground query in `world`.
bool evaluate_world(const GroundProgram& gp, const World& world);
/// Truth of an arbitrary ground atom; atoms the program never mentions are
/// false.
bool evaluate_world(const GroundProgram& gp, const World& world, const dsl::Atom& query);

inline constexpr std::uint64_t kDefaultWorldLimit = 1'000'000;

/// Exact probability of the query by enumerating every world of non-zero
/// probability. Throws Error(kWorldCountExceeded) when the world product
/// exceeds `world_limit`.
double query_probability(const GroundProgram& gp,
                         std::uint64_t world_limit = kDefaultWorldLimit);

}  // namespace pmd::inference
