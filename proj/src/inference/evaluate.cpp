#include "pmd/inference/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pmd/error.hpp"

namespace pmd::inference {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

std::vector<double> interval_probabilities(const ContinuousSource& source) {
  const auto& t = source.thresholds;
  const std::size_t k_max = t.size();
  std::vector<double> out(k_max + 1, 0.0);
  if (!(source.sigma > 0.0) || !std::isfinite(source.mu) || !std::isfinite(source.sigma)) {
    // Point mass at mu.
    std::size_t k = 0;
    while (k < k_max && !(source.mu <= t[k])) ++k;
    out[k] = 1.0;
    return out;
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double lo = k == 0 ? -inf : (t[k - 1] - source.mu) / source.sigma;
    const double hi = k == k_max ? inf : (t[k] - source.mu) / source.sigma;
    // Subtract in whichever tail keeps the operands small.
    const double p = lo >= 0.0 ? upper_tail(lo) - upper_tail(hi) : normal_cdf(hi) - normal_cdf(lo);
    out[k] = std::max(0.0, p);
  }
  return out;
}

std::vector<double> value_probabilities(const Source& s) {
  return std::visit(
      [](const auto& src) -> std::vector<double> {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, ContinuousSource>) {
          return interval_probabilities(src);
        } else if constexpr (std::is_same_v<S, BernoulliSource>) {
          return {1.0 - src.p, src.p};
        } else {
          std::vector<double> out;
          for (const auto& [p, atom] : src.alternatives) out.push_back(p);
          if (src.residual > 0.0) out.push_back(src.residual);
          return out;
        }
      },
      s);
}

double world_probability(const GroundProgram& gp, const World& world) {
  double p = 1.0;
  for (std::size_t i = 0; i < gp.sources.size(); ++i) {
    p *= value_probabilities(gp.sources[i]).at(world.values.at(i));
  }
  return p;
}

namespace {

bool holds(const GroundLiteral& lit, const std::vector<std::size_t>& values,
           const std::vector<char>& truth) {
  switch (lit.kind) {
    case GroundLiteral::Kind::kPositive:
      return truth[lit.atom] != 0;
    case GroundLiteral::Kind::kNegative:
      return truth[lit.atom] == 0;
    case GroundLiteral::Kind::kCompare: {
      const bool below = values[lit.source] <= lit.threshold;
      return (lit.op == dsl::CompareOp::kLess || lit.op == dsl::CompareOp::kLessEq) ? below
                                                                                    : !below;
    }
  }
  return false;
}

void derive(const GroundProgram& gp, const std::vector<std::size_t>& values,
            std::vector<char>& truth) {
  truth.assign(gp.atoms.size(), 0);
  for (std::size_t i = 0; i < gp.sources.size(); ++i) {
    const auto& atoms = gp.source_atoms[i];
    if (atoms.empty()) continue;
    if (std::holds_alternative<BernoulliSource>(gp.sources[i])) {
      if (values[i] == 1) truth[atoms[0]] = 1;
    } else if (values[i] < atoms.size()) {
      truth[atoms[values[i]]] = 1;
    }
  }
  for (const auto& stratum : gp.strata) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t r : stratum) {
        const GroundRule& rule = gp.rules[r];
        if (truth[rule.head]) continue;
        bool ok = true;
        for (const auto& lit : rule.body) {
          if (!holds(lit, values, truth)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          truth[rule.head] = 1;
          changed = true;
        }
      }
    }
  }
}

void check_world(const GroundProgram& gp, const World& world) {
  if (world.values.size() != gp.sources.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "world does not assign every source");
  }
  for (std::size_t i = 0; i < gp.sources.size(); ++i) {
    if (world.values[i] >= value_count(gp.sources[i])) {
      throw Error(ErrorCode::kOutOfBounds, "world value out of range for source " +
                                               std::to_string(i));
    }
  }
}

}  // namespace

bool evaluate_world(const GroundProgram& gp, const World& world) {
  check_world(gp, world);
  std::vector<char> truth;
  derive(gp, world.values, truth);
  return truth[gp.query] != 0;
}

bool evaluate_world(const GroundProgram& gp, const World& world, const dsl::Atom& query) {
  check_world(gp, world);
  const std::size_t q = gp.find_atom(query);
  if (q == gp.atoms.size()) return false;
  std::vector<char> truth;
  derive(gp, world.values, truth);
  return truth[q] != 0;
}

double query_probability(const GroundProgram& gp, std::uint64_t world_limit) {
  const std::uint64_t count = gp.world_count();
  if (count > world_limit) {
    throw Error(ErrorCode::kWorldCountExceeded,
                "ground program has " + std::to_string(count) + " worlds, limit is " +
                    std::to_string(world_limit));
  }
  const std::size_t n = gp.sources.size();
  // Per source, the values of non-zero probability.
  std::vector<std::vector<std::pair<std::size_t, double>>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto probs = value_probabilities(gp.sources[i]);
    for (std::size_t v = 0; v < probs.size(); ++v) {
      if (probs[v] > 0.0) options[i].push_back({v, probs[v]});
    }
    if (options[i].empty()) return 0.0;
  }

  std::vector<std::size_t> values(n, 0);
  std::vector<std::size_t> pos(n, 0);
  std::vector<double> partial(n + 1, 1.0);
  std::vector<char> truth;
  double total = 0.0;
  // Odometer over the non-zero options; partial[i] is the product of the
  // first i chosen probabilities.
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = options[i][0].first;
    partial[i + 1] = partial[i] * options[i][0].second;
  }
  while (true) {
    derive(gp, values, truth);
    if (truth[gp.query]) total += partial[n];
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++pos[i] < options[i].size()) break;
      pos[i] = 0;
      if (i == 0) return std::min(1.0, total);
    }
    if (n == 0) return std::min(1.0, total);
    for (std::size_t j = i; j < n; ++j) {
      values[j] = options[j][pos[j]].first;
      partial[j + 1] = partial[j] * options[j][pos[j]].second;
    }
  }
}

}  // namespace pmd::inference
