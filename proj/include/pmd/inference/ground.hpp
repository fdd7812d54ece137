#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pmd/dsl/ast.hpp"
#include "pmd/uncertainty/relations.hpp"

namespace pmd::inference {

/// A normally distributed quantity that the program only observes through
/// threshold comparisons.
struct ContinuousSource {
  dsl::Atom atom;
  double mu = 0.0;
  double sigma = 1.0;
  std::vector<double> thresholds;  // sorted, distinct

  std::size_t interval_count() const noexcept { return thresholds.size() + 1; }
};

struct BernoulliSource {
  dsl::Atom atom;
  double p = 0.0;
};

/// Ground annotated disjunction. Value k < alternatives.size() selects
/// alternative k; value alternatives.size() selects none and exists only
/// when the weights sum to less than 1.
struct ChoiceSource {
  std::vector<std::pair<double, dsl::Atom>> alternatives;
  double residual = 0.0;  // 1 - sum, computed exactly
};

using Source = std::variant<ContinuousSource, BernoulliSource, ChoiceSource>;

/// Number of values a source can take in a world (including values of
/// probability zero).
std::size_t value_count(const Source& s);
/// Probability of each value, in value order.
std::vector<double> value_probabilities(const Source& s);

struct GroundLiteral {
  enum class Kind { kPositive, kNegative, kCompare };
  Kind kind = Kind::kPositive;
  std::size_t atom = 0;       // kPositive / kNegative
  std::size_t source = 0;     // kCompare: index of a ContinuousSource
  std::size_t threshold = 0;  // kCompare: index into its thresholds
  dsl::CompareOp op = dsl::CompareOp::kLess;
};

struct GroundRule {
  std::size_t head = 0;
  std::vector<GroundLiteral> body;  // empty: unconditional fact
};

struct GroundProgram {
  Cell cell;
  std::vector<dsl::Atom> atoms;   // every ground atom mentioned
  std::vector<Source> sources;    // only those the query depends on
  /// Atoms each source can make true: {atom} for a Bernoulli source, one per
  /// alternative for a choice, none for a continuous source.
  std::vector<std::vector<std::size_t>> source_atoms;
  std::vector<GroundRule> rules;
  /// Rule indices grouped by stratum, lowest stratum first.
  std::vector<std::vector<std::size_t>> strata;
  std::size_t query = 0;          // atom index of the ground query

  /// Size of the full world product, saturating at UINT64_MAX.
  std::uint64_t world_count() const;
  /// Index of a ground atom, or atoms.size() when absent.
  std::size_t find_atom(const dsl::Atom& atom) const;
};

/// Constants that stand for a cell's location in programs: `x<col>` and
/// `y<row>`.
std::string column_constant(std::size_t col);
std::string row_constant(std::size_t row);

/// Instantiates `query` at `cell`: variables named X and Y become the cell's
/// location constants. Distance and over atoms of the cell that the program
/// does not define itself are taken from `field`.
///
/// Throws Error(kUnknownClass), Error(kUnstratifiedProgram),
/// Error(kGroundingError).
GroundProgram ground(const dsl::Program& program, Cell cell, const RelationField& field,
                     const dsl::Atom& query);

}  // namespace pmd::inference
