#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pmd/dsl/ast.hpp"
#include "pmd/dsl/parameters.hpp"
#include "pmd/inference/evaluate.hpp"
#include "pmd/uncertainty/relations.hpp"

namespace pmd {

/// Probabilistic mission landscape: the query probability at every cell.
struct Pml {
  Grid grid;
  std::vector<double> values;  // row-major, row 0 south
  dsl::Atom query;
  dsl::Assignment assignment;  // every parameter, after reassignment
  std::string program_digest;
  std::string field_digest;
  std::uint64_t seed = 0;

  double at(Cell c) const { return values.at(grid.index(c)); }

  std::string to_json() const;
  /// Throws Error(kMalformedDocument) / Error(kDimensionMismatch).
  static Pml from_json(std::string_view text);
  /// One line per grid row, southernmost row first.
  std::string to_csv() const;

  friend bool operator==(const Pml&, const Pml&) = default;
};

/// `landscape(X, Y)`.
dsl::Atom default_query();

/// Content digest of a program (clauses and parameter labels).
std::string program_digest(const dsl::Program& program);

struct ComputeOptions {
  unsigned threads = 1;
  std::uint64_t world_limit = inference::kDefaultWorldLimit;
};

/// Reassigns the program's parameters, then grounds and evaluates the query
/// at every cell. Errors from grounding or enumeration are rethrown with the
/// lowest offending cell in the message. Output does not depend on
/// `options.threads`.
Pml compute_pml(const dsl::Program& program, const RelationField& field,
                const dsl::Assignment& assignment, const dsl::Atom& query = default_query(),
                const ComputeOptions& options = {});

/// Memoizes compute_pml by (program digest, field digest, assignment, query).
/// Safe for concurrent use.
class PmlCache {
 public:
  explicit PmlCache(ComputeOptions options = {}) : options_(options) {}

  std::shared_ptr<const Pml> get(const dsl::Program& program, const RelationField& field,
                                 const dsl::Assignment& assignment,
                                 const dsl::Atom& query = default_query());

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  ComputeOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Pml>> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace pmd
