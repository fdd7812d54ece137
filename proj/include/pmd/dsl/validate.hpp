#pragma once

#include <string>
#include <vector>

#include "pmd/dsl/ast.hpp"

namespace pmd::dsl {

struct Diagnostic {
  std::size_t clause_index = 0;
  SourceLocation where;
  std::string message;
};

/// Predicates supplied per grid cell by the relation field when a program
/// does not define the ground atom itself.
inline constexpr const char* kDistancePredicate = "distance";
inline constexpr const char* kOverPredicate = "over";

/// Static checks on a parsed program. Never throws; an empty result means
/// the program is fit for grounding.
std::vector<Diagnostic> validate(const Program& program);

}  // namespace pmd::dsl
