#pragma once

#include <map>
#include <string>
#include <vector>

#include "pmd/dsl/ast.hpp"

namespace pmd::dsl {

/// Parameter name -> selected alternative.
using Assignment = std::map<std::string, std::string>;

/// A one-hot annotated disjunction over propositional alternatives.
struct Parameter {
  /// Display label if the program carries one, otherwise the predicate of
  /// the first alternative.
  std::string name;
  std::vector<std::string> domain;
  std::string current;
  /// Index of the defining clause within the program.
  std::size_t clause_index = 0;

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct ParameterSpace {
  std::vector<Parameter> parameters;  // declaration order

  const Parameter* find(const std::string& name) const;
  Assignment current() const;
  /// Every assignment of the Cartesian product, odometer order with the last
  /// declared parameter varying fastest.
  std::vector<Assignment> enumerate() const;

  friend bool operator==(const ParameterSpace&, const ParameterSpace&) = default;
};

/// Recognizes one-hot ADs (exactly one weight 1, the rest 0) as mission
/// parameters. Stochastic ADs are left for inference to marginalize.
ParameterSpace identify_parameters(const Program& program);

/// Moves the one-hot weight of each assigned parameter to the chosen value.
/// Throws Error(kUnknownParameter) / Error(kValueNotInDomain).
Program reassign(const Program& program, const Assignment& assignment);

/// Canonical `name=value,name=value` text in key order.
std::string to_string(const Assignment& assignment);

}  // namespace pmd::dsl
