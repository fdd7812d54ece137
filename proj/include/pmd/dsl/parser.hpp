#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pmd/dsl/ast.hpp"
#include "pmd/error.hpp"

namespace pmd::dsl {

/// Malformed program text. Carries the 1-based position of the offending
/// token and the set of tokens that would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(SourceLocation where, std::vector<std::string> expected,
              const std::string& message);

  SourceLocation where() const noexcept { return where_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourceLocation where_;
  std::vector<std::string> expected_;
};

/// Parses program text into its ordered clause list.
///
/// Accepted: rules with `:-`, `,` and `;` in bodies, `\+`/`not` negation,
/// probabilistic facts `p::a.`, annotated disjunctions `p1::a1; p2::a2.`,
/// distributional facts `a ~ normal(mu, sigma).`, comparisons `<`, `>`,
/// `=<`, `>=` between a distributional atom and a number, and `%` line
/// comments. Cut, lists, arithmetic and parenthesized bodies are rejected.
Program parse(std::string_view source);

/// Parses a single atom such as `landscape(X, Y)`; a trailing `.` is allowed.
Atom parse_atom(std::string_view source);

}  // namespace pmd::dsl
