#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "pmd/rational.hpp"

namespace pmd::dsl {

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Variable, constant symbol, or exact number.
using Term = std::variant<Variable, Symbol, Rational>;

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const noexcept { return args.size(); }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class CompareOp { kLess, kLessEq, kGreater, kGreaterEq };

/// A body literal. Comparisons are normalized so the distributional atom is
/// always on the left (`500 > d` is stored as `d < 500`).
struct Literal {
  enum class Kind { kPositive, kNegative, kCompare };

  Kind kind = Kind::kPositive;
  Atom atom;
  CompareOp op = CompareOp::kLess;
  Rational threshold;

  static Literal positive(Atom a) { return {Kind::kPositive, std::move(a), {}, {}}; }
  static Literal negative(Atom a) { return {Kind::kNegative, std::move(a), {}, {}}; }
  static Literal compare(Atom a, CompareOp op, Rational threshold) {
    return {Kind::kCompare, std::move(a), op, threshold};
  }

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Conjunction = std::vector<Literal>;

/// Body in disjunctive normal form; an empty body makes the rule a fact.
using Body = std::vector<Conjunction>;

struct Rule {
  Atom head;
  Body body;
  friend bool operator==(const Rule&, const Rule&) = default;
};

struct BernoulliFact {
  Rational probability;
  Atom head;
  friend bool operator==(const BernoulliFact&, const BernoulliFact&) = default;
};

struct Alternative {
  Rational probability;
  Atom head;
  friend bool operator==(const Alternative&, const Alternative&) = default;
};

struct AnnotatedDisjunction {
  std::vector<Alternative> alternatives;

  Rational total() const;

  friend bool operator==(const AnnotatedDisjunction&,
                         const AnnotatedDisjunction&) = default;
};

struct Distribution {
  std::string name;
  std::vector<Rational> params;
  friend bool operator==(const Distribution&, const Distribution&) = default;
};

/// `head ~ dist.` with an optional body (accepted by the parser, rejected by
/// validation).
struct DistributionalFact {
  Atom head;
  Distribution dist;
  Body body;
  friend bool operator==(const DistributionalFact&,
                         const DistributionalFact&) = default;
};

using Clause =
    std::variant<Rule, BernoulliFact, AnnotatedDisjunction, DistributionalFact>;

struct SourceLocation {
  int line = 0;
  int column = 0;
};

struct Program {
  std::vector<Clause> clauses;
  /// Parallel to `clauses`; not part of structural equality.
  std::vector<SourceLocation> locations;
  /// Display names for mission parameters, keyed by the predicate of the
  /// parameter's first alternative (e.g. `standard` -> `license`).
  std::map<std::string, std::string> parameter_labels;

  friend bool operator==(const Program& a, const Program& b) {
    return a.clauses == b.clauses && a.parameter_labels == b.parameter_labels;
  }
};

// Pretty printing. The output is valid program text.
std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(CompareOp op);
std::string to_string(const Literal& literal);
std::string to_string(const Clause& clause);
std::string pretty_print(const Program& program);

}  // namespace pmd::dsl
