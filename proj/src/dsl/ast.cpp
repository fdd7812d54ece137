#include "pmd/dsl/ast.hpp"

#include <sstream>

namespace pmd::dsl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string print_body(const Body& body) {
  std::ostringstream out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    out << (i == 0 ? "\n    " : ";\n    ");
    for (std::size_t j = 0; j < body[i].size(); ++j) {
      if (j > 0) out << ", ";
      out << to_string(body[i][j]);
    }
  }
  return out.str();
}

}  // namespace

bool Atom::is_ground() const {
  for (const auto& t : args) {
    if (std::holds_alternative<Variable>(t)) return false;
  }
  return true;
}

Rational AnnotatedDisjunction::total() const {
  Rational sum;
  for (const auto& alt : alternatives) sum = sum + alt.probability;
  return sum;
}

std::string to_string(const Term& term) {
  return std::visit(Overloaded{
                        [](const Variable& v) { return v.name; },
                        [](const Symbol& s) { return s.name; },
                        [](const Rational& r) { return r.to_string(); },
                    },
                    term);
}

std::string to_string(const Atom& atom) {
  std::string out = atom.predicate;
  if (!atom.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      if (i > 0) out += ", ";
      out += to_string(atom.args[i]);
    }
    out += ')';
  }
  return out;
}

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kLess: return "<";
    case CompareOp::kLessEq: return "=<";
    case CompareOp::kGreater: return ">";
    case CompareOp::kGreaterEq: return ">=";
  }
  return "?";
}

std::string to_string(const Literal& literal) {
  switch (literal.kind) {
    case Literal::Kind::kPositive: return to_string(literal.atom);
    case Literal::Kind::kNegative: return "\\+ " + to_string(literal.atom);
    case Literal::Kind::kCompare:
      return to_string(literal.atom) + " " + to_string(literal.op) + " " +
             literal.threshold.to_string();
  }
  return {};
}

std::string to_string(const Clause& clause) {
  return std::visit(
      Overloaded{
          [](const Rule& r) {
            if (r.body.empty()) return to_string(r.head) + ".";
            return to_string(r.head) + " :-" + print_body(r.body) + ".";
          },
          [](const BernoulliFact& f) {
            return f.probability.to_string() + "::" + to_string(f.head) + ".";
          },
          [](const AnnotatedDisjunction& ad) {
            std::string out;
            for (std::size_t i = 0; i < ad.alternatives.size(); ++i) {
              if (i > 0) out += "; ";
              out += ad.alternatives[i].probability.to_string() + "::" +
                     to_string(ad.alternatives[i].head);
            }
            return out + ".";
          },
          [](const DistributionalFact& d) {
            std::string out = to_string(d.head) + " ~ " + d.dist.name + "(";
            for (std::size_t i = 0; i < d.dist.params.size(); ++i) {
              if (i > 0) out += ", ";
              out += d.dist.params[i].to_string();
            }
            out += ")";
            if (!d.body.empty()) out += " :-" + print_body(d.body);
            return out + ".";
          },
      },
      clause);
}

std::string pretty_print(const Program& program) {
  std::string out;
  for (const auto& clause : program.clauses) {
    out += to_string(clause);
    out += '\n';
  }
  return out;
}

}  // namespace pmd::dsl
