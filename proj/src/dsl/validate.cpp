#include "pmd/dsl/validate.hpp"

#include <map>
#include <set>
#include <variant>

namespace pmd::dsl {
namespace {

class Validator {
 public:
  explicit Validator(const Program& program) : program_(program) {}

  std::vector<Diagnostic> run() {
    collect_definitions();
    for (std::size_t i = 0; i < program_.clauses.size(); ++i) {
      index_ = i;
      std::visit([this](const auto& c) { check(c); }, program_.clauses[i]);
    }
    return std::move(out_);
  }

 private:
  void report(std::string message) {
    SourceLocation where;
    if (index_ < program_.locations.size()) where = program_.locations[index_];
    out_.push_back({index_, where, std::move(message)});
  }

  void collect_definitions() {
    for (const auto& clause : program_.clauses) {
      if (const auto* d = std::get_if<DistributionalFact>(&clause)) {
        distributional_.insert(d->head.predicate);
      } else if (const auto* r = std::get_if<Rule>(&clause)) {
        other_defined_.insert(r->head.predicate);
      } else if (const auto* b = std::get_if<BernoulliFact>(&clause)) {
        other_defined_.insert(b->head.predicate);
      } else if (const auto* ad = std::get_if<AnnotatedDisjunction>(&clause)) {
        for (const auto& alt : ad->alternatives) {
          other_defined_.insert(alt.head.predicate);
        }
      }
    }
  }

  bool is_distributional(const std::string& predicate) const {
    if (predicate == kDistancePredicate && !other_defined_.contains(predicate)) {
      return true;
    }
    return distributional_.contains(predicate);
  }

  void check_arity(const Atom& atom) {
    auto [it, inserted] = arity_.try_emplace(atom.predicate, atom.arity());
    if (!inserted && it->second != atom.arity()) {
      report("inconsistent arity for predicate '" + atom.predicate + "': " +
             std::to_string(it->second) + " and " + std::to_string(atom.arity()));
    }
  }

  void check_probability(const Rational& p, const Atom& head) {
    if (p < Rational(0) || p > Rational(1)) {
      report("probability " + p.to_string() + " of '" + to_string(head) +
             "' is outside [0, 1]");
    }
  }

  void check_body(const Atom& head, const Body& body) {
    std::set<std::string> head_vars;
    for (const auto& t : head.args) {
      if (const auto* v = std::get_if<Variable>(&t)) head_vars.insert(v->name);
    }
    for (const auto& conj : body) {
      for (const auto& lit : conj) {
        check_arity(lit.atom);
        for (const auto& t : lit.atom.args) {
          const auto* v = std::get_if<Variable>(&t);
          if (v && !head_vars.contains(v->name)) {
            report("variable " + v->name + " in the body of '" + to_string(head) +
                   "' does not occur in its head");
          }
        }
        const bool dist = is_distributional(lit.atom.predicate);
        if (lit.kind == Literal::Kind::kCompare && !dist) {
          report("comparison against non-distributional predicate '" +
                 lit.atom.predicate + "'");
        } else if (lit.kind != Literal::Kind::kCompare && dist) {
          report("distributional predicate '" + lit.atom.predicate +
                 "' may only appear in comparisons");
        }
      }
    }
  }

  void check(const Rule& rule) {
    check_arity(rule.head);
    if (distributional_.contains(rule.head.predicate)) {
      report("predicate '" + rule.head.predicate +
             "' is defined both by a distribution and by a rule");
    }
    check_body(rule.head, rule.body);
  }

  void check(const BernoulliFact& fact) {
    check_arity(fact.head);
    check_probability(fact.probability, fact.head);
    if (distributional_.contains(fact.head.predicate)) {
      report("predicate '" + fact.head.predicate +
             "' is defined both by a distribution and by a probabilistic fact");
    }
  }

  void check(const AnnotatedDisjunction& ad) {
    for (const auto& alt : ad.alternatives) {
      check_arity(alt.head);
      check_probability(alt.probability, alt.head);
    }
    const Rational sum = ad.total();
    if (sum > Rational(1)) report("AD sum " + sum.to_string() + " > 1");
  }

  void check(const DistributionalFact& fact) {
    check_arity(fact.head);
    if (fact.dist.name != "normal") {
      report("unsupported distribution '" + fact.dist.name + "'");
    } else if (fact.dist.params.size() != 2) {
      report("normal expects 2 parameters, got " +
             std::to_string(fact.dist.params.size()));
    } else if (fact.dist.params[1] <= Rational(0)) {
      report("sigma must be positive");
    }
    if (!fact.body.empty()) {
      report("distributional clauses with bodies are not supported");
    }
  }

  const Program& program_;
  std::size_t index_ = 0;
  std::set<std::string> distributional_;
  std::set<std::string> other_defined_;
  std::map<std::string, std::size_t> arity_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& program) {
  return Validator(program).run();
}

}  // namespace pmd::dsl
