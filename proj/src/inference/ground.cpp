#include "pmd/inference/ground.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "pmd/dsl/validate.hpp"
#include "pmd/error.hpp"

namespace pmd::inference {

using dsl::Atom;
using dsl::Term;

std::size_t value_count(const Source& s) {
  return std::visit(
      [](const auto& src) -> std::size_t {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, ContinuousSource>) return src.interval_count();
        else if constexpr (std::is_same_v<S, BernoulliSource>) return 2;
        else return src.alternatives.size() + (src.residual > 0.0 ? 1 : 0);
      },
      s);
}

std::uint64_t GroundProgram::world_count() const {
  std::uint64_t n = 1;
  for (const auto& s : sources) {
    const std::uint64_t k = value_count(s);
    if (n > std::numeric_limits<std::uint64_t>::max() / k) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= k;
  }
  return n;
}

std::size_t GroundProgram::find_atom(const Atom& atom) const {
  return static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), atom) - atoms.begin());
}

std::string column_constant(std::size_t col) { return "x" + std::to_string(col); }
std::string row_constant(std::size_t row) { return "y" + std::to_string(row); }

namespace {

using Binding = std::map<std::string, Term>;

bool unify(const Atom& pattern, const Atom& ground, Binding& b) {
  if (pattern.predicate != ground.predicate || pattern.arity() != ground.arity()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& t = pattern.args[i];
    const Term& g = ground.args[i];
    if (const auto* v = std::get_if<dsl::Variable>(&t)) {
      const auto [it, inserted] = b.try_emplace(v->name, g);
      if (!inserted && !(it->second == g)) return false;
    } else if (!(t == g)) {
      return false;
    }
  }
  return true;
}

Atom substitute(const Atom& a, const Binding& b) {
  Atom out = a;
  for (auto& t : out.args) {
    if (const auto* v = std::get_if<dsl::Variable>(&t)) {
      const auto it = b.find(v->name);
      if (it != b.end()) t = it->second;
    }
  }
  return out;
}

bool is_symbol(const Term& t, const std::string& name) {
  const auto* s = std::get_if<dsl::Symbol>(&t);
  return s != nullptr && s->name == name;
}

class Grounder {
 public:
  Grounder(const dsl::Program& program, Cell cell, const RelationField& field)
      : program_(program),
        field_(field),
        cell_(cell),
        x_(column_constant(cell.col)),
        y_(row_constant(cell.row)) {
    if (!field.grid.contains(cell)) {
      throw Error(ErrorCode::kOutOfBounds, "cell " + to_string(cell) + " is outside the field");
    }
    cell_index_ = field.grid.index(cell);
  }

  GroundProgram run(const Atom& query) {
    Binding loc{{"X", dsl::Symbol{x_}}, {"Y", dsl::Symbol{y_}}};
    const Atom q = substitute(query, loc);
    if (!q.is_ground()) {
      throw Error(ErrorCode::kGroundingError,
                  "query '" + dsl::to_string(query) + "' has variables other than X and Y");
    }
    gp_.cell = cell_;
    gp_.query = intern(q);
    while (!pending_.empty()) {
      const std::size_t a = pending_.front();
      pending_.pop_front();
      expand(a);
    }
    finish_thresholds();
    stratify();
    return std::move(gp_);
  }

 private:
  std::size_t intern(const Atom& a) {
    const std::string key = dsl::to_string(a);
    const auto [it, inserted] = index_.try_emplace(key, gp_.atoms.size());
    if (inserted) {
      gp_.atoms.push_back(a);
      pending_.push_back(it->second);
    }
    return it->second;
  }

  std::size_t add_source(Source s, std::vector<std::size_t> atoms) {
    gp_.sources.push_back(std::move(s));
    gp_.source_atoms.push_back(std::move(atoms));
    return gp_.sources.size() - 1;
  }

  bool field_location(const Atom& g) const {
    return g.arity() == 3 && is_symbol(g.args[0], x_) && is_symbol(g.args[1], y_) &&
           std::holds_alternative<dsl::Symbol>(g.args[2]);
  }

  const ClassRasters& field_class(const Atom& g) const {
    const std::string& cls = std::get<dsl::Symbol>(g.args[2]).name;
    if (!field_.has_class(cls)) {
      throw Error(ErrorCode::kUnknownClass,
                  "class '" + cls + "' in '" + dsl::to_string(g) + "' is not in the relation field");
    }
    return field_.of(cls);
  }

  void expand(std::size_t atom_index) {
    const Atom g = gp_.atoms[atom_index];
    bool defined = false;
    for (std::size_t i = 0; i < program_.clauses.size(); ++i) {
      const auto& clause = program_.clauses[i];
      if (const auto* rule = std::get_if<dsl::Rule>(&clause)) {
        Binding b;
        if (!unify(rule->head, g, b)) continue;
        defined = true;
        if (rule->body.empty()) {
          gp_.rules.push_back({atom_index, {}});
        }
        for (const auto& conj : rule->body) add_rule(atom_index, conj, b);
      } else if (const auto* fact = std::get_if<dsl::BernoulliFact>(&clause)) {
        Binding b;
        if (!unify(fact->head, g, b)) continue;
        defined = true;
        add_source(BernoulliSource{g, fact->probability.to_double()}, {atom_index});
      } else if (const auto* ad = std::get_if<dsl::AnnotatedDisjunction>(&clause)) {
        for (const auto& alt : ad->alternatives) {
          Binding b;
          if (!unify(alt.head, g, b)) continue;
          defined = true;
          add_choice(i, *ad, b);
        }
      } else if (const auto* dist = std::get_if<dsl::DistributionalFact>(&clause)) {
        Binding b;
        if (unify(dist->head, g, b)) defined = true;
      }
    }
    if (!defined && g.predicate == dsl::kOverPredicate && field_location(g)) {
      const ClassRasters& r = field_class(g);
      add_source(BernoulliSource{g, r.over_prob[cell_index_]}, {atom_index});
    }
  }

  void add_choice(std::size_t clause, const dsl::AnnotatedDisjunction& ad, const Binding& b) {
    ChoiceSource choice;
    std::string key = std::to_string(clause);
    Rational total;
    for (const auto& alt : ad.alternatives) {
      Atom head = substitute(alt.head, b);
      if (!head.is_ground()) {
        throw Error(ErrorCode::kGroundingError,
                    "annotated disjunction alternative '" + dsl::to_string(alt.head) +
                        "' cannot be grounded");
      }
      key += "|" + dsl::to_string(head);
      total = total + alt.probability;
      choice.alternatives.emplace_back(alt.probability.to_double(), std::move(head));
    }
    if (!choices_.insert(key).second) return;
    choice.residual = std::max(0.0, (Rational(1) - total).to_double());
    std::vector<std::size_t> atoms;
    for (const auto& [p, head] : choice.alternatives) atoms.push_back(intern(head));
    add_source(std::move(choice), std::move(atoms));
  }

  void add_rule(std::size_t head, const dsl::Conjunction& conj, const Binding& b) {
    GroundRule rule{head, {}};
    for (const auto& lit : conj) {
      const Atom a = substitute(lit.atom, b);
      if (!a.is_ground()) {
        throw Error(ErrorCode::kGroundingError,
                    "literal '" + dsl::to_string(lit) + "' cannot be grounded");
      }
      GroundLiteral gl;
      switch (lit.kind) {
        case dsl::Literal::Kind::kPositive:
          gl.kind = GroundLiteral::Kind::kPositive;
          gl.atom = intern(a);
          break;
        case dsl::Literal::Kind::kNegative:
          gl.kind = GroundLiteral::Kind::kNegative;
          gl.atom = intern(a);
          break;
        case dsl::Literal::Kind::kCompare:
          gl.kind = GroundLiteral::Kind::kCompare;
          gl.source = continuous(a);
          gl.op = lit.op;
          thresholds_[gl.source].insert(lit.threshold);
          pending_thresholds_.push_back({gp_.rules.size(), rule.body.size(), lit.threshold});
          break;
      }
      rule.body.push_back(gl);
    }
    gp_.rules.push_back(std::move(rule));
  }

  std::size_t continuous(const Atom& a) {
    const std::string key = dsl::to_string(a);
    if (const auto it = continuous_.find(key); it != continuous_.end()) return it->second;

    const dsl::DistributionalFact* found = nullptr;
    for (const auto& clause : program_.clauses) {
      const auto* dist = std::get_if<dsl::DistributionalFact>(&clause);
      Binding b;
      if (dist == nullptr || !unify(dist->head, a, b)) continue;
      if (found != nullptr) {
        throw Error(ErrorCode::kGroundingError, "'" + key + "' has more than one distribution");
      }
      found = dist;
    }
    ContinuousSource src;
    src.atom = a;
    if (found != nullptr) {
      if (found->dist.name != "normal" || found->dist.params.size() != 2) {
        throw Error(ErrorCode::kGroundingError, "unsupported distribution for '" + key + "'");
      }
      src.mu = found->dist.params[0].to_double();
      src.sigma = found->dist.params[1].to_double();
    } else if (a.predicate == dsl::kDistancePredicate && field_location(a)) {
      const ClassRasters& r = field_class(a);
      src.mu = r.distance_mean[cell_index_];
      src.sigma = std::sqrt(r.distance_var[cell_index_]);
    } else {
      throw Error(ErrorCode::kGroundingError, "no distribution for '" + key + "'");
    }
    const std::size_t idx = add_source(std::move(src), {});
    continuous_.emplace(key, idx);
    return idx;
  }

  void finish_thresholds() {
    for (const auto& [src, set] : thresholds_) {
      auto& c = std::get<ContinuousSource>(gp_.sources[src]);
      for (const auto& t : set) c.thresholds.push_back(t.to_double());
    }
    for (const auto& p : pending_thresholds_) {
      GroundLiteral& gl = gp_.rules[p.rule].body[p.literal];
      const auto& set = thresholds_.at(gl.source);
      gl.threshold = static_cast<std::size_t>(std::distance(set.begin(), set.find(p.value)));
    }
  }

  // Tarjan's SCC over the ground dependency graph. Components come out
  // dependencies-first, which is the evaluation order.
  void stratify() {
    const std::size_t n = gp_.atoms.size();
    std::vector<std::vector<std::pair<std::size_t, bool>>> edges(n);  // (to, negative)
    std::vector<std::vector<std::size_t>> rules_of(n);
    for (std::size_t r = 0; r < gp_.rules.size(); ++r) {
      const auto& rule = gp_.rules[r];
      rules_of[rule.head].push_back(r);
      for (const auto& lit : rule.body) {
        if (lit.kind == GroundLiteral::Kind::kCompare) continue;
        edges[rule.head].push_back({lit.atom, lit.kind == GroundLiteral::Kind::kNegative});
      }
    }
    constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> order(n, kUnvisited), low(n, 0), component(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    std::size_t components = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
      order[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (const auto& [w, neg] : edges[v]) {
        if (order[w] == kUnvisited) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
      }
      if (low[v] != order[v]) return;
      std::vector<std::size_t> members;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component[w] = components;
        members.push_back(w);
      } while (w != v);
      std::vector<std::size_t> rules;
      for (std::size_t m : members) {
        rules.insert(rules.end(), rules_of[m].begin(), rules_of[m].end());
      }
      std::sort(rules.begin(), rules.end());
      if (!rules.empty()) gp_.strata.push_back(std::move(rules));
      ++components;
    };
    for (std::size_t v = 0; v < n; ++v) {
      if (order[v] == kUnvisited) visit(v);
    }
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& [w, neg] : edges[v]) {
        if (neg && component[v] == component[w]) {
          throw Error(ErrorCode::kUnstratifiedProgram,
                      "'" + dsl::to_string(gp_.atoms[v]) + "' depends negatively on '" +
                          dsl::to_string(gp_.atoms[w]) + "' through a cycle");
        }
      }
    }
  }

  struct PendingThreshold {
    std::size_t rule;
    std::size_t literal;
    Rational value;
  };

  const dsl::Program& program_;
  const RelationField& field_;
  Cell cell_;
  std::size_t cell_index_ = 0;
  std::string x_;
  std::string y_;
  GroundProgram gp_;
  std::unordered_map<std::string, std::size_t> index_;
  std::deque<std::size_t> pending_;
  std::set<std::string> choices_;
  std::unordered_map<std::string, std::size_t> continuous_;
  std::map<std::size_t, std::set<Rational>> thresholds_;
  std::vector<PendingThreshold> pending_thresholds_;
};

}  // namespace

GroundProgram ground(const dsl::Program& program, Cell cell, const RelationField& field,
                     const dsl::Atom& query) {
  return Grounder(program, cell, field).run(query);
}

}  // namespace pmd::inference
