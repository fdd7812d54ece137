#include "pmd/dsl/parameters.hpp"

#include <variant>

#include "pmd/error.hpp"

namespace pmd::dsl {
namespace {

bool is_one_hot(const AnnotatedDisjunction& ad) {
  if (ad.alternatives.size() < 2) return false;
  int ones = 0;
  for (const auto& alt : ad.alternatives) {
    if (alt.head.arity() != 0) return false;
    if (alt.probability.is_one()) {
      ++ones;
    } else if (!alt.probability.is_zero()) {
      return false;
    }
  }
  return ones == 1;
}

}  // namespace

const Parameter* ParameterSpace::find(const std::string& name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Assignment ParameterSpace::current() const {
  Assignment out;
  for (const auto& p : parameters) out[p.name] = p.current;
  return out;
}

std::vector<Assignment> ParameterSpace::enumerate() const {
  std::vector<Assignment> out;
  std::vector<std::size_t> digits(parameters.size(), 0);
  for (;;) {
    Assignment a;
    for (std::size_t i = 0; i < parameters.size(); ++i) {
      a[parameters[i].name] = parameters[i].domain[digits[i]];
    }
    out.push_back(std::move(a));
    std::size_t i = parameters.size();
    while (i > 0) {
      --i;
      if (++digits[i] < parameters[i].domain.size()) break;
      digits[i] = 0;
      if (i == 0) return out;
    }
    if (parameters.empty()) return out;
  }
}

ParameterSpace identify_parameters(const Program& program) {
  ParameterSpace space;
  for (std::size_t i = 0; i < program.clauses.size(); ++i) {
    const auto* ad = std::get_if<AnnotatedDisjunction>(&program.clauses[i]);
    if (ad == nullptr || !is_one_hot(*ad)) continue;
    Parameter p;
    const std::string& anchor = ad->alternatives.front().head.predicate;
    auto label = program.parameter_labels.find(anchor);
    p.name = label != program.parameter_labels.end() ? label->second : anchor;
    for (const auto& alt : ad->alternatives) {
      p.domain.push_back(alt.head.predicate);
      if (alt.probability.is_one()) p.current = alt.head.predicate;
    }
    p.clause_index = i;
    space.parameters.push_back(std::move(p));
  }
  return space;
}

Program reassign(const Program& program, const Assignment& assignment) {
  const ParameterSpace space = identify_parameters(program);
  Program out = program;
  for (const auto& [name, value] : assignment) {
    const Parameter* param = space.find(name);
    if (param == nullptr) {
      throw Error(ErrorCode::kUnknownParameter, "unknown parameter '" + name + "'");
    }
    bool found = false;
    for (const auto& v : param->domain) found = found || v == value;
    if (!found) {
      throw Error(ErrorCode::kValueNotInDomain,
                  "value '" + value + "' is not in the domain of '" + name + "'");
    }
    auto& ad = std::get<AnnotatedDisjunction>(out.clauses[param->clause_index]);
    for (auto& alt : ad.alternatives) {
      alt.probability = Rational(alt.head.predicate == value ? 1 : 0);
    }
  }
  return out;
}

std::string to_string(const Assignment& assignment) {
  std::string out;
  for (const auto& [k, v] : assignment) {
    if (!out.empty()) out += ',';
    out += k + '=' + v;
  }
  return out;
}

}  // namespace pmd::dsl
