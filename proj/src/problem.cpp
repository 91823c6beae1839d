#include "sockkt/problem.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "sockkt/error.hpp"

namespace sockkt {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

std::vector<Expr> parse_all(const std::vector<std::string>& texts,
                            const std::vector<std::string>& vars, char label) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(parse(texts[i], vars));
    } catch (const ParseError& e) {
      throw InputError(std::string(1, label) + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

Problem::Problem(std::string name, std::vector<std::string> variables,
                 std::vector<std::string> objectives, std::vector<std::string> constraints)
    : name_(std::move(name)),
      variables_(std::move(variables)),
      objective_text_(std::move(objectives)),
      constraint_text_(std::move(constraints)) {
  if (variables_.empty()) throw InputError("problem needs at least one variable");
  if (objective_text_.empty()) throw InputError("problem needs at least one objective");
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (!valid_identifier(v)) throw InputError("invalid variable name '" + v + "'");
    if (is_function_name(v)) throw InputError("variable name '" + v + "' is a function name");
    if (!seen.insert(v).second) throw InputError("duplicate variable name '" + v + "'");
  }
  objectives_ = parse_all(objective_text_, variables_, 'f');
  constraints_ = parse_all(constraint_text_, variables_, 'g');
  for (const auto& f : objectives_) objective_grads_.push_back(gradient(f, dimension()));
  for (const auto& g : constraints_) constraint_grads_.push_back(gradient(g, dimension()));
}

Problem::FunctionRef Problem::lookup(const std::string& label) const {
  if (label.size() >= 2 && (label[0] == 'f' || label[0] == 'g')) {
    std::size_t idx = 0;
    bool digits = std::all_of(label.begin() + 1, label.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (digits) {
      idx = std::stoul(label.substr(1));
      std::size_t count = label[0] == 'f' ? num_objectives() : num_constraints();
      if (idx >= 1 && idx <= count) return {label[0] == 'f', idx - 1};
    }
  }
  throw InputError("unknown function label '" + label + "' (expected f1..f" +
                   std::to_string(num_objectives()) + " or g1..g" +
                   std::to_string(num_constraints()) + ")");
}

const Expr& Problem::function(FunctionRef r) const {
  return r.is_objective ? objective(r.index) : constraint(r.index);
}

const Gradient& Problem::function_gradient(FunctionRef r) const {
  return r.is_objective ? objective_gradient(r.index) : constraint_gradient(r.index);
}

double Problem::max_constraint(std::span<const double> x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& g : constraints_) m = std::max(m, g.eval(x));
  return m;
}

}  // namespace sockkt
