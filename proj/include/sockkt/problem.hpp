#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sockkt/expr.hpp"

namespace sockkt {

/// Minimize (f_1, ..., f_n)(x) subject to g_i(x) <= 0, i = 1..m, x in R^s.
/// n = 1 is the scalar problem.
class Problem {
 public:
  Problem(std::string name, std::vector<std::string> variables,
          std::vector<std::string> objectives, std::vector<std::string> constraints);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t dimension() const { return variables_.size(); }
  std::size_t num_objectives() const { return objectives_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  const Expr& objective(std::size_t j) const { return objectives_.at(j); }
  const Expr& constraint(std::size_t i) const { return constraints_.at(i); }
  const Gradient& objective_gradient(std::size_t j) const { return objective_grads_.at(j); }
  const Gradient& constraint_gradient(std::size_t i) const { return constraint_grads_.at(i); }
  const std::vector<std::string>& objective_text() const { return objective_text_; }
  const std::vector<std::string>& constraint_text() const { return constraint_text_; }

  struct FunctionRef {
    bool is_objective = true;
    std::size_t index = 0;
  };
  /// Resolves "f1".."fn" / "g1".."gm".
  FunctionRef lookup(const std::string& label) const;
  const Expr& function(FunctionRef r) const;
  const Gradient& function_gradient(FunctionRef r) const;

  /// max_i g_i(x); -inf when there are no constraints.
  double max_constraint(std::span<const double> x) const;

 private:
  std::string name_;
  std::vector<std::string> variables_;
  std::vector<std::string> objective_text_;
  std::vector<std::string> constraint_text_;
  std::vector<Expr> objectives_;
  std::vector<Expr> constraints_;
  std::vector<Gradient> objective_grads_;
  std::vector<Gradient> constraint_grads_;
};

}  // namespace sockkt
