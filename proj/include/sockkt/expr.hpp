#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sockkt {

enum class NodeKind {
  constant,
  variable,
  // unary
  neg,
  sin,
  cos,
  exp,
  log,
  sqrt,
  abs,
  abs_slope,  // sign(t); only produced by differentiate(), errors near 0
  // binary
  add,
  sub,
  mul,
  div,
  // unary with a constant real exponent
  pow,
  spow,  // sign(t) * |t|^p, p > 1
};

struct Node;

/// Immutable expression tree over variables x[0..s-1].
///
/// Copies share structure, so an Expr is cheap to pass by value and safe to
/// evaluate concurrently.
class Expr {
 public:
  Expr();  // constant 0, no allocation

  static Expr constant(double value);
  static Expr variable(std::size_t index);
  static Expr unary(NodeKind kind, Expr child);
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs);
  static Expr power(Expr base, double exponent);
  static Expr signed_power(Expr base, double exponent);

  NodeKind kind() const;
  /// Constant value, or the exponent for pow/spow.
  double number() const;
  std::size_t variable_index() const;
  const Expr& child() const;  // unary, pow, spow, and lhs of binary
  const Expr& lhs() const { return child(); }
  const Expr& rhs() const;
  /// Byte offset of the node's token in the parsed text, -1 if synthesized.
  long source_offset() const;

  bool is_constant() const { return kind() == NodeKind::constant; }
  bool is_constant(double v) const { return is_constant() && number() == v; }

  /// Evaluates at x. Throws EvalError on domain violations and
  /// NondifferentiableError for abs_slope near zero.
  double eval(std::span<const double> x) const;

  /// Smallest dimension s for which every variable index is valid.
  std::size_t min_dimension() const;
  std::size_t node_count() const;

  /// Text in the parse() grammar. Reparsing yields a tree that evaluates
  /// bit-identically. abs_slope nodes print as sign(...), which is not
  /// parseable.
  std::string to_string(std::span<const std::string> names = {}) const;

  Expr with_offset(long offset) const;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using Gradient = std::vector<Expr>;

/// Parses `text` with variables named by `vars` (index = position).
///
/// Grammar, loosest to tightest:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-'? power
///   power  := atom ('^' exponent)?
///   exponent := ['-'] number ('^' exponent)?      right-associative
///   atom   := number | ident | func '(' expr (',' number)? ')' | '(' expr ')'
///   func   := sin|cos|exp|log|sqrt|abs|spow
///
/// Throws ParseError carrying the byte offset.
Expr parse(std::string_view text, std::span<const std::string> vars);

/// Reserved function names; variables may not use them.
bool is_function_name(std::string_view name);

/// Symbolic partial derivative with respect to x[var].
Expr differentiate(const Expr& e, std::size_t var);

Gradient gradient(const Expr& e, std::size_t dimension);

std::vector<double> eval_gradient(const Gradient& g, std::span<const double> x);

}  // namespace sockkt
