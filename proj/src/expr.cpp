#include "sockkt/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "sockkt/error.hpp"

namespace sockkt {

struct Node {
  NodeKind kind = NodeKind::constant;
  double number = 0.0;
  std::size_t index = 0;
  Expr a;
  Expr b;
  long offset = -1;
};

namespace {

constexpr double kAbsKinkTol = 1e-12;

bool is_unary(NodeKind k) {
  switch (k) {
    case NodeKind::neg:
    case NodeKind::sin:
    case NodeKind::cos:
    case NodeKind::exp:
    case NodeKind::log:
    case NodeKind::sqrt:
    case NodeKind::abs:
    case NodeKind::abs_slope:
      return true;
    default:
      return false;
  }
}

bool is_binary(NodeKind k) {
  return k == NodeKind::add || k == NodeKind::sub || k == NodeKind::mul ||
         k == NodeKind::div;
}

const char* function_name(NodeKind k) {
  switch (k) {
    case NodeKind::sin: return "sin";
    case NodeKind::cos: return "cos";
    case NodeKind::exp: return "exp";
    case NodeKind::log: return "log";
    case NodeKind::sqrt: return "sqrt";
    case NodeKind::abs: return "abs";
    case NodeKind::abs_slope: return "sign";
    case NodeKind::spow: return "spow";
    default: return "?";
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

[[noreturn]] void domain_error(const Expr& at, const std::string& what) {
  std::ostringstream os;
  os << what << " in '" << at.to_string() << "'";
  if (at.source_offset() >= 0) os << " (offset " << at.source_offset() << ")";
  throw EvalError(os.str());
}

double checked(const Expr& at, double v) {
  if (!std::isfinite(v)) domain_error(at, "non-finite value");
  return v;
}

double eval_node(const Expr& e, std::span<const double> x) {
  switch (e.kind()) {
    case NodeKind::constant:
      return e.number();
    case NodeKind::variable:
      if (e.variable_index() >= x.size())
        domain_error(e, "variable index out of range");
      return x[e.variable_index()];
    case NodeKind::neg:
      return -eval_node(e.child(), x);
    case NodeKind::sin:
      return std::sin(eval_node(e.child(), x));
    case NodeKind::cos:
      return std::cos(eval_node(e.child(), x));
    case NodeKind::exp:
      return checked(e, std::exp(eval_node(e.child(), x)));
    case NodeKind::log: {
      double t = eval_node(e.child(), x);
      if (!(t > 0.0)) domain_error(e, "log of non-positive value " + format_number(t));
      return std::log(t);
    }
    case NodeKind::sqrt: {
      double t = eval_node(e.child(), x);
      if (t < 0.0) domain_error(e, "sqrt of negative value " + format_number(t));
      return std::sqrt(t);
    }
    case NodeKind::abs:
      return std::fabs(eval_node(e.child(), x));
    case NodeKind::abs_slope: {
      double t = eval_node(e.child(), x);
      if (std::fabs(t) <= kAbsKinkTol) {
        std::ostringstream os;
        os << "abs is not differentiable at " << format_number(t) << " in '"
           << e.to_string() << "'";
        throw NondifferentiableError(os.str());
      }
      return t > 0.0 ? 1.0 : -1.0;
    }
    case NodeKind::add:
      return checked(e, eval_node(e.lhs(), x) + eval_node(e.rhs(), x));
    case NodeKind::sub:
      return checked(e, eval_node(e.lhs(), x) - eval_node(e.rhs(), x));
    case NodeKind::mul:
      return checked(e, eval_node(e.lhs(), x) * eval_node(e.rhs(), x));
    case NodeKind::div: {
      double num = eval_node(e.lhs(), x);
      double den = eval_node(e.rhs(), x);
      if (den == 0.0) domain_error(e, "division by zero");
      return checked(e, num / den);
    }
    case NodeKind::pow: {
      double t = eval_node(e.child(), x);
      double p = e.number();
      if (t < 0.0 && std::trunc(p) != p)
        domain_error(e, "negative base " + format_number(t) + " with non-integer exponent");
      if (t == 0.0 && p < 0.0) domain_error(e, "division by zero");
      return checked(e, std::pow(t, p));
    }
    case NodeKind::spow: {
      double t = eval_node(e.child(), x);
      double m = std::pow(std::fabs(t), e.number());
      return checked(e, t < 0.0 ? -m : m);
    }
  }
  return 0.0;
}

// Folds a node whose children are all constants. Leaves the node alone when
// evaluation would fail, so the error surfaces at evaluation time with the
// node's location.
Expr fold(Expr e) {
  bool all_const = false;
  if (is_unary(e.kind()) || e.kind() == NodeKind::pow || e.kind() == NodeKind::spow)
    all_const = e.child().is_constant();
  else if (is_binary(e.kind()))
    all_const = e.lhs().is_constant() && e.rhs().is_constant();
  if (!all_const || e.kind() == NodeKind::abs_slope) return e;
  try {
    return Expr::constant(eval_node(e, {})).with_offset(e.source_offset());
  } catch (const EvalError&) {
    return e;
  }
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars)
      : text_(text), vars_(vars) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) {
    throw ParseError(what, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  std::optional<double> try_number() {
    skip_ws();
    std::size_t start = pos_;
    std::size_t p = pos_;
    bool digits = false;
    while (p < text_.size() && is_digit(text_[p])) ++p, digits = true;
    if (p < text_.size() && text_[p] == '.') {
      ++p;
      while (p < text_.size() && is_digit(text_[p])) ++p, digits = true;
    }
    if (!digits) return std::nullopt;
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && is_digit(text_[q])) {
        while (q < text_.size() && is_digit(text_[q])) ++q;
        p = q;
      } else {
        fail_at("malformed exponent in number", q);
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + p, v);
    if (ec != std::errc() || !std::isfinite(v)) fail_at("number out of range", start);
    pos_ = p;
    return v;
  }

  // ['-'] number ('^' exponent)?
  double exponent() {
    std::size_t start = (skip_ws(), pos_);
    bool negative = accept('-');
    auto n = try_number();
    if (!n) fail_at("non-constant exponent", start);
    // '^' binds tighter than unary minus here too: -2^0.5 is -(2^0.5).
    double v = *n;
    if (accept('^')) v = std::pow(v, exponent());
    if (!std::isfinite(v)) fail_at("exponent is not a finite number", start);
    return negative ? -v : v;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      std::size_t at = (skip_ws(), pos_);
      if (accept('+'))
        lhs = fold(Expr::binary(NodeKind::add, lhs, term()).with_offset(static_cast<long>(at)));
      else if (accept('-'))
        lhs = fold(Expr::binary(NodeKind::sub, lhs, term()).with_offset(static_cast<long>(at)));
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      std::size_t at = (skip_ws(), pos_);
      if (accept('*'))
        lhs = fold(Expr::binary(NodeKind::mul, lhs, factor()).with_offset(static_cast<long>(at)));
      else if (accept('/'))
        lhs = fold(Expr::binary(NodeKind::div, lhs, factor()).with_offset(static_cast<long>(at)));
      else
        return lhs;
    }
  }

  Expr factor() {
    std::size_t at = (skip_ws(), pos_);
    if (accept('-'))
      return fold(Expr::unary(NodeKind::neg, power()).with_offset(static_cast<long>(at)));
    return power();
  }

  Expr power() {
    Expr base = atom();
    std::size_t at = (skip_ws(), pos_);
    if (accept('^')) {
      double p = exponent();
      return fold(Expr::power(base, p).with_offset(static_cast<long>(at)));
    }
    return base;
  }

  Expr atom() {
    skip_ws();
    std::size_t at = pos_;
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (auto n = try_number()) return Expr::constant(*n).with_offset(static_cast<long>(at));
    if (accept('(')) {
      Expr e = expr();
      expect(')');
      return e;
    }
    if (!is_ident_start(text_[pos_])) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    std::size_t end = pos_;
    while (end < text_.size() && is_ident_char(text_[end])) ++end;
    std::string_view name = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (is_function_name(name)) return call(name, at);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return Expr::variable(i).with_offset(static_cast<long>(at));
    fail_at("unknown identifier '" + std::string(name) + "'", at);
  }

  Expr call(std::string_view name, std::size_t at) {
    expect('(');
    Expr arg = expr();
    std::optional<double> extra;
    std::size_t extra_at = (skip_ws(), pos_);
    if (accept(',')) {
      std::size_t num_at = (skip_ws(), pos_);
      bool negative = accept('-');
      auto n = try_number();
      if (!n) fail_at("non-constant exponent", num_at);
      extra = negative ? -*n : *n;
    }
    expect(')');
    long off = static_cast<long>(at);
    if (name == "spow") {
      if (!extra) fail_at("spow requires a constant exponent argument", extra_at);
      if (!(*extra > 1.0)) fail_at("spow exponent must be greater than 1", extra_at);
      return fold(Expr::signed_power(arg, *extra).with_offset(off));
    }
    if (extra) fail_at("'" + std::string(name) + "' takes one argument", extra_at);
    static constexpr std::pair<std::string_view, NodeKind> kFuncs[] = {
        {"sin", NodeKind::sin},   {"cos", NodeKind::cos},   {"exp", NodeKind::exp},
        {"log", NodeKind::log},   {"sqrt", NodeKind::sqrt}, {"abs", NodeKind::abs}};
    for (auto [n, k] : kFuncs)
      if (n == name) return fold(Expr::unary(k, arg).with_offset(off));
    fail_at("unknown function '" + std::string(name) + "'", at);
  }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Differentiation helpers. Besides constant folding these drop additive
// zeros and multiplicative ones/zeros, which keeps derivative trees of
// multivariate expressions from evaluating unrelated subterms.

Expr d_add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return fold(Expr::binary(NodeKind::add, a, b));
}

Expr d_neg(const Expr& a) {
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  return fold(Expr::unary(NodeKind::neg, a));
}

Expr d_sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return d_neg(b);
  return fold(Expr::binary(NodeKind::sub, a, b));
}

Expr d_mul(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return fold(Expr::binary(NodeKind::mul, a, b));
}

Expr d_div(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return fold(Expr::binary(NodeKind::div, a, b));
}

Expr d_pow(const Expr& a, double p) {
  if (p == 0.0) return Expr::constant(1.0);
  if (p == 1.0) return a;
  return fold(Expr::power(a, p));
}

}  // namespace

// ---------------------------------------------------------------------------

Expr::Expr() = default;

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->number = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::unary(NodeKind kind, Expr child) {
  if (!is_unary(kind)) throw std::invalid_argument("Expr::unary: not a unary kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(child);
  return Expr(std::move(n));
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw std::invalid_argument("Expr::binary: not a binary kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, double exponent) {
  if (!std::isfinite(exponent)) throw std::invalid_argument("Expr::power: non-finite exponent");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::pow;
  n->a = std::move(base);
  n->number = exponent;
  return Expr(std::move(n));
}

Expr Expr::signed_power(Expr base, double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent))
    throw std::invalid_argument("Expr::signed_power: exponent must be > 1");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::spow;
  n->a = std::move(base);
  n->number = exponent;
  return Expr(std::move(n));
}

Expr Expr::with_offset(long offset) const {
  auto n = node_ ? std::make_shared<Node>(*node_) : std::make_shared<Node>();
  n->offset = offset;
  return Expr(std::move(n));
}

namespace {
const Node kZeroNode{};
}

NodeKind Expr::kind() const { return (node_ ? *node_ : kZeroNode).kind; }
double Expr::number() const { return (node_ ? *node_ : kZeroNode).number; }
std::size_t Expr::variable_index() const { return (node_ ? *node_ : kZeroNode).index; }
const Expr& Expr::child() const { return (node_ ? *node_ : kZeroNode).a; }
const Expr& Expr::rhs() const { return (node_ ? *node_ : kZeroNode).b; }
long Expr::source_offset() const { return (node_ ? *node_ : kZeroNode).offset; }

double Expr::eval(std::span<const double> x) const { return eval_node(*this, x); }

std::size_t Expr::min_dimension() const {
  switch (kind()) {
    case NodeKind::constant: return 0;
    case NodeKind::variable: return variable_index() + 1;
    default: break;
  }
  std::size_t d = child().min_dimension();
  if (is_binary(kind())) d = std::max(d, rhs().min_dimension());
  return d;
}

std::size_t Expr::node_count() const {
  switch (kind()) {
    case NodeKind::constant:
    case NodeKind::variable:
      return 1;
    default:
      break;
  }
  std::size_t c = 1 + child().node_count();
  if (is_binary(kind())) c += rhs().node_count();
  return c;
}

std::string Expr::to_string(std::span<const std::string> names) const {
  switch (kind()) {
    case NodeKind::constant: {
      std::string s = format_number(number());
      return std::signbit(number()) ? "(" + s + ")" : s;
    }
    case NodeKind::variable:
      if (variable_index() < names.size()) return names[variable_index()];
      return "x" + std::to_string(variable_index() + 1);
    case NodeKind::neg:
      return "(-" + child().to_string(names) + ")";
    case NodeKind::add:
      return "(" + lhs().to_string(names) + " + " + rhs().to_string(names) + ")";
    case NodeKind::sub:
      return "(" + lhs().to_string(names) + " - " + rhs().to_string(names) + ")";
    case NodeKind::mul:
      return "(" + lhs().to_string(names) + " * " + rhs().to_string(names) + ")";
    case NodeKind::div:
      return "(" + lhs().to_string(names) + " / " + rhs().to_string(names) + ")";
    case NodeKind::pow:
      return "(" + child().to_string(names) + "^" + format_number(number()) + ")";
    case NodeKind::spow:
      return "spow(" + child().to_string(names) + ", " + format_number(number()) + ")";
    default:
      return std::string(function_name(kind())) + "(" + child().to_string(names) + ")";
  }
}

bool is_function_name(std::string_view name) {
  return name == "sin" || name == "cos" || name == "exp" || name == "log" ||
         name == "sqrt" || name == "abs" || name == "spow";
}

Expr parse(std::string_view text, std::span<const std::string> vars) {
  return Parser(text, vars).run();
}

Expr differentiate(const Expr& e, std::size_t var) {
  switch (e.kind()) {
    case NodeKind::constant:
      return Expr::constant(0.0);
    case NodeKind::variable:
      return Expr::constant(e.variable_index() == var ? 1.0 : 0.0);
    case NodeKind::abs_slope:
      // piecewise constant; the kink itself errors when the slope is evaluated
      return Expr::constant(0.0);
    default:
      break;
  }
  const Expr& u = e.child();
  Expr du = differentiate(u, var);
  switch (e.kind()) {
    case NodeKind::neg:
      return d_neg(du);
    case NodeKind::sin:
      return d_mul(fold(Expr::unary(NodeKind::cos, u)), du);
    case NodeKind::cos:
      return d_neg(d_mul(fold(Expr::unary(NodeKind::sin, u)), du));
    case NodeKind::exp:
      return d_mul(e, du);
    case NodeKind::log:
      return d_div(du, u);
    case NodeKind::sqrt:
      return d_div(du, d_mul(Expr::constant(2.0), e));
    case NodeKind::abs:
      return d_mul(Expr::unary(NodeKind::abs_slope, u), du);
    case NodeKind::pow:
      return d_mul(d_mul(Expr::constant(e.number()), d_pow(u, e.number() - 1.0)), du);
    case NodeKind::spow: {
      Expr mag = d_pow(fold(Expr::unary(NodeKind::abs, u)), e.number() - 1.0);
      return d_mul(d_mul(Expr::constant(e.number()), mag), du);
    }
    default:
      break;
  }
  const Expr& v = e.rhs();
  Expr dv = differentiate(v, var);
  switch (e.kind()) {
    case NodeKind::add:
      return d_add(du, dv);
    case NodeKind::sub:
      return d_sub(du, dv);
    case NodeKind::mul:
      return d_add(d_mul(du, v), d_mul(u, dv));
    case NodeKind::div:
      return d_div(d_sub(d_mul(du, v), d_mul(u, dv)), d_mul(v, v));
    default:
      break;
  }
  return Expr::constant(0.0);
}

Gradient gradient(const Expr& e, std::size_t dimension) {
  Gradient g;
  g.reserve(dimension);
  for (std::size_t k = 0; k < dimension; ++k) g.push_back(differentiate(e, k));
  return g;
}

std::vector<double> eval_gradient(const Gradient& g, std::span<const double> x) {
  std::vector<double> out;
  out.reserve(g.size());
  for (const auto& gk : g) out.push_back(gk.eval(x));
  return out;
}

}  // namespace sockkt
