#pragma once

// Scalar expressions over chart coordinates.
//
// Grammar (whitespace insignificant):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | var | func '(' expr ')' | '(' expr ')' | '-' factor
// Variables are positional: x<i>, y<A>, z<A> (1-based) and t.
// Functions: sin cos exp log sqrt abs.

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "linconn/dual.hpp"
#include "linconn/errors.hpp"

namespace linconn {

enum class VarKind { X, Y, Z, T };
enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs };

struct ExprNode;

class Expr {
 public:
  /// The literal 0.
  Expr();

  const ExprNode& node() const { return *node_; }

  static Expr literal(double v);
  static Expr variable(VarKind kind, std::size_t index);  // index is 0-based; ignored for T
  static Expr binary(BinOp op, Expr lhs, Expr rhs);
  static Expr negate(Expr operand);
  static Expr call(Func fn, Expr arg);

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

  /// True if any variable of the given kind appears.
  bool references(VarKind kind) const;
  /// True if the tree is a single numeric literal.
  bool is_literal() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct Literal {
  double value;
};
struct Variable {
  VarKind kind;
  std::size_t index;  // 0-based
};
struct Binary {
  BinOp op;
  Expr lhs;
  Expr rhs;
};
struct Negate {
  Expr operand;
};
struct Call {
  Func fn;
  Expr arg;
};

struct ExprNode {
  std::variant<Literal, Variable, Binary, Negate, Call> v;
};

// Composition helpers. No simplification beyond dropping literal zeros.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr parse(std::string_view text);

/// Prints text that parses back to the same tree.
std::string to_string(const Expr& e);

std::string variable_name(VarKind kind, std::size_t index);

/// Comparison-based predicate: comparisons joined by `and` / `or`
/// (`and` binds tighter). Evaluated on real parts.
class Predicate {
 public:
  enum class Cmp { Lt, Gt, Le, Ge };
  struct Comparison {
    Expr lhs;
    Cmp op;
    Expr rhs;
  };
  // Disjunction of conjunctions.
  std::vector<std::vector<Comparison>> clauses;

  bool references(VarKind kind) const;
};

Predicate parse_predicate(std::string_view text);

/// Variable bindings. Looking up an unbound name is an error.
template <class S>
class Env {
 public:
  Env() = default;

  Env& bind(VarKind kind, std::size_t index, S value) {
    if (kind == VarKind::T) {
      t_ = std::move(value);
      return *this;
    }
    auto k = static_cast<std::size_t>(kind);
    if (vals_[k].size() <= index) {
      vals_[k].resize(index + 1, S(0.0));
      bound_[k].resize(index + 1, false);
    }
    vals_[k][index] = std::move(value);
    bound_[k][index] = true;
    return *this;
  }

  Env& bind_all(VarKind kind, std::span<const S> values) {
    for (std::size_t i = 0; i < values.size(); ++i) bind(kind, i, values[i]);
    return *this;
  }

  /// Binds a name such as "y2" or "t".
  Env& bind(std::string_view name, S value);

  const S& lookup(VarKind kind, std::size_t index) const {
    if (kind == VarKind::T) {
      if (!t_) throw UnboundVariable("t");
      return *t_;
    }
    auto k = static_cast<std::size_t>(kind);
    if (index >= vals_[k].size() || !bound_[k][index])
      throw UnboundVariable(variable_name(kind, index));
    return vals_[k][index];
  }

 private:
  std::array<std::vector<S>, 3> vals_;
  std::array<std::vector<bool>, 3> bound_;
  std::optional<S> t_;
};

/// Splits "y12" into (Y, 11). Throws SyntaxError at offset 0 if malformed.
std::pair<VarKind, std::size_t> parse_variable_name(std::string_view name);

template <class S>
Env<S>& Env<S>::bind(std::string_view name, S value) {
  auto [kind, index] = parse_variable_name(name);
  return bind(kind, index, std::move(value));
}

/// Environment over (x, y), the common case.
template <class S>
Env<S> make_env(std::span<const S> x, std::span<const S> y) {
  Env<S> env;
  env.bind_all(VarKind::X, x);
  env.bind_all(VarKind::Y, y);
  return env;
}

namespace detail {

template <class S>
S int_pow(S base, long n) {
  if (n < 0) {
    if (value_of(base) == 0.0) throw DomainError("division by zero in negative power");
    return S(1.0) / int_pow(base, -n);
  }
  S result(1.0);
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

/// Value of a literal or a negated literal.
inline std::optional<double> constant_value(const Expr& e) {
  const auto& v = e.node().v;
  if (auto* lit = std::get_if<Literal>(&v)) return lit->value;
  if (auto* neg = std::get_if<Negate>(&v))
    if (auto* lit = std::get_if<Literal>(&neg->operand.node().v)) return -lit->value;
  return std::nullopt;
}

}  // namespace detail

template <class S>
S eval(const Expr& e, const Env<S>& env) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  const auto& v = e.node().v;
  if (auto* lit = std::get_if<Literal>(&v)) return S(lit->value);
  if (auto* var = std::get_if<Variable>(&v)) return env.lookup(var->kind, var->index);
  if (auto* neg = std::get_if<Negate>(&v)) return -eval(neg->operand, env);
  if (auto* call = std::get_if<Call>(&v)) {
    S a = eval(call->arg, env);
    double re = value_of(a);
    switch (call->fn) {
      case Func::Sin:
        return sin(a);
      case Func::Cos:
        return cos(a);
      case Func::Exp:
        return exp(a);
      case Func::Log:
        if (!(re > 0.0)) throw DomainError("log of non-positive argument");
        return log(a);
      case Func::Sqrt:
        if (re < 0.0) throw DomainError("sqrt of negative argument");
        if constexpr (!is_real_v<S>) {
          if (re == 0.0) throw DomainError("sqrt is not differentiable at 0");
        }
        return sqrt(a);
      case Func::Abs:
        if constexpr (is_real_v<S>) {
          return std::abs(a);
        } else {
          if (re == 0.0) throw DomainError("abs is not differentiable at 0");
          return re < 0.0 ? -a : a;
        }
    }
  }
  const auto& bin = std::get<Binary>(v);
  if (auto c = bin.op == BinOp::Pow ? detail::constant_value(bin.rhs) : std::nullopt) {
    double p = *c;
    S base = eval(bin.lhs, env);
    if (p == std::floor(p) && std::abs(p) < 1e9) return detail::int_pow(base, static_cast<long>(p));
    if (!(value_of(base) > 0.0)) throw DomainError("non-integer power of non-positive base");
    if constexpr (is_real_v<S>) {
      return std::pow(base, p);
    } else {
      return exp(S(p) * log(base));
    }
  }
  S a = eval(bin.lhs, env);
  S b = eval(bin.rhs, env);
  switch (bin.op) {
    case BinOp::Add:
      return a + b;
    case BinOp::Sub:
      return a - b;
    case BinOp::Mul:
      return a * b;
    case BinOp::Div:
      if (value_of(b) == 0.0) throw DomainError("division by zero");
      return a / b;
    case BinOp::Pow:
      if (!(value_of(a) > 0.0)) throw DomainError("variable power of non-positive base");
      return exp(b * log(a));
  }
  throw DomainError("unreachable");
}

template <class S>
std::vector<S> eval_all(std::span<const Expr> es, const Env<S>& env) {
  std::vector<S> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(eval(e, env));
  return out;
}

/// Evaluates a predicate on real parts of the bound values.
bool holds(const Predicate& p, const Env<double>& env);

}  // namespace linconn
