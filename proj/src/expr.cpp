#include "linconn/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace linconn {

namespace {

std::shared_ptr<const ExprNode> make_node(auto&& alt) {
  return std::make_shared<const ExprNode>(ExprNode{std::forward<decltype(alt)>(alt)});
}

bool is_zero_literal(const Expr& e) {
  auto* lit = std::get_if<Literal>(&e.node().v);
  return lit && lit->value == 0.0;
}

}  // namespace

Expr::Expr() : node_(make_node(Literal{0.0})) {}

Expr Expr::literal(double v) { return Expr(make_node(Literal{v})); }
Expr Expr::variable(VarKind kind, std::size_t index) {
  return Expr(make_node(Variable{kind, kind == VarKind::T ? 0 : index}));
}
Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  return Expr(make_node(Binary{op, std::move(lhs), std::move(rhs)}));
}
Expr Expr::negate(Expr operand) { return Expr(make_node(Negate{std::move(operand)})); }
Expr Expr::call(Func fn, Expr arg) { return Expr(make_node(Call{fn, std::move(arg)})); }

bool Expr::is_literal() const { return std::holds_alternative<Literal>(node_->v); }

bool Expr::references(VarKind kind) const {
  const auto& v = node_->v;
  if (auto* var = std::get_if<Variable>(&v)) return var->kind == kind;
  if (auto* bin = std::get_if<Binary>(&v)) return bin->lhs.references(kind) || bin->rhs.references(kind);
  if (auto* neg = std::get_if<Negate>(&v)) return neg->operand.references(kind);
  if (auto* call = std::get_if<Call>(&v)) return call->arg.references(kind);
  return false;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& va = a.node().v;
  const auto& vb = b.node().v;
  if (va.index() != vb.index()) return false;
  if (auto* l = std::get_if<Literal>(&va)) return l->value == std::get<Literal>(vb).value;
  if (auto* x = std::get_if<Variable>(&va)) {
    const auto& y = std::get<Variable>(vb);
    return x->kind == y.kind && x->index == y.index;
  }
  if (auto* x = std::get_if<Binary>(&va)) {
    const auto& y = std::get<Binary>(vb);
    return x->op == y.op && x->lhs == y.lhs && x->rhs == y.rhs;
  }
  if (auto* x = std::get_if<Negate>(&va)) return x->operand == std::get<Negate>(vb).operand;
  const auto& x = std::get<Call>(va);
  const auto& y = std::get<Call>(vb);
  return x.fn == y.fn && x.arg == y.arg;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (is_zero_literal(a)) return b;
  if (is_zero_literal(b)) return a;
  return Expr::binary(BinOp::Add, a, b);
}
Expr operator-(const Expr& a, const Expr& b) {
  if (is_zero_literal(b)) return a;
  if (is_zero_literal(a)) return -b;
  return Expr::binary(BinOp::Sub, a, b);
}
Expr operator*(const Expr& a, const Expr& b) {
  if (is_zero_literal(a) || is_zero_literal(b)) return Expr::literal(0.0);
  return Expr::binary(BinOp::Mul, a, b);
}
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinOp::Div, a, b); }
Expr operator-(const Expr& a) {
  if (is_zero_literal(a)) return a;
  return Expr::negate(a);
}

std::string variable_name(VarKind kind, std::size_t index) {
  switch (kind) {
    case VarKind::X:
      return "x" + std::to_string(index + 1);
    case VarKind::Y:
      return "y" + std::to_string(index + 1);
    case VarKind::Z:
      return "z" + std::to_string(index + 1);
    case VarKind::T:
      return "t";
  }
  return "?";
}

std::pair<VarKind, std::size_t> parse_variable_name(std::string_view name) {
  if (name == "t") return {VarKind::T, 0};
  if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z')) {
    std::size_t idx = 0;
    auto digits = name.substr(1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && idx >= 1 && digits[0] != '0') {
      VarKind k = name[0] == 'x' ? VarKind::X : name[0] == 'y' ? VarKind::Y : VarKind::Z;
      return {k, idx - 1};
    }
  }
  throw SyntaxError("unknown variable '" + std::string(name) + "'", 0);
}

namespace {

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin:
      return "sin";
    case Func::Cos:
      return "cos";
    case Func::Exp:
      return "exp";
    case Func::Log:
      return "log";
    case Func::Sqrt:
      return "sqrt";
    case Func::Abs:
      return "abs";
  }
  return "?";
}

std::optional<Func> lookup_func(std::string_view name) {
  for (Func f : {Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Abs})
    if (name == func_name(f)) return f;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_ws();
      if (peek('+')) {
        ++pos_;
        lhs = Expr::binary(BinOp::Add, lhs, term());
      } else if (peek('-')) {
        ++pos_;
        lhs = Expr::binary(BinOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Predicate predicate() {
    Predicate p;
    p.clauses.push_back({comparison()});
    for (;;) {
      skip_ws();
      if (keyword("and")) {
        p.clauses.back().push_back(comparison());
      } else if (keyword("or")) {
        p.clauses.push_back({comparison()});
      } else {
        return p;
      }
    }
  }

  void expect_end() {
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
  }

 private:
  Expr term() {
    Expr lhs = factor();
    for (;;) {
      skip_ws();
      if (peek('*')) {
        ++pos_;
        lhs = Expr::binary(BinOp::Mul, lhs, factor());
      } else if (peek('/')) {
        ++pos_;
        lhs = Expr::binary(BinOp::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    Expr base = atom();
    skip_ws();
    if (peek('^')) {
      ++pos_;
      return Expr::binary(BinOp::Pow, base, factor());
    }
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      if (auto lit = negative_literal()) return *lit;
      Expr inner = expr();
      skip_ws();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return Expr::negate(factor());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string_view name = s_.substr(start, pos_ - start);
      skip_ws();
      if (peek('(')) {
        auto fn = lookup_func(name);
        if (!fn) throw SyntaxError("unknown function '" + std::string(name) + "'", start + 1);
        ++pos_;
        Expr arg = expr();
        skip_ws();
        if (!peek(')')) fail("expected ')'");
        ++pos_;
        return Expr::call(*fn, arg);
      }
      try {
        auto [kind, index] = parse_variable_name(name);
        return Expr::variable(kind, index);
      } catch (const SyntaxError&) {
        throw SyntaxError("unknown variable '" + std::string(name) + "'", start + 1);
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  // "(-<number>)" is a negative literal, the form printed for one.
  std::optional<Expr> negative_literal() {
    std::size_t save = pos_;
    skip_ws();
    if (peek('-')) {
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        double v = std::get<Literal>(number().node().v).value;
        skip_ws();
        if (peek(')')) {
          ++pos_;
          return Expr::literal(-v);
        }
      }
    }
    pos_ = save;
    return std::nullopt;
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) throw SyntaxError("malformed number", start + 1);
    return Expr::literal(v);
  }

  Predicate::Comparison comparison() {
    Expr lhs = expr();
    skip_ws();
    Predicate::Cmp op;
    if (s_.substr(pos_, 2) == "<=") {
      op = Predicate::Cmp::Le;
      pos_ += 2;
    } else if (s_.substr(pos_, 2) == ">=") {
      op = Predicate::Cmp::Ge;
      pos_ += 2;
    } else if (peek('<')) {
      op = Predicate::Cmp::Lt;
      ++pos_;
    } else if (peek('>')) {
      op = Predicate::Cmp::Gt;
      ++pos_;
    } else {
      fail("expected comparison operator");
    }
    return {lhs, op, expr()};
  }

  bool keyword(std::string_view kw) {
    if (s_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_ + 1); }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void print(const Expr& e, std::string& out) {
  const auto& v = e.node().v;
  if (auto* lit = std::get_if<Literal>(&v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", lit->value);
    if (lit->value < 0 || std::signbit(lit->value)) {
      out += "(";
      out += buf;
      out += ")";
    } else {
      out += buf;
    }
  } else if (auto* var = std::get_if<Variable>(&v)) {
    out += variable_name(var->kind, var->index);
  } else if (auto* neg = std::get_if<Negate>(&v)) {
    // A bare literal operand gets its own parentheses so it does not read
    // back as a negative literal.
    bool wrap = neg->operand.is_literal();
    out += wrap ? "(-(" : "(-";
    print(neg->operand, out);
    out += wrap ? "))" : ")";
  } else if (auto* call = std::get_if<Call>(&v)) {
    out += func_name(call->fn);
    out += "(";
    print(call->arg, out);
    out += ")";
  } else {
    const auto& bin = std::get<Binary>(v);
    static constexpr char ops[] = {'+', '-', '*', '/', '^'};
    out += "(";
    print(bin.lhs, out);
    out += ' ';
    out += ops[static_cast<int>(bin.op)];
    out += ' ';
    print(bin.rhs, out);
    out += ")";
  }
}

}  // namespace

Expr parse(std::string_view text) {
  Parser p(text);
  Expr e = p.expr();
  p.expect_end();
  return e;
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

Predicate parse_predicate(std::string_view text) {
  Parser p(text);
  Predicate pred = p.predicate();
  p.expect_end();
  return pred;
}

bool Predicate::references(VarKind kind) const {
  for (const auto& clause : clauses)
    for (const auto& c : clause)
      if (c.lhs.references(kind) || c.rhs.references(kind)) return true;
  return false;
}

bool holds(const Predicate& p, const Env<double>& env) {
  for (const auto& clause : p.clauses) {
    bool all = true;
    for (const auto& c : clause) {
      double l = eval(c.lhs, env);
      double r = eval(c.rhs, env);
      bool ok = false;
      switch (c.op) {
        case Predicate::Cmp::Lt:
          ok = l < r;
          break;
        case Predicate::Cmp::Gt:
          ok = l > r;
          break;
        case Predicate::Cmp::Le:
          ok = l <= r;
          break;
        case Predicate::Cmp::Ge:
          ok = l >= r;
          break;
      }
      if (!ok) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace linconn
