#include "recsplit/expression.hpp"

#include <cctype>
#include <utility>

namespace recsplit {

std::string_view var_name(Var v) { return v == Var::X ? "x" : "y"; }

struct Expression::Node {
  ExprKind kind;
  Value value;
  Var var = Var::X;
  std::optional<Expression> lhs;
  std::optional<Expression> rhs;
};

Expression Expression::constant(Value v) {
  return Expression(std::make_shared<const Node>(Node{ExprKind::Const, std::move(v), Var::X, {}, {}}));
}

Expression Expression::variable(Var v) {
  return Expression(std::make_shared<const Node>(Node{ExprKind::Variable, 0, v, {}, {}}));
}

Expression Expression::add(Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const Node>(
      Node{ExprKind::Add, 0, Var::X, std::move(lhs), std::move(rhs)}));
}

Expression Expression::sub(Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const Node>(
      Node{ExprKind::Sub, 0, Var::X, std::move(lhs), std::move(rhs)}));
}

Expression Expression::mul(Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const Node>(
      Node{ExprKind::Mul, 0, Var::X, std::move(lhs), std::move(rhs)}));
}

Expression Expression::neg(Expression operand) {
  return Expression(
      std::make_shared<const Node>(Node{ExprKind::Neg, 0, Var::X, std::move(operand), {}}));
}

ExprKind Expression::kind() const { return node_->kind; }
const Value& Expression::constant_value() const { return node_->value; }
Var Expression::var() const { return node_->var; }
const Expression& Expression::lhs() const { return *node_->lhs; }
const Expression& Expression::rhs() const { return *node_->rhs; }

VarSet Expression::free_vars() const {
  VarSet out;
  switch (kind()) {
    case ExprKind::Const:
      break;
    case ExprKind::Variable:
      out.insert(var());
      break;
    case ExprKind::Neg:
      out = lhs().free_vars();
      break;
    default: {
      VarSet l = lhs().free_vars();
      VarSet r = rhs().free_vars();
      for (Var v : {Var::X, Var::Y})
        if (l.contains(v) || r.contains(v)) out.insert(v);
    }
  }
  return out;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Const:
      return a.constant_value() == b.constant_value();
    case ExprKind::Variable:
      return a.var() == b.var();
    case ExprKind::Neg:
      return a.lhs() == b.lhs();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

ExprSyntaxError::ExprSyntaxError(const std::string& msg, std::size_t position)
    : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + msg),
      position_(position) {}

UndeclaredVariable::UndeclaredVariable(const std::string& name, std::size_t position)
    : std::runtime_error("undeclared variable '" + name + "' at position " +
                         std::to_string(position)),
      position_(position) {}

UnboundVariable::UnboundVariable(Var v)
    : std::runtime_error("variable '" + std::string(var_name(v)) + "' is not bound") {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, VarSet allowed) : text_(text), allowed_(allowed) {}

  Expression parse() {
    Expression e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprSyntaxError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+'))
        e = Expression::add(e, term());
      else if (accept('-'))
        e = Expression::sub(e, term());
      else
        return e;
    }
  }

  Expression term() {
    Expression e = unary();
    while (accept('*')) e = Expression::mul(e, unary());
    return e;
  }

  Expression unary() {
    if (accept('-')) {
      // A minus glued to a literal is a negative constant.
      if (at_digit()) return Expression::constant(-literal());
      return Expression::neg(unary());
    }
    return atom();
  }

  Value literal() {
    std::size_t start = pos_;
    while (at_digit()) ++pos_;
    return Value(std::string(text_.substr(start, pos_ - start)));
  }

  Expression atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return Expression::constant(literal());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      std::optional<Var> v;
      if (name == "x") v = Var::X;
      if (name == "y") v = Var::Y;
      if (!v || !allowed_.contains(*v)) throw UndeclaredVariable(name, start);
      return Expression::variable(*v);
    }
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  VarSet allowed_;
  std::size_t pos_ = 0;
};

int precedence(const Expression& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
      return 2;
    case ExprKind::Neg:
      return 3;
    default:
      return 4;
  }
}

void print(const Expression& e, std::string& out);

void print_paren(const Expression& e, bool paren, std::string& out) {
  if (paren) out += '(';
  print(e, out);
  if (paren) out += ')';
}

void print(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Const:
      if (e.constant_value() < 0)
        out += "(" + e.constant_value().str() + ")";
      else
        out += e.constant_value().str();
      return;
    case ExprKind::Variable:
      out += var_name(e.var());
      return;
    case ExprKind::Neg: {
      out += '-';
      const Expression& operand = e.lhs();
      // "-5" would read back as a negative literal.
      bool paren = precedence(operand) < 3 ||
                   (operand.kind() == ExprKind::Const && operand.constant_value() >= 0);
      print_paren(operand, paren, out);
      return;
    }
    default: {
      int p = precedence(e);
      print_paren(e.lhs(), precedence(e.lhs()) < p, out);
      out += e.kind() == ExprKind::Add ? '+' : e.kind() == ExprKind::Sub ? '-' : '*';
      print_paren(e.rhs(), precedence(e.rhs()) <= p, out);
    }
  }
}

}  // namespace

Expression parse_expr(std::string_view text, VarSet allowed) {
  return Parser(text, allowed).parse();
}

std::string pretty_print(const Expression& e) {
  std::string out;
  print(e, out);
  return out;
}

Value eval_expr(const Expression& e, const Env& env) {
  switch (e.kind()) {
    case ExprKind::Const:
      return e.constant_value();
    case ExprKind::Variable: {
      const std::optional<Value>& v = e.var() == Var::X ? env.x : env.y;
      if (!v) throw UnboundVariable(e.var());
      return *v;
    }
    case ExprKind::Neg:
      return -eval_expr(e.lhs(), env);
    case ExprKind::Add:
      return eval_expr(e.lhs(), env) + eval_expr(e.rhs(), env);
    case ExprKind::Sub:
      return eval_expr(e.lhs(), env) - eval_expr(e.rhs(), env);
    case ExprKind::Mul:
      return eval_expr(e.lhs(), env) * eval_expr(e.rhs(), env);
  }
  return 0;
}

}  // namespace recsplit
