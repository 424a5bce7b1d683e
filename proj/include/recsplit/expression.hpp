#pragma once

// Integer arithmetic expressions over the variables x and y, used for the
// base and step functions of a recursion scheme.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace recsplit {

/// Arbitrary-precision value computed by base/step expressions.
using Value = boost::multiprecision::cpp_int;

enum class Var { X, Y };

std::string_view var_name(Var v);

/// Set of variables an expression may mention.
class VarSet {
 public:
  constexpr VarSet() = default;
  VarSet(std::initializer_list<Var> vars) {
    for (Var v : vars) insert(v);
  }
  void insert(Var v) { bits_ |= mask(v); }
  bool contains(Var v) const { return (bits_ & mask(v)) != 0; }
  bool operator==(const VarSet&) const = default;

 private:
  static constexpr unsigned mask(Var v) { return v == Var::X ? 1u : 2u; }
  unsigned bits_ = 0;
};

enum class ExprKind { Const, Variable, Add, Sub, Mul, Neg };

/// Immutable expression tree. Copies share nodes.
class Expression {
 public:
  static Expression constant(Value v);
  static Expression variable(Var v);
  static Expression add(Expression lhs, Expression rhs);
  static Expression sub(Expression lhs, Expression rhs);
  static Expression mul(Expression lhs, Expression rhs);
  static Expression neg(Expression operand);

  ExprKind kind() const;
  const Value& constant_value() const;  // Const only
  Var var() const;                      // Variable only
  const Expression& lhs() const;        // binary nodes, and the operand of Neg
  const Expression& rhs() const;        // binary nodes

  /// Variables occurring anywhere in the tree.
  VarSet free_vars() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class ExprSyntaxError : public std::runtime_error {
 public:
  ExprSyntaxError(const std::string& msg, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UndeclaredVariable : public std::runtime_error {
 public:
  UndeclaredVariable(const std::string& name, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(Var v);
};

/// Grammar: expr := term (('+'|'-') term)*; term := unary ('*' unary)*;
/// unary := '-' unary | atom; atom := integer | identifier | '(' expr ')'.
Expression parse_expr(std::string_view text, VarSet allowed);

/// Fully parenthesises only where precedence requires it; parse_expr reads it back.
std::string pretty_print(const Expression& e);

struct Env {
  std::optional<Value> x;
  std::optional<Value> y;
};

Value eval_expr(const Expression& e, const Env& env);

}  // namespace recsplit
