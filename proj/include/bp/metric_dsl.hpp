// SPDX-License-Identifier: Apache-2.0
#pragma once

// Expression language for metric coefficients g_ij(x1, ..., xn).
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right associative)
//   atom   := number | x<k> | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | sinh | cosh | exp | log | sqrt
//
// Implicit multiplication is rejected. Variables are 1-based (x1 .. xn).

#include "bp/jet.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bp {

enum class Function { Sin, Cos, Sinh, Cosh, Exp, Log, Sqrt };

struct ExprNode {
  enum class Kind { Number, Variable, Negate, Binary, Call };

  Kind kind = Kind::Number;
  double value = 0.0;  // Number
  int variable = 0;    // Variable, 0-based
  char op = 0;         // Binary: one of + - * / ^
  Function function = Function::Sin;
  std::shared_ptr<const ExprNode> lhs;  // operand of Negate / Call, left of Binary
  std::shared_ptr<const ExprNode> rhs;
  std::size_t begin = 0;  // source span
  std::size_t end = 0;
};

/// Parsed, immutable expression. Copies share the tree.
class Expression {
public:
  enum class OpCode : std::uint8_t {
    Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Sinh, Cosh, Exp, Log, Sqrt
  };
  struct Instr {
    OpCode op;
    int index;
    double value;
    std::uint32_t begin;
    std::uint32_t end;
  };

  Expression() = default;
  Expression(std::shared_ptr<const ExprNode> root, int dim, std::string source);

  const ExprNode& root() const { return *root_; }
  int dim() const { return dim_; }
  const std::string& source() const { return source_; }
  const std::vector<Instr>& program() const { return program_; }
  std::size_t stack_depth() const { return stack_depth_; }

private:
  std::shared_ptr<const ExprNode> root_;
  int dim_ = 0;
  std::string source_;
  std::vector<Instr> program_;
  std::size_t stack_depth_ = 0;
};

/// Throws SyntaxError, Error(UnknownIdentifier) or Error(VariableIndexOutOfRange).
Expression parse_expression(std::string_view src, int dim);

/// IEEE double evaluation. Throws DomainError for log/sqrt of a negative
/// value, division by zero and non-real powers.
double evaluate(const Expression& e, std::span<const double> coords);

/// Evaluation with exact first (and second) partial derivatives.
Jet<1> evaluate_jet1(const Expression& e, std::span<const double> coords);
Jet<2> evaluate_jet2(const Expression& e, std::span<const double> coords);

/// Minimal-parenthesis rendering that reparses to the same tree.
std::string to_string(const Expression& e);

/// Tree equality ignoring source positions.
bool structurally_equal(const ExprNode& a, const ExprNode& b);

}  // namespace bp
