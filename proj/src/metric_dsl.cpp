// SPDX-License-Identifier: Apache-2.0
#include "bp/metric_dsl.hpp"

#include "bp/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

namespace bp {
namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t begin;
  std::size_t end;
  double number = 0.0;
};

const std::vector<std::string> kOperandStart = {"number", "identifier", "'('", "'-'"};

std::string_view tok_name(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (true) {
      while (i < src_.size() && (src_[i] == ' ' || src_[i] == '\t' || src_[i] == '\n' || src_[i] == '\r')) ++i;
      if (i >= src_.size()) {
        out.push_back({Tok::End, i, i});
        return out;
      }
      const char c = src_[i];
      if (is_digit(c) || (c == '.' && i + 1 < src_.size() && is_digit(src_[i + 1]))) {
        out.push_back(number(i));
        i = out.back().end;
        continue;
      }
      if (is_alpha(c)) {
        std::size_t j = i + 1;
        while (j < src_.size() && (is_alpha(src_[j]) || is_digit(src_[j]))) ++j;
        out.push_back({Tok::Ident, i, j});
        i = j;
        continue;
      }
      Tok t;
      switch (c) {
        case '+': t = Tok::Plus; break;
        case '-': t = Tok::Minus; break;
        case '*': t = Tok::Star; break;
        case '/': t = Tok::Slash; break;
        case '^': t = Tok::Caret; break;
        case '(': t = Tok::LParen; break;
        case ')': t = Tok::RParen; break;
        default:
          throw SyntaxError(i, {"number", "identifier", "operator", "'('", "')'"},
                            "unexpected character '" + std::string(1, c) + "' at position " +
                                std::to_string(i));
      }
      out.push_back({t, i, i + 1});
      ++i;
    }
  }

private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  Token number(std::size_t start) {
    std::size_t j = start;
    while (j < src_.size() && is_digit(src_[j])) ++j;
    if (j < src_.size() && src_[j] == '.') {
      ++j;
      while (j < src_.size() && is_digit(src_[j])) ++j;
    }
    if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && is_digit(src_[k])) {
        while (k < src_.size() && is_digit(src_[k])) ++k;
        j = k;
      } else {
        throw SyntaxError(k, {"digit"}, "malformed exponent in numeric literal at position " +
                                            std::to_string(start));
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + j, value);
    if (res.ec != std::errc() || !std::isfinite(value)) {
      throw SyntaxError(start, {"finite number"},
                        "numeric literal out of range at position " + std::to_string(start));
    }
    return {Tok::Number, start, j, value};
  }

  std::string_view src_;
};

std::optional<Function> function_named(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, Function>, 7> table{{
      {"sin", Function::Sin},
      {"cos", Function::Cos},
      {"sinh", Function::Sinh},
      {"cosh", Function::Cosh},
      {"exp", Function::Exp},
      {"log", Function::Log},
      {"sqrt", Function::Sqrt},
  }};
  for (const auto& [n, f] : table)
    if (n == name) return f;
  return std::nullopt;
}

std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Sinh: return "sinh";
    case Function::Cosh: return "cosh";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

// Binding powers: + - 10, * / 20, unary minus 30, ^ 40.
constexpr int kBpUnary = 30;

int infix_bp(Tok t) {
  switch (t) {
    case Tok::Plus:
    case Tok::Minus: return 10;
    case Tok::Star:
    case Tok::Slash: return 20;
    case Tok::Caret: return 40;
    default: return -1;
  }
}

using NodePtr = std::shared_ptr<const ExprNode>;

class Parser {
public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim), toks_(Lexer(src).run()) {}

  NodePtr parse() {
    NodePtr e = expr(0);
    if (peek().kind != Tok::End) unexpected({"operator", "end of input"});
    return e;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void unexpected(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "unexpected " + std::string(tok_name(t.kind)) + " at position " + std::to_string(t.begin) +
                      ", expected one of:";
    for (const auto& e : expected) msg += " " + e;
    throw SyntaxError(t.begin, std::move(expected), msg);
  }

  NodePtr expr(int min_bp) {
    NodePtr lhs = prefix();
    while (true) {
      const Tok t = peek().kind;
      const int bp = infix_bp(t);
      if (bp < 0) {
        if (t == Tok::End || t == Tok::RParen) break;
        unexpected({"operator", "')'", "end of input"});
      }
      if (bp <= min_bp) break;
      next();
      // '^' is right associative: its right operand may contain another '^'.
      const int rbp = t == Tok::Caret ? bp - 1 : bp;
      NodePtr rhs = expr(rbp);
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::Binary;
      node->op = t == Tok::Plus ? '+' : t == Tok::Minus ? '-' : t == Tok::Star ? '*' : t == Tok::Slash ? '/' : '^';
      node->lhs = lhs;
      node->rhs = rhs;
      node->begin = lhs->begin;
      node->end = rhs->end;
      lhs = node;
    }
    return lhs;
  }

  NodePtr prefix() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Number;
        node->value = t.number;
        node->begin = t.begin;
        node->end = t.end;
        return node;
      }
      case Tok::Minus: {
        next();
        NodePtr operand = expr(kBpUnary);
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Negate;
        node->lhs = operand;
        node->begin = t.begin;
        node->end = operand->end;
        return node;
      }
      case Tok::LParen: {
        next();
        NodePtr inner = expr(0);
        if (peek().kind != Tok::RParen) unexpected({"operator", "')'"});
        next();
        return inner;
      }
      case Tok::Ident: return identifier();
      default: unexpected(kOperandStart);
    }
  }

  NodePtr identifier() {
    const Token t = next();
    const std::string_view name = src_.substr(t.begin, t.end - t.begin);
    if (auto f = function_named(name)) {
      if (peek().kind != Tok::LParen) unexpected({"'('"});
      next();
      NodePtr arg = expr(0);
      if (peek().kind != Tok::RParen) unexpected({"operator", "')'"});
      const Token close = next();
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::Call;
      node->function = *f;
      node->lhs = arg;
      node->begin = t.begin;
      node->end = close.end;
      return node;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) digits = digits && name[i] >= '0' && name[i] <= '9';
      if (digits) {
        int index = 0;
        const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (res.ec != std::errc() || index < 1 || index > dim_) {
          throw Error(Errc::VariableIndexOutOfRange,
                      "variable '" + std::string(name) + "' at position " + std::to_string(t.begin) +
                          " is outside x1..x" + std::to_string(dim_));
        }
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Variable;
        node->variable = index - 1;
        node->begin = t.begin;
        node->end = t.end;
        return node;
      }
    }
    throw Error(Errc::UnknownIdentifier,
                "unknown identifier '" + std::string(name) + "' at position " + std::to_string(t.begin));
  }

  std::string_view src_;
  int dim_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Post-order compilation into a stack program; returns the stack depth needed.
std::size_t compile(const ExprNode& n, std::vector<Expression::Instr>& out) {
  using Op = Expression::OpCode;
  const auto b = static_cast<std::uint32_t>(n.begin);
  const auto e = static_cast<std::uint32_t>(n.end);
  switch (n.kind) {
    case ExprNode::Kind::Number:
      out.push_back({Op::Const, 0, n.value, b, e});
      return 1;
    case ExprNode::Kind::Variable:
      out.push_back({Op::Var, n.variable, 0.0, b, e});
      return 1;
    case ExprNode::Kind::Negate: {
      const std::size_t d = compile(*n.lhs, out);
      out.push_back({Op::Neg, 0, 0.0, b, e});
      return d;
    }
    case ExprNode::Kind::Call: {
      const std::size_t d = compile(*n.lhs, out);
      Op op = Op::Sin;
      switch (n.function) {
        case Function::Sin: op = Op::Sin; break;
        case Function::Cos: op = Op::Cos; break;
        case Function::Sinh: op = Op::Sinh; break;
        case Function::Cosh: op = Op::Cosh; break;
        case Function::Exp: op = Op::Exp; break;
        case Function::Log: op = Op::Log; break;
        case Function::Sqrt: op = Op::Sqrt; break;
      }
      out.push_back({op, 0, 0.0, b, e});
      return d;
    }
    case ExprNode::Kind::Binary: {
      const std::size_t dl = compile(*n.lhs, out);
      const std::size_t dr = compile(*n.rhs, out);
      Op op = Op::Add;
      switch (n.op) {
        case '+': op = Op::Add; break;
        case '-': op = Op::Sub; break;
        case '*': op = Op::Mul; break;
        case '/': op = Op::Div; break;
        default: op = Op::Pow; break;
      }
      out.push_back({op, 0, 0.0, b, e});
      return std::max(dl, dr + 1);
    }
  }
  return 0;
}

// Scalar policy: how to build leaves and read the value used in domain checks.
struct DoublePolicy {
  using T = double;
  static T constant(int, double c) { return c; }
  static T variable(int, int, double x) { return x; }
  static double value(T a) { return a; }
  static bool is_constant(T) { return true; }
  static T pow_const(T a, double c) { return std::pow(a, c); }
  static T pow_general(T a, T b) { return std::pow(a, b); }
};

template <int Order>
struct JetPolicy {
  using T = Jet<Order>;
  static T constant(int n, double c) { return T::constant(n, c); }
  static T variable(int n, int i, double x) { return T::variable(n, i, x); }
  static double value(const T& a) { return a.v; }
  static bool is_constant(const T& a) { return bp::is_constant(a); }
  static T pow_const(const T& a, double c) { return bp::pow_const(a, c); }
  static T pow_general(const T& a, const T& b) { return exp(b * log(a)); }
};

[[noreturn]] void domain_error(const Expression& e, const Expression::Instr& in, const std::string& what) {
  const std::string span = e.source().substr(in.begin, in.end - in.begin);
  throw DomainError(in.begin, in.end, what + " in '" + span + "' at position " + std::to_string(in.begin));
}

template <class P>
typename P::T run(const Expression& e, std::span<const double> x) {
  using T = typename P::T;
  using Op = Expression::OpCode;
  using std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh, std::sqrt;
  if (static_cast<int>(x.size()) != e.dim()) {
    throw Error(Errc::DimensionMismatch, "expression expects " + std::to_string(e.dim()) + " coordinates, got " +
                                             std::to_string(x.size()));
  }
  const int n = e.dim();
  std::vector<T> stack;
  stack.reserve(e.stack_depth());
  for (const auto& in : e.program()) {
    switch (in.op) {
      case Op::Const: stack.push_back(P::constant(n, in.value)); break;
      case Op::Var: stack.push_back(P::variable(n, in.index, x[in.index])); break;
      case Op::Neg: stack.back() = -stack.back(); break;
      case Op::Sin: stack.back() = sin(stack.back()); break;
      case Op::Cos: stack.back() = cos(stack.back()); break;
      case Op::Sinh: stack.back() = sinh(stack.back()); break;
      case Op::Cosh: stack.back() = cosh(stack.back()); break;
      case Op::Exp: stack.back() = exp(stack.back()); break;
      case Op::Log:
        if (!(P::value(stack.back()) > 0.0)) domain_error(e, in, "log of non-positive value");
        stack.back() = log(stack.back());
        break;
      case Op::Sqrt:
        if (P::value(stack.back()) < 0.0) domain_error(e, in, "sqrt of negative value");
        stack.back() = sqrt(stack.back());
        break;
      default: {
        T b = std::move(stack.back());
        stack.pop_back();
        T& a = stack.back();
        switch (in.op) {
          case Op::Add: a = a + b; break;
          case Op::Sub: a = a - b; break;
          case Op::Mul: a = a * b; break;
          case Op::Div:
            if (P::value(b) == 0.0) domain_error(e, in, "division by zero");
            a = a / b;
            break;
          case Op::Pow: {
            const double base = P::value(a);
            const double ex = P::value(b);
            if (P::is_constant(b)) {
              if (base < 0.0 && std::trunc(ex) != ex) domain_error(e, in, "negative base with non-integer exponent");
              if (base == 0.0 && ex < 0.0) domain_error(e, in, "division by zero");
              a = P::pow_const(a, ex);
            } else {
              if (!(base > 0.0)) domain_error(e, in, "non-positive base with variable exponent");
              a = P::pow_general(a, b);
            }
            break;
          }
          default: break;
        }
      }
    }
  }
  return stack.back();
}

int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Binary:
      return n.op == '^' ? 40 : (n.op == '*' || n.op == '/') ? 20 : 10;
    case ExprNode::Kind::Negate: return kBpUnary;
    default: return 100;
  }
}

void print(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::Number: {
      std::array<char, 64> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      out.append(buf.data(), res.ptr);
      return;
    }
    case ExprNode::Kind::Variable:
      out += 'x';
      out += std::to_string(n.variable + 1);
      return;
    case ExprNode::Kind::Negate:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < kBpUnary || n.lhs->kind == ExprNode::Kind::Negate, out);
      return;
    case ExprNode::Kind::Call:
      out += function_name(n.function);
      print_child(*n.lhs, true, out);
      return;
    case ExprNode::Kind::Binary: {
      const int p = precedence(n);
      const bool right_assoc = n.op == '^';
      const int pl = precedence(*n.lhs);
      const int pr = precedence(*n.rhs);
      print_child(*n.lhs, pl < p || (pl == p && right_assoc), out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_child(*n.rhs, pr < p || (pr == p && !right_assoc), out);
      return;
    }
  }
}

}  // namespace

Expression::Expression(std::shared_ptr<const ExprNode> root, int dim, std::string source)
    : root_(std::move(root)), dim_(dim), source_(std::move(source)) {
  stack_depth_ = compile(*root_, program_);
}

Expression parse_expression(std::string_view src, int dim) {
  if (dim < 1) throw Error(Errc::DimensionMismatch, "expression dimension must be positive");
  Parser parser(src, dim);
  return Expression(parser.parse(), dim, std::string(src));
}

double evaluate(const Expression& e, std::span<const double> coords) { return run<DoublePolicy>(e, coords); }

Jet<1> evaluate_jet1(const Expression& e, std::span<const double> coords) { return run<JetPolicy<1>>(e, coords); }

Jet<2> evaluate_jet2(const Expression& e, std::span<const double> coords) { return run<JetPolicy<2>>(e, coords); }

std::string to_string(const Expression& e) {
  std::string out;
  print(e.root(), out);
  return out;
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::Number: return a.value == b.value;
    case ExprNode::Kind::Variable: return a.variable == b.variable;
    case ExprNode::Kind::Negate: return structurally_equal(*a.lhs, *b.lhs);
    case ExprNode::Kind::Call: return a.function == b.function && structurally_equal(*a.lhs, *b.lhs);
    case ExprNode::Kind::Binary:
      return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
  return false;
}

}  // namespace bp
