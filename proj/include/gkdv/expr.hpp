#pragma once

// Nonlinearity expressions a(u): parsing, printing, and evaluation.
//
// Grammar (whitespace ignored between tokens):
//
//   expr    = term { ("+" | "-") term }
//   term    = unary { ("*" | "/") unary }
//   unary   = "-" unary | power
//   power   = primary [ "^" unary ]            (right associative)
//   primary = number | "u" | name | func "(" expr ")" | "(" expr ")"
//   func    = "sqrt" | "exp" | "ln" | "abs" | "sin" | "cos"
//
// Any other identifier is a free parameter, bound to a value at call time.

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gkdv/dual.hpp"
#include "gkdv/errors.hpp"

namespace gkdv {

enum class UnaryOp { neg, sqrt, exp, ln, abs, sin, cos };
enum class BinaryOp { add, sub, mul, div, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  struct Constant {
    double value;
  };
  struct Parameter {
    std::string name;
  };
  struct Variable {};
  struct Unary {
    UnaryOp op;
    NodePtr arg;
  };
  struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
  };
  std::variant<Constant, Parameter, Variable, Unary, Binary> kind;
};

bool structurally_equal(const Node& a, const Node& b);

using ParamBindings = std::map<std::string, double>;

/// Immutable parsed a(u).
class NonlinearityExpr {
 public:
  NonlinearityExpr(NodePtr root, std::string source);

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }
  const std::set<std::string>& free_parameters() const { return params_; }

  friend bool operator==(const NonlinearityExpr& a, const NonlinearityExpr& b) {
    return structurally_equal(*a.root_, *b.root_);
  }

 private:
  NodePtr root_;
  std::string source_;
  std::set<std::string> params_;
};

NonlinearityExpr parse(std::string_view source);
std::string pretty_print(const NonlinearityExpr& expr);

/// Throws ConfigError naming the first free parameter missing from params.
void require_bound(const NonlinearityExpr& expr, const ParamBindings& params);

/// a(u) with parameters substituted, flattened to a stack program.
/// Evaluates for double, long double and (nested) dual arguments.
class Nonlinearity {
 public:
  static Nonlinearity bind(const NonlinearityExpr& expr, const ParamBindings& params);

  template <class T>
  T operator()(const T& u) const;

  const std::string& source() const { return source_; }

 private:
  enum class Op : unsigned char {
    constant, variable, neg, sqrt, exp, ln, abs, sin, cos, add, sub, mul, div, pow
  };
  struct Instr {
    Op op;
    double constant;
  };

  template <class T>
  static void apply(Op op, T* stack, std::size_t& top);

  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
  std::string source_;

  void compile(const Node& n, const ParamBindings& params, std::size_t& depth);
};

double eval(const NonlinearityExpr& expr, double u, const ParamBindings& params);
Dual<double> eval_dual(const NonlinearityExpr& expr, Dual<double> u, const ParamBindings& params);

// ---------------------------------------------------------------------------

template <class T>
void Nonlinearity::apply(Op op, T* stack, std::size_t& top) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  T& x = stack[top - 1];
  switch (op) {
    case Op::neg:
      x = -x;
      return;
    case Op::sqrt:
      if (primal(x) < 0) throw DomainError("sqrt of negative argument");
      if constexpr (is_dual_v<T>) {
        if (primal(x) == 0) throw DomainError("derivative of sqrt undefined at 0");
      }
      x = sqrt(x);
      return;
    case Op::exp:
      x = exp(x);
      return;
    case Op::ln:
      if (primal(x) == 0) throw DomainError("ln of zero");
      if (primal(x) < 0) throw DomainError("ln of negative argument");
      x = log(x);
      return;
    case Op::abs:
      if constexpr (is_dual_v<T>) {
        if (primal(x) == 0) throw DomainError("derivative of abs undefined at 0");
      }
      x = abs(x);
      return;
    case Op::sin:
      x = sin(x);
      return;
    case Op::cos:
      x = cos(x);
      return;
    default:
      break;
  }
  T& lhs = stack[top - 2];
  const T& rhs = x;
  switch (op) {
    case Op::add:
      lhs = lhs + rhs;
      break;
    case Op::sub:
      lhs = lhs - rhs;
      break;
    case Op::mul:
      lhs = lhs * rhs;
      break;
    case Op::div:
      if (primal(rhs) == 0) throw DomainError("division by zero");
      lhs = lhs / rhs;
      break;
    case Op::pow: {
      const auto b = primal(lhs);
      const auto e = primal(rhs);
      if (b < 0 && (e != std::trunc(e) || !is_constant(rhs)))
        throw DomainError("negative base raised to a non-integer power");
      if (b == 0 && e < 0) throw DomainError("zero raised to a negative power");
      lhs = pow(lhs, rhs);
      break;
    }
    default:
      break;
  }
  --top;
}

template <class T>
T Nonlinearity::operator()(const T& u) const {
  constexpr std::size_t kInline = 32;
  std::array<T, kInline> inline_stack;
  std::vector<T> heap_stack;
  T* stack = inline_stack.data();
  if (max_depth_ > kInline) {
    heap_stack.resize(max_depth_);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  for (const Instr& ins : program_) {
    switch (ins.op) {
      case Op::constant:
        stack[top++] = T(ins.constant);
        break;
      case Op::variable:
        stack[top++] = u;
        break;
      default:
        apply(ins.op, stack, top);
        break;
    }
  }
  if (!is_all_finite(stack[0])) throw DomainError("non-finite value of a(u) at u = " + std::to_string(static_cast<double>(primal(u))));
  return stack[0];
}

}  // namespace gkdv
