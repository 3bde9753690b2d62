#include "gkdv/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace gkdv {

namespace {

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};

constexpr std::array<FunctionName, 6> kFunctions{{
    {"sqrt", UnaryOp::sqrt},
    {"exp", UnaryOp::exp},
    {"ln", UnaryOp::ln},
    {"abs", UnaryOp::abs},
    {"sin", UnaryOp::sin},
    {"cos", UnaryOp::cos},
}};

const FunctionName* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

std::string_view function_name(UnaryOp op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "-";
}

NodePtr make(Node::Constant c) { return std::make_shared<const Node>(Node{c}); }
NodePtr make(Node::Parameter p) { return std::make_shared<const Node>(Node{std::move(p)}); }
NodePtr make(Node::Variable v) { return std::make_shared<const Node>(Node{v}); }
NodePtr make(UnaryOp op, NodePtr arg) {
  return std::make_shared<const Node>(Node{Node::Unary{op, std::move(arg)}});
}
NodePtr make(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(Node{Node::Binary{op, std::move(lhs), std::move(rhs)}});
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr run() {
    if (src_.empty()) throw ParseError(0, "empty expression");
    for (std::size_t i = 0; i < src_.size(); ++i) {
      if (static_cast<unsigned char>(src_[i]) > 0x7f) throw ParseError(i, "non-ASCII byte");
    }
    NodePtr root = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(BinaryOp::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(BinaryOp::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(BinaryOp::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(BinaryOp::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(UnaryOp::neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(BinaryOp::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expected operand, found end of input");
    const char ch = src_[pos_];
    if (ch == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') return identifier();
    throw ParseError(pos_, std::string("expected operand, found '") + ch + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc()) throw ParseError(start, "malformed number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return make(Node::Constant{value});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    const FunctionName* fn = find_function(name);
    skip_ws();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (call) {
      if (!fn) throw ParseError(start, "unknown function '" + std::string(name) + "'");
      ++pos_;
      NodePtr arg = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return make(fn->op, arg);
    }
    if (fn) throw ParseError(start, "function '" + std::string(name) + "' requires parentheses");
    if (name == "u") return make(Node::Variable{});
    return make(Node::Parameter{std::string(name)});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void collect_parameters(const Node& n, std::set<std::string>& out) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Node::Parameter>) {
          out.insert(k.name);
        } else if constexpr (std::is_same_v<K, Node::Unary>) {
          collect_parameters(*k.arg, out);
        } else if constexpr (std::is_same_v<K, Node::Binary>) {
          collect_parameters(*k.lhs, out);
          collect_parameters(*k.rhs, out);
        }
      },
      n.kind);
}

// Binding strength used by the printer: higher binds tighter.
int precedence(const Node& n) {
  if (const auto* b = std::get_if<Node::Binary>(&n.kind)) {
    switch (b->op) {
      case BinaryOp::add:
      case BinaryOp::sub:
        return 1;
      case BinaryOp::mul:
      case BinaryOp::div:
        return 2;
      case BinaryOp::pow:
        return 4;
    }
  }
  if (const auto* u = std::get_if<Node::Unary>(&n.kind)) {
    if (u->op == UnaryOp::neg) return 3;
  }
  return 5;
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out) {
  if (parens) out += '(';
  print(n, out);
  if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Node::Constant>) {
          std::array<char, 64> buf{};
          auto res = std::to_chars(buf.data(), buf.data() + buf.size(), k.value);
          out.append(buf.data(), res.ptr);
        } else if constexpr (std::is_same_v<K, Node::Parameter>) {
          out += k.name;
        } else if constexpr (std::is_same_v<K, Node::Variable>) {
          out += 'u';
        } else if constexpr (std::is_same_v<K, Node::Unary>) {
          if (k.op == UnaryOp::neg) {
            out += '-';
            print_wrapped(*k.arg, precedence(*k.arg) < 3, out);
          } else {
            out += function_name(k.op);
            print_wrapped(*k.arg, true, out);
          }
        } else {
          const int p = precedence(n);
          const char* sym = "";
          switch (k.op) {
            case BinaryOp::add: sym = " + "; break;
            case BinaryOp::sub: sym = " - "; break;
            case BinaryOp::mul: sym = "*"; break;
            case BinaryOp::div: sym = "/"; break;
            case BinaryOp::pow: sym = "^"; break;
          }
          if (k.op == BinaryOp::pow) {
            print_wrapped(*k.lhs, precedence(*k.lhs) <= p, out);
            out += sym;
            print_wrapped(*k.rhs, precedence(*k.rhs) < 3, out);
          } else {
            print_wrapped(*k.lhs, precedence(*k.lhs) < p, out);
            out += sym;
            print_wrapped(*k.rhs, precedence(*k.rhs) <= p, out);
          }
        }
      },
      n.kind);
}

}  // namespace

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      [&](const auto& ka) -> bool {
        using K = std::decay_t<decltype(ka)>;
        const auto& kb = std::get<K>(b.kind);
        if constexpr (std::is_same_v<K, Node::Constant>) {
          return ka.value == kb.value;
        } else if constexpr (std::is_same_v<K, Node::Parameter>) {
          return ka.name == kb.name;
        } else if constexpr (std::is_same_v<K, Node::Variable>) {
          return true;
        } else if constexpr (std::is_same_v<K, Node::Unary>) {
          return ka.op == kb.op && structurally_equal(*ka.arg, *kb.arg);
        } else {
          return ka.op == kb.op && structurally_equal(*ka.lhs, *kb.lhs) &&
                 structurally_equal(*ka.rhs, *kb.rhs);
        }
      },
      a.kind);
}

NonlinearityExpr::NonlinearityExpr(NodePtr root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {
  collect_parameters(*root_, params_);
}

NonlinearityExpr parse(std::string_view source) {
  Parser p(source);
  return NonlinearityExpr(p.run(), std::string(source));
}

std::string pretty_print(const NonlinearityExpr& expr) {
  std::string out;
  print(expr.root(), out);
  return out;
}

void require_bound(const NonlinearityExpr& expr, const ParamBindings& params) {
  for (const auto& name : expr.free_parameters()) {
    if (!params.contains(name)) throw ConfigError("unbound parameter '" + name + "'");
  }
}

void Nonlinearity::compile(const Node& n, const ParamBindings& params, std::size_t& depth) {
  auto emit = [&](Op op, double c = 0.0) { program_.push_back({op, c}); };
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Node::Constant>) {
          emit(Op::constant, k.value);
          ++depth;
        } else if constexpr (std::is_same_v<K, Node::Parameter>) {
          emit(Op::constant, params.at(k.name));
          ++depth;
        } else if constexpr (std::is_same_v<K, Node::Variable>) {
          emit(Op::variable);
          ++depth;
        } else if constexpr (std::is_same_v<K, Node::Unary>) {
          compile(*k.arg, params, depth);
          static constexpr std::array<Op, 7> ops{Op::neg, Op::sqrt, Op::exp, Op::ln,
                                                 Op::abs, Op::sin,  Op::cos};
          emit(ops[static_cast<std::size_t>(k.op)]);
        } else {
          compile(*k.lhs, params, depth);
          compile(*k.rhs, params, depth);
          static constexpr std::array<Op, 5> ops{Op::add, Op::sub, Op::mul, Op::div, Op::pow};
          emit(ops[static_cast<std::size_t>(k.op)]);
          --depth;
        }
        max_depth_ = std::max(max_depth_, depth);
      },
      n.kind);
}

Nonlinearity Nonlinearity::bind(const NonlinearityExpr& expr, const ParamBindings& params) {
  require_bound(expr, params);
  Nonlinearity out;
  out.source_ = expr.source();
  std::size_t depth = 0;
  out.compile(expr.root(), params, depth);
  return out;
}

double eval(const NonlinearityExpr& expr, double u, const ParamBindings& params) {
  return Nonlinearity::bind(expr, params)(u);
}

Dual<double> eval_dual(const NonlinearityExpr& expr, Dual<double> u, const ParamBindings& params) {
  return Nonlinearity::bind(expr, params)(u);
}

}  // namespace gkdv
