#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "gkdv/expr.hpp"

using namespace gkdv;

namespace {

NodePtr leaf_const(double v) { return std::make_shared<const Node>(Node{Node::Constant{v}}); }
NodePtr leaf_param(const char* n) { return std::make_shared<const Node>(Node{Node::Parameter{n}}); }
NodePtr leaf_u() { return std::make_shared<const Node>(Node{Node::Variable{}}); }
NodePtr un(UnaryOp op, NodePtr a) { return std::make_shared<const Node>(Node{Node::Unary{op, a}}); }
NodePtr bin(BinaryOp op, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{Node::Binary{op, a, b}});
}

// Random expression over u that stays finite and smooth for u in [0.5, 2].
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
  std::uniform_real_distribution<double> cst(0.5, 2.0);
  auto sub = [&] { return random_expr(rng, depth - 1); };
  switch (pick(rng)) {
    case 0:
      return "u";
    case 1:
      return std::to_string(cst(rng));
    case 2:
      return "k";
    case 3:
      return "(" + sub() + " + " + sub() + ")";
    case 4:
      return "(" + sub() + " - " + sub() + ")";
    case 5:
      return "(" + sub() + ")*(" + sub() + ")";
    case 6:
      return "(" + sub() + ")/(1 + (" + sub() + ")^2)";
    case 7:
      return "(" + sub() + ")^3";
    case 8:
      return "sqrt(1 + (" + sub() + ")^2)";
    case 9:
      return "exp(sin(" + sub() + "))";
    case 10:
      return "ln(abs(" + sub() + ") + 1)";
    default:
      return "-cos(" + sub() + ")";
  }
}

}  // namespace

TEST_CASE("parse builds trees with the documented precedence") {
  auto e = parse("6*u");
  CHECK(e == NonlinearityExpr(bin(BinaryOp::mul, leaf_const(6), leaf_u()), "6*u"));

  auto s = parse("alpha*sqrt(u)+beta*u");
  auto expected = bin(BinaryOp::add, bin(BinaryOp::mul, leaf_param("alpha"), un(UnaryOp::sqrt, leaf_u())),
                      bin(BinaryOp::mul, leaf_param("beta"), leaf_u()));
  CHECK(structurally_equal(s.root(), *expected));
  CHECK(s.free_parameters() == std::set<std::string>{"alpha", "beta"});

  auto g = parse("2*alpha*u - beta*u^2");
  CHECK(g.free_parameters() == std::set<std::string>{"alpha", "beta"});

  // ^ binds tighter than unary minus, and is right associative
  CHECK(structurally_equal(parse("-u^2").root(), *un(UnaryOp::neg, bin(BinaryOp::pow, leaf_u(), leaf_const(2)))));
  CHECK(structurally_equal(parse("2^3^2").root(),
                           *bin(BinaryOp::pow, leaf_const(2), bin(BinaryOp::pow, leaf_const(3), leaf_const(2)))));
  CHECK(structurally_equal(parse("u^-2").root(),
                           *bin(BinaryOp::pow, leaf_u(), un(UnaryOp::neg, leaf_const(2)))));
  CHECK(structurally_equal(parse("1 - u - u").root(),
                           *bin(BinaryOp::sub, bin(BinaryOp::sub, leaf_const(1), leaf_u()), leaf_u())));
}

TEST_CASE("parse errors carry the byte offset") {
  try {
    parse("6*");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("foo(u)"), ParseError);
  CHECK_THROWS_AS(parse("sqrt u"), ParseError);
  CHECK_THROWS_AS(parse("(u"), ParseError);
  CHECK_THROWS_AS(parse("u)"), ParseError);
  CHECK_THROWS_AS(parse("u\xc3\xa9"), ParseError);
  try {
    parse("u + log(u)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("eval") {
  CHECK(eval(parse("6*u"), 2.0, {}) == 12.0);
  CHECK(eval(parse("u^2"), 3.0, {}) == 9.0);
  CHECK(eval(parse("alpha*sqrt(u)+beta*u"), 4.0, {{"alpha", 2.0}, {"beta", 1.0}}) == 8.0);
  CHECK(eval(parse("u^n/n"), -2.0, {{"n", 3.0}}) == doctest::Approx(-8.0 / 3.0));
}

TEST_CASE("eval reports domain and binding errors") {
  CHECK_THROWS_AS(eval(parse("sqrt(u)"), -1.0, {}), DomainError);
  CHECK_THROWS_AS(eval(parse("ln(abs(u))"), 0.0, {}), DomainError);
  CHECK_THROWS_AS(eval(parse("ln(u)"), -1.0, {}), DomainError);
  CHECK_THROWS_AS(eval(parse("1/u"), 0.0, {}), DomainError);
  CHECK_THROWS_AS(eval(parse("u^0.5"), -1.0, {}), DomainError);
  CHECK_THROWS_AS(eval(parse("exp(u)"), 1000.0, {}), DomainError);
  CHECK_THROWS_AS(eval(parse("alpha*u"), 1.0, {}), ConfigError);
  CHECK_THROWS_AS(eval_dual(parse("abs(u)"), Dual<double>(0.0, 1.0), {}), DomainError);
  CHECK(eval(parse("abs(u)"), 0.0, {}) == 0.0);
}

TEST_CASE("eval_dual applies the chain rule") {
  auto sq = eval_dual(parse("u^2"), {3.0, 1.0}, {});
  CHECK(sq.val == 9.0);
  CHECK(sq.der == 6.0);
  auto rt = eval_dual(parse("sqrt(u)"), {4.0, 1.0}, {});
  CHECK(rt.val == 2.0);
  CHECK(rt.der == 0.25);

  // finite-difference oracle for the logarithmic KdV nonlinearity
  auto e = parse("u*ln(abs(u))");
  const double h = 1e-6;
  const double fd = (eval(e, -2.0 + h, {}) - eval(e, -2.0 - h, {})) / (2 * h);
  CHECK(std::abs(eval_dual(e, {-2.0, 1.0}, {}).der - fd) <= 1e-8);
}

TEST_CASE("bound program handles extended precision and nested duals") {
  auto a = Nonlinearity::bind(parse("u^3 - 2*u"), {});
  CHECK(a(2.0L) == 4.0L);
  using D2 = Dual<Dual<double>>;
  auto r = a(seed_variable<D2>(2.0));
  CHECK(derivative<1>(r) == doctest::Approx(10.0));
  CHECK(derivative<2>(r) == doctest::Approx(12.0));
}

TEST_CASE("property: dual derivative matches central differences") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> udist(0.5, 2.0);
  const ParamBindings params{{"k", 1.25}};
  for (int i = 0; i < 100; ++i) {
    const std::string src = random_expr(rng, 4);
    auto e = parse(src);
    const double u = udist(rng);
    const double h = 1e-6;
    const double fd = (eval(e, u + h, params) - eval(e, u - h, params)) / (2 * h);
    const double d = eval_dual(e, {u, 1.0}, params).der;
    INFO(src, " at u=", u);
    CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("property: pretty_print round-trips") {
  for (const char* src : {"6*u", "u^2", "u^n/n", "alpha*sqrt(u)+beta*u", "2*alpha*u-beta*u^2",
                          "u*ln(abs(u))", "1+alpha*sqrt(u)+beta*ln(abs(u))", "-(u-1)^-2",
                          "(-u)^3", "a/(b*c)", "a-(b-c)", "2^3^2", "(2^3)^2", "0.1*u"}) {
    auto e = parse(src);
    auto again = parse(pretty_print(e));
    INFO(src, " -> ", pretty_print(e));
    CHECK(again == e);
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto e = parse(random_expr(rng, 5));
    CHECK(parse(pretty_print(e)) == e);
  }
}
