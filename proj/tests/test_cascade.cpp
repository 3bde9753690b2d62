#include <cmath>
#include <functional>

#include "doctest.h"
#include "gkdv/cascade.hpp"

using namespace gkdv;

namespace {

CascadeConfig make(const char* a, double c, double C2 = 0, double C3 = 0, ParamBindings p = {}, double lo = -2,
                   double hi = 2) {
  CascadeConfig cfg{parse(a), std::move(p), 1.0, 0.0, 0.0, std::nullopt};
  cfg.c = c;
  cfg.C2 = C2;
  cfg.C3 = C3;
  cfg.y_min = lo;
  cfg.y_max = hi;
  return cfg;
}

// Pointwise relative error. Grid points that land next to a root of R are
// limited by cancellation between y C2, G and 2 C3; the error there is measured
// against that rounding floor instead of |R|.
double max_relative(const Cascade& f, const std::function<double(double)>& exact, double lo, double hi, int n) {
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    const double y = lo + (hi - lo) * i / (n - 1);
    const double e = exact(y);
    const double d = std::abs(f.radicand(y) - e);
    const double floor = 1e-6 * (std::abs(y * f.C2()) + std::abs(f.g(y).first) + 2 * std::abs(f.C3()));
    if (d != 0) worst = std::max(worst, d / std::max(std::abs(e), floor));
  }
  return worst;
}

// y = (c/2) sech^2(sqrt(c) z / 2) inverted for z >= 0
double sech2_distance(double y, double c) { return 2 / std::sqrt(c) * std::acosh(1 / std::sqrt(2 * y / c)); }

}  // namespace

TEST_CASE("H1 and H2 against symbolic antiderivatives") {
  Cascade kdv(make("6*u", 1));
  CHECK(kdv.y_base() == 0.0);
  CHECK(kdv.h1(1.0).value == doctest::Approx(-1.5).epsilon(1e-14));
  Cascade mkdv(make("u^2", 1));
  CHECK(mkdv.h2(1.0).value == doctest::Approx(5.0 / 12).epsilon(1e-14));
  for (double y : {-1.7, -0.3, 0.01, 0.9, 1.99}) {
    CHECK(kdv.h1(y).value == doctest::Approx(y * y / 2 - 2 * y * y * y).epsilon(1e-13));
    CHECK(kdv.h2(y).value == doctest::Approx(y / 2 - y * y).epsilon(1e-13));
    CHECK(mkdv.h2(y).value == doctest::Approx(y / 2 - y * y * y / 12).epsilon(1e-13));
  }
}

TEST_CASE("gauge: H1 and H2 vanish at the base point") {
  for (double base : {0.0, 0.1, 1.3}) {
    auto cfg = make("2*alpha*u - beta*u^2", 0.7, 0.2, 0.1, {{"alpha", 1}, {"beta", 2}}, 0.0, 2.0);
    cfg.y_base = base;
    Cascade f(cfg);
    CHECK(f.h1(base).value == 0.0);
    CHECK(f.h2(base).value == 0.0);
  }
}

TEST_CASE("radicand examples") {
  CHECK(Cascade(make("6*u", 1)).radicand(0.3) == doctest::Approx(0.036).epsilon(1e-14));
  CHECK(Cascade(make("u^2", 1)).radicand(1.0) == doctest::Approx(5.0 / 6).epsilon(1e-14));
  CHECK(std::abs(Cascade(make("6*u", 1)).radicand(0.5)) <= 1e-15);
  CHECK_THROWS_AS(Cascade(make("6*u", 1)).radicand(2.5), DomainError);
}

TEST_CASE("cascade identities with the polynomial radicands") {
  for (double c : {1.0, -1.0})
    for (double C2 : {0.0, 0.3})
      for (double C3 : {0.0, 0.1}) {
        INFO("c=", c, " C2=", C2, " C3=", C3);
        Cascade kdv(make("6*u", c, C2, C3));
        CHECK(max_relative(kdv, [&](double y) { return -2 * y * y * y + c * y * y + C2 * y - 2 * C3; }, -2, 2,
                           1000) <= 1e-10);
        Cascade mkdv(make("u^2", c, C2, C3));
        CHECK(max_relative(
                  mkdv,
                  [&](double y) { return (-6 * std::pow(y, 4) + 36 * c * y * y + 36 * C2 * y - 72 * C3) / 36; },
                  -2, 2, 1000) <= 1e-10);
        const double al = 1, be = 2;
        Cascade gardner(make("2*alpha*u - beta*u^2", c, C2, C3, {{"alpha", al}, {"beta", be}}));
        CHECK(max_relative(gardner,
                           [&](double y) {
                             return (6 * be * std::pow(y, 4) - 24 * al * y * y * y + 36 * c * y * y + 36 * C2 * y -
                                     72 * C3) /
                                    36;
                           },
                           -2, 2, 1000) <= 1e-10);
        for (int n = 1; n <= 4; ++n) {
          Cascade pw(make("u^n/n", c, C2, C3, {{"n", n}}));
          CHECK(max_relative(pw,
                             [&](double y) {
                               return -2 * std::pow(y, n + 2) / (n * (n + 1) * (n + 2)) + c * y * y + C2 * y - 2 * C3;
                             },
                             -2, 2, 1000) <= 1e-10);
        }
      }
}

TEST_CASE("radicand derivatives") {
  Cascade f(make("2*alpha*u - beta*u^2", 0.8, 0.3, 0.1, {{"alpha", 1}, {"beta", 2}}));
  for (double y : {-1.5, -0.2, 0.4, 1.7}) {
    const double h = 1e-4;
    const double fd1 = (f.radicand(y + h) - f.radicand(y - h)) / (2 * h);
    const double fd2 = (f.radicand(y + h) - 2 * f.radicand(y) + f.radicand(y - h)) / (h * h);
    CHECK(f.radicand_derivative(y) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(f.radicand_second_derivative(y) == doctest::Approx(fd2).epsilon(1e-5));
  }
}

TEST_CASE("nested H2 quadrature agrees with the cached route") {
  for (const char* a : {"6*u", "u^2", "u*ln(abs(u))", "1 + sqrt(u) + u"}) {
    auto cfg = make(a, 0.9, 0, 0, {}, 0.0, 2.0);
    Cascade f(cfg);
    for (double y : {0.05, 0.7, 1.9}) CHECK(f.h2_nested(y) == doctest::Approx(f.h2(y).value).epsilon(1e-10));
  }
}

TEST_CASE("logarithmic nonlinearity builds on y > 0") {
  auto cfg = make("u*ln(abs(u))", 1, 0, 0, {}, 0.0, 4.0);
  CHECK(default_base_point(cfg) == 2.0);
  Cascade f(cfg);
  // H1 = y^2/2 - (y^3 ln y / 3 - y^3 / 9) up to the base constant
  auto prim = [](double y) { return y * y / 2 - (y * y * y * std::log(y) / 3 - y * y * y / 9); };
  CHECK(f.h1(0.5).value == doctest::Approx(prim(0.5) - prim(2.0)).epsilon(1e-12));
}

TEST_CASE("H3 on the sech^2 orbit") {
  Cascade f(make("6*u", 1, 0, 0, {}, -0.1, 0.6));
  CHECK(f.h3(0.5, 0.5).value == 0.0);
  const auto r = f.h3(0.5, 0.393224);
  CHECK(std::abs(std::abs(r.value) - 1.0) <= 1e-5);
  CHECK(r.value < 0);
  for (double y : {0.45, 0.3, 0.1, 1e-3, 1e-6}) {
    INFO("y=", y);
    CHECK(std::abs(f.h3(0.5, y).value + sech2_distance(y, 1.0)) <= 1e-9 * std::max(1.0, sech2_distance(y, 1.0)));
    CHECK(f.h3(y, 0.5).value == doctest::Approx(sech2_distance(y, 1.0)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(f.h3(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(f.h3(0.5, 0.55), DomainError);
}

TEST_CASE("H3 is strictly increasing on {R > 0}") {
  Cascade f(make("u^2", 1, 0, 0, {}, 0.0, 2.6));
  const double top = std::sqrt(6.0);
  double prev = -1e300;
  for (int i = 1; i <= 40; ++i) {
    const double y = top * i / 40.0;
    const double h = f.h3(top, y).value;
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("halving the tolerance moves results by less than the error estimate") {
  auto cfg = make("1 + sqrt(u) + ln(abs(u))", 2.5, 0.1, 0.0, {}, 0.1, 3.0);
  auto tight = cfg;
  tight.quad.abs /= 2;
  tight.quad.rel /= 2;
  Cascade f(cfg), g(tight);
  for (double y : {0.2, 1.1, 2.9}) {
    const auto a = f.h1(y), b = g.h1(y);
    CHECK(std::abs(a.value - b.value) <= a.error + 1e-15);
    const auto c = f.h2(y), d = g.h2(y);
    CHECK(std::abs(c.value - d.value) <= c.error + 1e-15);
  }
  Cascade k(make("6*u", 1, 0, 0, {}, -0.1, 0.6));
  auto kt = make("6*u", 1, 0, 0, {}, -0.1, 0.6);
  kt.quad.abs /= 2;
  kt.quad.rel /= 2;
  Cascade kk(kt);
  const auto a = k.h3(0.5, 0.2), b = kk.h3(0.5, 0.2);
  CHECK(std::abs(a.value - b.value) <= a.error + 1e-15);
}

TEST_CASE("configuration errors") {
  auto cfg = make("6*u", 1);
  cfg.y_base = 0.3;
  CHECK_THROWS_AS(Cascade{cfg}, ConfigError);
  cfg = make("6*u", 1, 0, 0, {}, 0.5, 1.0);
  cfg.y_base = 2.0;
  CHECK_THROWS_AS(Cascade{cfg}, ConfigError);
  cfg = make("6*u", 1, 0, 0, {}, 1.0, 1.0);
  CHECK_THROWS_AS(Cascade{cfg}, ConfigError);
  CHECK_THROWS_AS(Cascade(make("sqrt(u)", 1)), DomainError);
  CHECK_THROWS_AS(Cascade(make("alpha*u", 1)), ConfigError);
}

TEST_CASE("extended-precision cascade matches") {
  auto cfg = make("2*alpha*u - beta*u^2", 1, 0.3, 0.1, {{"alpha", 1}, {"beta", 2}});
  Cascade f(cfg);
  CascadeLD g(cfg);
  for (double y : {-1.9, 0.2, 1.4}) {
    CHECK(static_cast<double>(g.radicand(y)) == doctest::Approx(f.radicand(y)).epsilon(1e-13));
    const long double yl = y;
    const long double exact = (12.0L * yl * yl * yl * yl - 24 * yl * yl * yl + 36 * yl * yl + 36 * static_cast<long double>(0.3) * yl - 72 * static_cast<long double>(0.1)) / 36;
    CHECK(std::abs(g.radicand(yl) - exact) <= 1e-17L);
  }
}

TEST_CASE("gauge shift is absorbed by C2 and C3") {
  auto a = make("6*u", 1, 0, 0, {}, 0.0, 2.0);
  auto b = a;
  a.y_base = 0.0;
  b.y_base = 0.1;
  auto rep = gauge_shift_check(a, b);
  CHECK(rep.pass);
  // closed forms: dC3 = -H1(0.1), dC2 = -(2 H2(0.1) + 2 H1(0.1)/0.1)
  const double h1 = 0.005 - 0.002, h2 = 0.05 - 0.01;
  CHECK(rep.delta_C3 == doctest::Approx(-h1).epsilon(1e-13));
  CHECK(rep.delta_C2 == doctest::Approx(-(2 * h2 + 2 * h1 / 0.1)).epsilon(1e-13));

  auto same = gauge_shift_check(a, a);
  CHECK(same.pass);
  CHECK(same.delta_C2 == 0.0);
  CHECK(same.delta_C3 == 0.0);

  auto g1 = make("2*alpha*u - beta*u^2", 1, 0, 0, {{"alpha", 1}, {"beta", 2}}, 0.0, 2.0);
  auto g2 = g1;
  g1.y_base = 0.05;
  g2.y_base = 0.2;
  CHECK(gauge_shift_check(g1, g2).pass);
  CHECK(gauge_shift_check(g2, g1).pass);
}
