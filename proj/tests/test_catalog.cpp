#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "doctest.h"
#include "gkdv/catalog.hpp"
#include "gkdv/profile.hpp"

using namespace gkdv;

namespace {

double u(const char* id, double x, double t, double c, double C1 = 0, ParamBindings p = {}) {
  return eval_entry<double>(find_entry(id), x, t, c, C1, p);
}

}  // namespace

TEST_CASE("entries and validation flags") {
  const auto& all = list_catalog();
  REQUIRE(all.size() == 8);
  const char* ids[] = {"kdv_pos", "kdv_neg", "mkdv_pos", "power_pos", "power_neg",
                       "schamel_kdv_pos", "schamel_kdv_neg", "gardner_pos"};
  for (std::size_t i = 0; i < 8; ++i) CHECK(all[i].id == ids[i]);
  for (const auto& e : all) {
    const bool expected = e.id != "power_neg" && e.id != "schamel_kdv_neg";
    CHECK_MESSAGE(e.validated == expected, e.id, " residual ", e.screen_residual);
    CHECK(!e.formula.empty());
    CHECK(!e.constraints.empty());
    if (e.validated) CHECK(e.screen_residual <= 1e-8);
  }
  CHECK(find_entry("schamel_kdv_neg").screen_residual > 1e-3);
  CHECK_THROWS_AS(find_entry("kdv"), ConfigError);
}

TEST_CASE("closed-form values") {
  CHECK(u("kdv_pos", 4 * 0.3, 0.3, 4) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u("kdv_pos", 0, 0, 1) == 0.5);
  CHECK(u("kdv_neg", -0.7, 0.7, -1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(u("power_pos", 0, 0, 1.5, 0, {{"n", 1}}) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(u("power_neg", 0, 0, -1, 0, {{"n", 3}}) == doctest::Approx(-std::cbrt(30.0)).epsilon(1e-14));
  CHECK_THROWS_AS(u("power_neg", 0, 0, -1, 0, {{"n", 2}}), DomainError);

  // mKdV peak from a direct maximization over s
  for (double c : {1.0, 2.0}) {
    auto neg = [c](double s) { return -144 * c * std::exp(s) / (std::exp(2 * s) + 864 * c); };
    const auto [s_max, f_min] = boost::math::tools::brent_find_minima(neg, -10.0, 20.0, 52);
    (void)s_max;
    CHECK(-f_min == doctest::Approx(std::sqrt(6 * c)).epsilon(1e-12));
    double peak = 0;
    for (int i = -10000; i <= 10000; ++i) peak = std::max(peak, u("mkdv_pos", i * 1e-3, 0, c));
    CHECK(peak == doctest::Approx(std::sqrt(6 * c)).epsilon(1e-6));
  }
  CHECK(std::sqrt(6.0) == doctest::Approx(2.449490).epsilon(1e-6));
}

TEST_CASE("power_pos with n = 1 is the rescaled KdV soliton") {
  for (double c : {0.5, 1.0, 3.0})
    for (double x = -8; x <= 8; x += 0.37)
      CHECK(std::abs(u("power_pos", x, 0.2, c, 0.1, {{"n", 1}}) - 6 * u("kdv_pos", x, 0.2, c, 0.1)) <= 1e-10);
}

TEST_CASE("constraints") {
  CHECK_THROWS_AS(u("kdv_pos", 0, 0, -1), ConfigError);
  CHECK_THROWS_AS(u("kdv_neg", 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(u("mkdv_pos", 0, 0, 0), ConfigError);
  CHECK_THROWS_AS(u("power_pos", 0, 0, 1, 0, {{"n", 1.5}}), ConfigError);
  CHECK_THROWS_AS(u("power_pos", 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(u("gardner_pos", 0, 0, 1, 0, {{"alpha", 0}, {"beta", 0}}), ConfigError);
  CHECK_THROWS_AS(u("schamel_kdv_neg", 0, 0, -1, 0, {{"alpha", 1}, {"beta", 1}}), ConfigError);
  CHECK_NOTHROW(u("gardner_pos", 0, 0, 1, 0, {{"alpha", 1}, {"beta", 0}}));
}

TEST_CASE("dual derivatives against closed forms and differences") {
  using D3 = Dual<Dual<Dual<double>>>;
  const auto& e = find_entry("kdv_pos");
  const double c = 1.7, C1 = 0.4, t = 0.3;
  const double k = std::sqrt(c) / 2;
  for (double x : {-3.0, -0.5, 0.2, 1.1, 4.0}) {
    const D3 v = eval_entry<D3>(e, seed_variable<D3>(x), D3(t), c, C1, {});
    const double th = C1 - x + c * t;
    const double sh = 1 / std::cosh(k * th), th_ = std::tanh(k * th);
    CHECK(derivative<1>(v) == doctest::Approx(c * k * sh * sh * th_).epsilon(1e-13));
    const double h = 1e-3;
    const double fd3 = (u("kdv_pos", x + 2 * h, t, c, C1) - 2 * u("kdv_pos", x + h, t, c, C1) +
                        2 * u("kdv_pos", x - h, t, c, C1) - u("kdv_pos", x - 2 * h, t, c, C1)) /
                       (2 * h * h * h);
    CHECK(derivative<3>(v) == doctest::Approx(fd3).epsilon(1e-5));
    const Dual<double> w = eval_entry<Dual<double>>(e, Dual<double>(x), seed_variable<Dual<double>>(t), c, C1, {});
    CHECK(w.der == doctest::Approx(-c * derivative<1>(v)).epsilon(1e-13));
  }
}

TEST_CASE("residuals at single points") {
  const auto& e = find_entry("gardner_pos");
  const ParamBindings p{{"alpha", 1}, {"beta", -1}};
  const Nonlinearity a = Nonlinearity::bind(parse(e.a_source), p);
  for (double x : {-5.0, -1.0, 0.0, 2.0}) CHECK(std::abs(pde_residual_at(e, a, x, 0.5, 1.0, 0.0, p)) <= 1e-10);
  // the same closed form with the wrong nonlinearity is not a solution
  const Nonlinearity wrong = Nonlinearity::bind(parse("6*u"), {});
  CHECK(std::abs(pde_residual_at(e, wrong, 1.0, 0.5, 1.0, 0.0, p)) > 1e-3);
}

TEST_CASE("seeded samples are reproducible and regular") {
  const auto& e = find_entry("gardner_pos");
  const ParamBindings p{{"alpha", 1}, {"beta", 1}};
  const auto s1 = sample_points(e, 1.0, 0.0, p, 200, 7);
  const auto s2 = sample_points(e, 1.0, 0.0, p, 200, 7);
  REQUIRE(s1.size() == 200);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].x == s2[i].x);
    CHECK(s1[i].t == s2[i].t);
    CHECK(std::abs(u("gardner_pos", s1[i].x, s1[i].t, 1.0, 0.0, p)) <= 100);
  }
  CHECK(sample_points(e, 1.0, 0.0, p, 200, 8)[0].x != s1[0].x);
}

TEST_CASE("kdv_pos agrees with the integrated profile") {
  CascadeConfig cfg{parse("6*u"), {}, 1, 0, 0, std::nullopt};
  cfg.y_min = -0.1;
  cfg.y_max = 0.6;
  const Cascade f(cfg);
  const WaveProfile p = integrate_profile(f, {}, 0.5, -1);
  double worst = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    worst = std::max(worst, std::abs(p.y[i] - u("kdv_pos", p.z[i], 0, 1)));
  CHECK(worst <= 1e-6);
}
