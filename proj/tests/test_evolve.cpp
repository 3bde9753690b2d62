#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gkdv/evolve.hpp"

using namespace gkdv;

namespace {

double kdv(double xi, double c = 1) {
  const double s = 1 / std::cosh(std::sqrt(c) / 2 * xi);
  return c / 2 * s * s;
}

Nonlinearity bind(const char* a) { return Nonlinearity::bind(parse(a), {}); }

}  // namespace

TEST_CASE("grid") {
  SpectralGrid g{128, 10};
  CHECK(g.x(0) == -5);
  CHECK(g.dx() == doctest::Approx(10.0 / 128));
  CHECK(g.points().size() == 128);
  CHECK_THROWS_AS((SpectralGrid{100, 10}.validate()), ConfigError);
  CHECK_THROWS_AS((SpectralGrid{32, 10}.validate()), ConfigError);
  CHECK_THROWS_AS((SpectralGrid{128, -1}.validate()), ConfigError);
}

TEST_CASE("constants are stationary") {
  SpectralGrid g{64, 20};
  FieldState s;
  s.u.assign(64, 0.7);
  const auto r = evolve_gkdv(s, bind("6*u"), g, 0.01, 3.0);
  for (double v : r.state.u) CHECK(std::abs(v - 0.7) <= 1e-14);
  CHECK(r.state.t == doctest::Approx(3.0));
  CHECK(r.warnings.size() == 1);  // the boundary value is not small
}

TEST_CASE("small single mode follows the linear dispersion relation") {
  SpectralGrid g{128, 40};
  const int m = 5;
  const double k = 2 * std::numbers::pi * m / g.L;
  const double eps = 1e-8;
  FieldState s;
  for (std::size_t j = 0; j < g.N; ++j) s.u.push_back(eps * std::sin(k * g.x(j)));
  const auto r = evolve_gkdv(s, bind("6*u"), g, 0.01, 1.0);
  // projection on sin and cos of mode m gives the phase
  double sc = 0, cc = 0;
  for (std::size_t j = 0; j < g.N; ++j) {
    sc += r.state.u[j] * std::sin(k * g.x(j));
    cc += r.state.u[j] * std::cos(k * g.x(j));
  }
  const double phase = std::atan2(cc, sc);
  CHECK(std::abs(phase - k * k * k) <= 1e-6);
}

TEST_CASE("KdV soliton propagates rigidly") {
  SpectralGrid g{1024, 80};
  const auto& e = find_entry("kdv_pos");
  const FieldState s0 = initial_state(g, [](double x) { return kdv(x); });
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = evolve_gkdv(s0, bind("6*u"), g, 0, 10.0, 500);
  MESSAGE("evolution time ", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), " s, ",
          r.steps, " steps of ", r.dt);
  CHECK(r.warnings.empty());
  CHECK(std::abs(peak_position(g, r.state.u) - 10.0) <= 0.05);
  const ShapeError err = shape_error(g, r.state, e, 1.0, 0.0, {});
  CHECK(err.aligned <= 1e-3);
  CHECK(err.raw <= 1e-3);
  CHECK(std::abs(mass(g, r.state.u) - mass(g, s0.u)) <= 1e-9 * std::abs(mass(g, s0.u)));
  CHECK(mass(g, s0.u) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.snapshots.front().t == 0.0);
  CHECK(r.snapshots.back().t == doctest::Approx(10.0));
  CHECK(r.snapshots.size() == (r.steps + 499) / 500 + 1);
}

TEST_CASE("modified KdV soliton") {
  SpectralGrid g{1024, 80};
  const auto& e = find_entry("mkdv_pos");
  auto F = [&](double xi) { return eval_entry<double>(e, xi, 0.0, 1.0, 0.0, {}); };
  const auto r = evolve_gkdv(initial_state(g, F), bind("u^2"), g, 0, 5.0);
  CHECK(shape_error(g, r.state, e, 1.0, 0.0, {}).aligned <= 1e-3);
}

TEST_CASE("shape error of the exact reference") {
  SpectralGrid g{256, 60};
  FieldState s = initial_state(g, [](double x) { return kdv(x, 2); }, 1.5);
  const ShapeError e0 = shape_error(g, s, [](double x) { return kdv(x, 2); }, 2.0, 1.5);
  CHECK(e0.raw <= 1e-15);
  CHECK(e0.aligned <= 1e-15);
  // a displaced state: the alignment removes the phase
  s.t = 0.1;
  const ShapeError e1 = shape_error(g, s, [](double x) { return kdv(x, 2); }, 2.0, 1.5);
  CHECK(e1.raw > 0.01);
  CHECK(e1.phase == doctest::Approx(-0.2).epsilon(1e-2));
  CHECK(e1.aligned < e1.raw / 10);
}

TEST_CASE("convergence in N and dt") {
  const Nonlinearity a = bind("6*u");
  const auto& e = find_entry("kdv_pos");
  auto run = [&](std::size_t N, double dt) {
    SpectralGrid g{N, 40};
    const auto r = evolve_gkdv(initial_state(g, [](double x) { return kdv(x); }), a, g, dt, 1.0);
    return shape_error(g, r.state, e, 1.0, 0.0, {}).raw;
  };
  const double n1 = run(64, 0.002), n2 = run(128, 0.002);
  MESSAGE("N: ", n1, " -> ", n2);
  CHECK(n1 / n2 >= 10);
  const double d1 = run(128, 0.1), d2 = run(128, 0.05);
  MESSAGE("dt: ", d1, " -> ", d2);
  CHECK(d1 / d2 >= 10);
}

TEST_CASE("blow-up and bad input") {
  SpectralGrid g{128, 40};
  const FieldState big = initial_state(g, [](double x) { return kdv(x, 16); });
  CHECK_THROWS_AS(evolve_gkdv(big, bind("6*u"), g, 1.0, 50.0), NumericalError);
  FieldState nan = big;
  nan.u[3] = std::nan("");
  CHECK_THROWS_AS(evolve_gkdv(nan, bind("6*u"), g, 0.01, 1.0), NumericalError);
  FieldState wrong;
  wrong.u.assign(64, 0.0);
  CHECK_THROWS_AS(evolve_gkdv(wrong, bind("6*u"), g, 0.01, 1.0), ConfigError);
  const auto r = evolve_gkdv(big, bind("6*u"), g, 0.01, 0.0);
  CHECK(r.steps == 0);
  CHECK(r.state.u == big.u);
}
