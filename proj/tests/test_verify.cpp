#include <cmath>

#include "doctest.h"
#include "gkdv/verify.hpp"

using namespace gkdv;

namespace {

// y = c/2 sech^2(sqrt(c) z / 2) and its first two derivatives on a uniform grid
WaveProfile sech2_profile(double c, double h, double half_width, double perturb = 0) {
  WaveProfile p;
  const double k = std::sqrt(c) / 2;
  const int n = static_cast<int>(std::lround(2 * half_width / h));
  for (int i = 0; i <= n; ++i) {
    const double z = -half_width + i * h;
    const double s = 1 / std::cosh(k * z), t = std::tanh(k * z);
    p.z.push_back(z);
    p.y.push_back(c / 2 * s * s + perturb * std::sin(z));
    p.y1.push_back(-c * k * s * s * t + perturb * std::cos(z));
    p.y2.push_back(c * k * k * s * s * (3 * t * t - 1) - perturb * std::sin(z));
  }
  return p;
}

Cascade kdv_cascade() {
  CascadeConfig cfg{parse("6*u"), {}, 1, 0, 0, std::nullopt};
  cfg.y_min = -0.1;
  cfg.y_max = 0.6;
  return Cascade(cfg);
}

}  // namespace

TEST_CASE("ode residual of sampled profiles") {
  const Nonlinearity a = Nonlinearity::bind(parse("6*u"), {});
  CHECK(ode_residual(sech2_profile(1, 0.01, 10), a, 1) <= 1e-6);

  WaveProfile flat;
  for (int i = 0; i < 20; ++i) {
    flat.z.push_back(0.1 * i);
    flat.y.push_back(0.7);
    flat.y1.push_back(0);
    flat.y2.push_back(0);
  }
  CHECK(ode_residual(flat, a, 1) == 0.0);

  const double bad = ode_residual(sech2_profile(1, 0.01, 10, 0.01), a, 1);
  CHECK(bad > 1e-3);
  CHECK(bad < 0.1);

  // sixth-order differences: halving the spacing gains at least 2^4
  const double r1 = ode_residual(sech2_profile(1, 0.2, 10), a, 1);
  const double r2 = ode_residual(sech2_profile(1, 0.1, 10), a, 1);
  CHECK(r1 / r2 >= 16);

  WaveProfile tiny = sech2_profile(1, 1.0, 3.5);
  REQUIRE(tiny.size() == 8);
  CHECK_THROWS_AS(ode_residual(tiny, a, 1), ConfigError);
}

TEST_CASE("ode residual of the integrated profile") {
  const Cascade f = kdv_cascade();
  const WaveProfile p = integrate_profile(f, {}, 0.5, -1);
  CHECK(ode_residual(p, parse("6*u"), 1, {}) <= 1e-6);
}

TEST_CASE("pde residuals") {
  const auto& e = find_entry("kdv_pos");
  const auto pts = sample_points(e, 1.0, 0.0, {}, 200, 11);
  REQUIRE(pts.size() == 200);
  for (const auto& s : pts) CHECK(std::abs(s.x - s.t) <= 10);
  CHECK(pde_residual(e, pts, 1.0, 0.0, {}) <= 1e-8);

  const Nonlinearity a = Nonlinearity::bind(parse("6*u"), {});
  auto constant = [](auto x, auto) { return 0 * x + 0.3; };
  CHECK(pde_residual(constant, a, pts) == 0.0);
  auto wave = [](auto x, auto t) {
    using std::sin;
    return sin(x - t);
  };
  CHECK(pde_residual(wave, a, pts) > 0.5);
}

TEST_CASE("conserved quantities on the sech^2 orbit") {
  const Nonlinearity a = Nonlinearity::bind(parse("6*u"), {});
  CascadeConfig cfg{parse("6*u"), {}, 1, 0, 0, std::nullopt};
  cfg.y_min = -0.1;
  cfg.y_max = 0.6;
  const CascadeLD f(cfg);
  const auto traj = integrate_jet(a, 1, {0, 0.5L, 0, -0.25L}, 20);
  CHECK(static_cast<double>(traj.back().z) == 20.0);
  const ConservedDrift d = conserved_drift(traj, f);
  CHECK(std::abs(d.I3_initial) <= 1e-12);
  CHECK(d.drift_I3 <= 1e-8);
  CHECK(d.drift_I2 <= 1e-8);
  MESSAGE("I3 drift ", d.drift_I3, ", I2 drift ", d.drift_I2, ", ", d.points, " steps");

  // tightening the tolerance by 10^2 reduces the drift at least tenfold
  const ConservedDrift loose = conserved_drift(integrate_jet(a, 1, {0, 0.5L, 0, -0.25L}, 20, {1e-10L, 1e-10L}), f);
  const ConservedDrift tight = conserved_drift(integrate_jet(a, 1, {0, 0.5L, 0, -0.25L}, 20, {1e-12L, 1e-12L}), f);
  CHECK(tight.drift_I3 * 10 <= loose.drift_I3);
}

TEST_CASE("equilibrium and off-orbit starts") {
  const Nonlinearity a6 = Nonlinearity::bind(parse("6*u"), {});
  CascadeConfig cfg{parse("6*u"), {}, 1, 0, 0, std::nullopt};
  cfg.y_min = -1;
  cfg.y_max = 1;
  const CascadeLD f(cfg);
  const auto eq = integrate_jet(a6, 1, {0, 0.3L, 0, 0}, 5);
  const ConservedDrift d = conserved_drift(eq, f);
  CHECK(d.drift_I3 == 0.0);
  CHECK(d.drift_I2 == 0.0);
  CHECK(static_cast<double>(d.I3_initial) == doctest::Approx(-static_cast<double>(f.h1(0.3L).value)).epsilon(1e-15));

  // a = u^2, c = -1, a start with R > 0
  const Nonlinearity a2 = Nonlinearity::bind(parse("u^2"), {});
  CascadeConfig cfg2{parse("u^2"), {}, -1, 0, 0, std::nullopt};
  cfg2.y_min = -3;
  cfg2.y_max = 3;
  const CascadeLD g(cfg2);
  const TrajectoryPoint start{0, 1.0L, 0.2L, 0.1L};
  const long double I3 = start.y * start.y2 - start.y1 * start.y1 / 2 - g.h1(start.y).value;
  const long double I2 = (start.y1 * start.y1 - g.g(start.y).first + 2 * I3) / start.y;
  // R = y C2 + 2 y H2 - 2 C3 with C2 = I2, C3 = I3 equals y1^2 at the start
  CHECK(static_cast<double>(start.y * I2 + g.g(start.y).first - 2 * I3) > 0);
  const ConservedDrift r = conserved_drift(integrate_jet(a2, -1, start, 3), g);
  CHECK(r.drift_I3 <= 1e-7);
  CHECK(r.drift_I2 <= 1e-7);

  CHECK_THROWS_AS(conserved_drift({{0, 1, -1, 0}, {1, 0, -1, 0}}, f), DomainError);
  CHECK_THROWS_AS(integrate_jet(a6, 1, {0, 0.5L, 0, 0}, -1), ConfigError);
}

TEST_CASE("seeded jet points") {
  const Nonlinearity a = Nonlinearity::bind(parse("sqrt(u)"), {});
  const auto p = sample_jet_points(a, -2, 2, 50, 3);
  REQUIRE(p.size() == 50);
  for (const JetPoint& j : p) CHECK(j.y >= 0.1);
  const auto q = sample_jet_points(a, -2, 2, 50, 3);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i].y == q[i].y);
  CHECK_THROWS_AS(sample_jet_points(a, -2, -1, 5, 3), ConfigError);
}

TEST_CASE("full report") {
  VerifyConfig cfg;
  const auto rep = full_report(cfg);
  for (const auto& r : rep) CHECK_MESSAGE(r.pass, r.id, " ", r.max_residual, " ", r.sample);
  std::vector<std::string> ids;
  for (const auto& r : rep) ids.push_back(r.id);
  const std::vector<std::string> expected{"parse",        "determining_equations", "involutivity",
                                          "omega_forms",  "cascade_h2_nested",     "cascade_radicand_slope",
                                          "gauge_shift",  "profile_ode_residual",  "conserved_drift",
                                          "pde_residual_kdv_pos"};
  CHECK(ids == expected);

  // deterministic
  const auto again = full_report(cfg);
  REQUIRE(again.size() == rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i) {
    CHECK(again[i].max_residual == rep[i].max_residual);
    CHECK(again[i].sample == rep[i].sample);
  }

  VerifyConfig m;
  m.a_source = "u^2";
  const auto mrep = full_report(m);
  CHECK(all_pass(mrep));
  CHECK(mrep.back().id == "pde_residual_mkdv_pos");
  for (const auto& r : mrep) CHECK_MESSAGE(r.pass, r.id, " ", r.max_residual, " ", r.sample);
}

TEST_CASE("full report for a logarithmic nonlinearity on y > 0") {
  VerifyConfig cfg;
  cfg.a_source = "u*ln(abs(u))";
  cfg.y_min = 0.05;
  cfg.y_max = 3;
  const auto rep = full_report(cfg);
  for (const auto& r : rep) {
    if (r.id == "parse" || r.id == "determining_equations" || r.id == "involutivity" || r.id == "omega_forms" ||
        r.id.rfind("cascade", 0) == 0 || r.id == "gauge_shift")
      CHECK_MESSAGE(r.pass, r.id, " ", r.max_residual, " ", r.sample);
  }
  CHECK(rep.size() >= 7);
}

TEST_CASE("malformed nonlinearity") {
  VerifyConfig cfg;
  cfg.a_source = "6*";
  const auto rep = full_report(cfg);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].id == "parse");
  CHECK_FALSE(rep[0].pass);
  CHECK_FALSE(all_pass(rep));
  cfg.a_source = "alpha*u";
  CHECK(full_report(cfg).size() == 1);
}
