#include "gkdv/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

namespace gkdv {

namespace detail {

double param(const ParamBindings& p, const char* name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ConfigError(std::string("missing catalog parameter ") + name);
  return it->second;
}

int integer_param(const ParamBindings& p, const char* name) {
  const double v = param(p, name);
  if (!(v >= 1 && v == std::trunc(v) && v <= 64)) throw ConfigError(std::string(name) + " must be an integer in [1, 64]");
  return static_cast<int>(v);
}

}  // namespace detail

namespace {

std::vector<CatalogEntry> make_entries() {
  const std::string theta = "(C1 - x + c t)";
  std::vector<CatalogEntry> v;
  auto add = [&v](std::string id, Family f, std::string a, std::vector<std::string> names, std::string formula,
                  std::string constraints) {
    CatalogEntry e;
    e.id = std::move(id);
    e.family = f;
    e.a_source = std::move(a);
    e.param_names = std::move(names);
    e.formula = std::move(formula);
    e.constraints = std::move(constraints);
    v.push_back(std::move(e));
  };
  add("kdv_pos", Family::kdv_pos, "6*u", {}, "u = c/2 sech^2(sqrt(c)/2 " + theta + ")", "c > 0");
  add("kdv_neg", Family::kdv_neg, "6*u", {}, "u = c/2 sec^2(sqrt(-c)/2 " + theta + ")", "c < 0");
  add("mkdv_pos", Family::mkdv_pos, "u^2", {},
               "u = 144 c e^s / (e^(2s) + 864 c), s = sqrt(c) " + theta, "c > 0");
  add("power_pos", Family::power_pos, "u^n/n", {"n"},
               "u = (c n(n+1)(n+2) / (2 cosh^2(n/2 sqrt(c) " + theta + ")))^(1/n)", "c > 0, n = 1, 2, ...");
  add("power_neg", Family::power_neg, "u^n/n", {"n"},
               "u = (c n(n+1)(n+2) / (2 cos^2(n/2 sqrt(-c) " + theta + ")))^(1/n), real root",
               "c < 0, n = 1, 2, ...");
  add("schamel_kdv_pos", Family::schamel_kdv_pos, "alpha*sqrt(u)+beta*u", {"alpha", "beta"},
               "u = (900 c h / (240 alpha h + h^2 + 67500 beta c + 14400 alpha^2))^2, h = e^(sqrt(c)/2 " + theta + ")",
               "c > 0");
  add("schamel_kdv_neg", Family::schamel_kdv_neg, "alpha*sqrt(u)+beta*u", {"alpha", "beta"},
               "u = 225 c^2 (8 alpha sqrt(xi) sin q + d) / d^2, d = 75 beta c - xi cos^2 q, q = sqrt(-c)/2 " + theta +
                   ", xi = 16 alpha^2 + 75 beta c",
               "c < 0, xi >= 0");
  add("gardner_pos", Family::gardner_pos, "2*alpha*u-beta*u^2", {"alpha", "beta"},
               "u = 144 c e^s / (576 alpha^2 + 48 alpha e^s - 864 beta c + e^(2s)), s = sqrt(c) " + theta,
               "c > 0, (alpha, beta) != (0, 0)");
  return v;
}

// screening configurations: (c, params) pairs every one of which must pass
struct ScreenCase {
  double c;
  ParamBindings params;
};

std::vector<ScreenCase> screen_cases(const CatalogEntry& e) {
  switch (e.family) {
    case Family::kdv_pos:
    case Family::mkdv_pos:
      return {{1.0, {}}, {2.5, {}}};
    case Family::kdv_neg:
      return {{-1.0, {}}, {-2.5, {}}};
    case Family::power_pos:
      return {{1.0, {{"n", 1}}}, {1.0, {{"n", 2}}}, {1.0, {{"n", 3}}}, {1.0, {{"n", 4}}}};
    case Family::power_neg:
      return {{-1.0, {{"n", 1}}}, {-1.0, {{"n", 2}}}, {-1.0, {{"n", 3}}}, {-1.0, {{"n", 4}}}};
    case Family::schamel_kdv_pos:
      return {{1.0, {{"alpha", 1}, {"beta", 1}}}, {0.5, {{"alpha", -0.5}, {"beta", 2}}}};
    case Family::schamel_kdv_neg:
      return {{-1.0, {{"alpha", 1}, {"beta", -1}}}, {-1.0, {{"alpha", 3}, {"beta", 1}}}};
    case Family::gardner_pos:
      return {{1.0, {{"alpha", 1}, {"beta", 1}}}, {1.0, {{"alpha", 1}, {"beta", -1}}}};
  }
  return {};
}

constexpr double kScreenTolerance = 1e-8;
constexpr std::size_t kScreenPoints = 200;
constexpr std::uint64_t kScreenSeed = 20240611;

void screen(CatalogEntry& e) {
  double worst = 0;
  bool real = true;
  for (const ScreenCase& sc : screen_cases(e)) {
    const Nonlinearity a = Nonlinearity::bind(parse(e.a_source), sc.params);
    const auto pts = sample_points(e, sc.c, 0.0, sc.params, kScreenPoints, kScreenSeed);
    if (pts.size() < kScreenPoints) {
      real = false;
      continue;
    }
    for (const SamplePoint& p : pts) {
      const double r = std::abs(pde_residual_at(e, a, p.x, p.t, sc.c, 0.0, sc.params));
      worst = std::max(worst, std::isfinite(r) ? r : std::numeric_limits<double>::infinity());
    }
  }
  e.screen_residual = worst;
  e.validated = real && worst <= kScreenTolerance;
  if (!real) e.note = "no real values for some screened parameters";
  else if (!e.validated) e.note = "fails the PDE residual screen";
  if (e.family == Family::power_neg) e.note = "real-valued only for odd n; " + e.note;
}

// half-width of the sampled window in theta = C1 - x + c t
double window(const CatalogEntry& e, double c, const ParamBindings& params) {
  switch (e.family) {
    case Family::kdv_neg:
      return 2.0 / std::sqrt(-c);
    case Family::power_neg:
      return 2.0 / (detail::integer_param(params, "n") * std::sqrt(-c));
    case Family::schamel_kdv_neg:
      return 2 * std::numbers::pi / std::sqrt(-c);
    default:
      return 10.0;
  }
}

}  // namespace

const std::vector<CatalogEntry>& list_catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    auto v = make_entries();
    for (CatalogEntry& e : v) screen(e);
    return v;
  }();
  return entries;
}

const CatalogEntry& find_entry(std::string_view id) {
  for (const CatalogEntry& e : list_catalog())
    if (e.id == id) return e;
  throw ConfigError("unknown catalog entry '" + std::string(id) + "'");
}

void check_constraints(const CatalogEntry& e, double c, const ParamBindings& params) {
  if (!std::isfinite(c)) throw ConfigError("c must be finite");
  const bool positive = e.family == Family::kdv_pos || e.family == Family::mkdv_pos ||
                        e.family == Family::power_pos || e.family == Family::schamel_kdv_pos ||
                        e.family == Family::gardner_pos;
  if (positive && !(c > 0)) throw ConfigError(e.id + " requires c > 0");
  if (!positive && !(c < 0)) throw ConfigError(e.id + " requires c < 0");
  for (const std::string& name : e.param_names)
    if (!std::isfinite(detail::param(params, name.c_str()))) throw ConfigError(name + " must be finite");
  switch (e.family) {
    case Family::power_pos:
    case Family::power_neg:
      detail::integer_param(params, "n");
      break;
    case Family::schamel_kdv_neg: {
      const double al = detail::param(params, "alpha");
      const double be = detail::param(params, "beta");
      if (16 * al * al + 75 * be * c < 0) throw ConfigError("schamel_kdv_neg requires xi = 16 alpha^2 + 75 beta c >= 0");
      break;
    }
    case Family::gardner_pos:
      if (detail::param(params, "alpha") == 0 && detail::param(params, "beta") == 0)
        throw ConfigError("gardner_pos with alpha = beta = 0 is a(u) = 0, outside the family");
      break;
    default:
      break;
  }
}

ParamBindings default_params(const CatalogEntry& e) {
  switch (e.family) {
    case Family::power_pos:
    case Family::power_neg:
      return {{"n", 1}};
    case Family::schamel_kdv_pos:
    case Family::gardner_pos:
      return {{"alpha", 1}, {"beta", 1}};
    case Family::schamel_kdv_neg:
      return {{"alpha", 1}, {"beta", -1}};
    default:
      return {};
  }
}

double pde_residual_at(const CatalogEntry& e, const Nonlinearity& a, double x, double t, double c, double C1,
                       const ParamBindings& params) {
  using D1 = Dual<double>;
  using D3 = Dual<Dual<Dual<double>>>;
  const D3 ux = eval_entry<D3>(e, seed_variable<D3>(x), D3(t), c, C1, params);
  const D1 ut = eval_entry<D1>(e, D1(x), seed_variable<D1>(t), c, C1, params);
  const double u = derivative<0>(ux);
  return ut.der + derivative<3>(ux) + a(u) * derivative<1>(ux);
}

std::vector<SamplePoint> sample_points(const CatalogEntry& e, double c, double C1, const ParamBindings& params,
                                       std::size_t count, std::uint64_t seed) {
  check_constraints(e, c, params);
  const double w = window(e, c, params);
  const Nonlinearity a = Nonlinearity::bind(parse(e.a_source), params);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th_dist(-w, w);
  std::uniform_real_distribution<double> t_dist(0.0, 1.0);
  std::vector<SamplePoint> out;
  for (std::size_t draws = 0; out.size() < count && draws < 20 * count; ++draws) {
    const double th = th_dist(rng);
    const double t = t_dist(rng);
    const double x = C1 + c * t - th;
    try {
      const double u = eval_entry<double>(e, x, t, c, C1, params);
      if (!std::isfinite(u) || std::abs(u) > 100) continue;
      a(u);
    } catch (const DomainError&) {
      continue;
    }
    out.push_back({x, t});
  }
  return out;
}

}  // namespace gkdv
