#pragma once

// Closed-form travelling-wave families u(x, t) = F(C1 - x + c t) for
// particular nonlinearities. Evaluators accept double or nested duals in
// x and t, so derivatives of any order are exact.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gkdv/dual.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/expr.hpp"

namespace gkdv {

enum class Family { kdv_pos, kdv_neg, mkdv_pos, power_pos, power_neg, schamel_kdv_pos, schamel_kdv_neg, gardner_pos };

struct CatalogEntry {
  std::string id;
  Family family;
  std::string a_source;
  std::vector<std::string> param_names;
  std::string formula;
  std::string constraints;
  bool validated = false;
  double screen_residual = 0.0;  // worst residual seen while screening
  std::string note;
};

/// All entries, screened once against the PDE on first use.
const std::vector<CatalogEntry>& list_catalog();

/// Throws ConfigError for an unknown id.
const CatalogEntry& find_entry(std::string_view id);

/// Throws ConfigError when c or the parameters are outside the family.
void check_constraints(const CatalogEntry& e, double c, const ParamBindings& params);

/// Representative parameters used for screening and examples.
ParamBindings default_params(const CatalogEntry& e);

namespace detail {

double param(const ParamBindings& p, const char* name);
int integer_param(const ParamBindings& p, const char* name);

template <class T>
void require_nonzero(const T& d, const char* what) {
  if (primal(d) == 0) throw DomainError(std::string("zero denominator in ") + what);
}

}  // namespace detail

template <class T>
T eval_entry(const CatalogEntry& e, const T& x, const T& t, double c, double C1, const ParamBindings& params) {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::pow;
  using std::sin;
  using std::sqrt;
  check_constraints(e, c, params);
  const T th = C1 - x + c * t;
  switch (e.family) {
    case Family::kdv_pos: {
      const T ch = cosh(std::sqrt(c) / 2 * th);
      return c / 2 / (ch * ch);
    }
    case Family::kdv_neg: {
      const T co = cos(std::sqrt(-c) / 2 * th);
      detail::require_nonzero(co, "sec^2");
      return c / 2 / (co * co);
    }
    case Family::mkdv_pos: {
      const T s = exp(std::sqrt(c) * th);
      return 144 * c * s / (s * s + 864 * c);
    }
    case Family::power_pos: {
      const int n = detail::integer_param(params, "n");
      const T ch = cosh(n / 2.0 * std::sqrt(c) * th);
      const T base = c * n * (n + 1) * (n + 2) / (2 * ch * ch);
      return pow(base, 1.0 / n);
    }
    case Family::power_neg: {
      const int n = detail::integer_param(params, "n");
      const T co = cos(n / 2.0 * std::sqrt(-c) * th);
      detail::require_nonzero(co, "power_neg");
      const T base = c * n * (n + 1) * (n + 2) / (2 * co * co);
      if (n % 2 == 0) throw DomainError("power_neg: even root of a negative number");
      return -pow(-base, 1.0 / n);
    }
    case Family::schamel_kdv_pos: {
      const double al = detail::param(params, "alpha");
      const double be = detail::param(params, "beta");
      const T h = exp(std::sqrt(c) / 2 * th);
      const T d = 240 * al * h + h * h + 67500 * be * c + 14400 * al * al;
      detail::require_nonzero(d, "schamel_kdv_pos");
      const T q = 900 * c * h / d;
      return q * q;
    }
    case Family::schamel_kdv_neg: {
      const double al = detail::param(params, "alpha");
      const double be = detail::param(params, "beta");
      const double xi = 16 * al * al + 75 * be * c;
      const T q = std::sqrt(-c) * th / 2;
      const T co = cos(q);
      const T d = 75 * be * c - xi * co * co;
      detail::require_nonzero(d, "schamel_kdv_neg");
      return 225 * c * c * (8 * al * std::sqrt(xi) * sin(q) + d) / (d * d);
    }
    case Family::gardner_pos: {
      const double al = detail::param(params, "alpha");
      const double be = detail::param(params, "beta");
      const T s = exp(std::sqrt(c) * th);
      const T d = 576 * al * al + 48 * al * s - 864 * be * c + s * s;
      detail::require_nonzero(d, "gardner_pos");
      return 144 * c * s / d;
    }
  }
  throw ConfigError("unknown catalog family");
}

/// u_t + u_xxx + a(u) u_x at one point, with nested-dual derivatives.
double pde_residual_at(const CatalogEntry& e, const Nonlinearity& a, double x, double t, double c, double C1,
                       const ParamBindings& params);

struct SamplePoint {
  double x;
  double t;
};

/// Seeded sample of (x, t) where the entry is regular: |C1 - x + c t| within
/// the family's window, t in [0, 1], |u| <= 100 and no domain errors.
/// Fewer than count points are returned if too many draws are rejected.
std::vector<SamplePoint> sample_points(const CatalogEntry& e, double c, double C1, const ParamBindings& params,
                                       std::size_t count, std::uint64_t seed);

}  // namespace gkdv
