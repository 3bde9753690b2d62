#pragma once

// Quadrature cascade for travelling waves of u_t + u_xxx + a(u) u_x = 0:
//
//   H1' = y (c - a(y)),   H2' = H1 / y^2,   R = y (C2 + 2 H2) - 2 C3,
//   H3' = 1 / sqrt(R).
//
// With G = 2 y H2 one has G'' = 2 (c - a), so H1, G and G' at any point
// follow from a single quadrature of a between the point and a cached knot.

#include <optional>
#include <utility>
#include <vector>

#include "gkdv/expr.hpp"
#include "gkdv/quadrature.hpp"

namespace gkdv {

struct CascadeConfig {
  NonlinearityExpr a;
  ParamBindings params;
  double c = 1.0;
  double C2 = 0.0;
  double C3 = 0.0;
  std::optional<double> y_base;  // default: 0 when admissible, else the domain midpoint
  double y_min = -4.0;
  double y_max = 4.0;
  QuadTolerance<double> quad{};
};

template <class Real>
struct Estimate {
  Real value;
  Real error;
};

template <class Real>
class BasicCascade {
 public:
  /// Throws ConfigError for an invalid domain or base point and DomainError
  /// when a cannot be evaluated on the domain.
  explicit BasicCascade(const CascadeConfig& cfg);

  Real c() const { return c_; }
  Real C2() const { return C2_; }
  Real C3() const { return C3_; }
  Real y_base() const { return y_base_; }
  Real y_min() const { return lo_; }
  Real y_max() const { return hi_; }
  const Nonlinearity& nonlinearity() const { return a_; }

  /// Largest |R| and |R'| over the knot grid; reference scales for tolerances.
  Real radicand_scale() const { return r_scale_; }
  Real radicand_slope_scale() const { return rp_scale_; }

  Estimate<Real> h1(Real y) const;
  Estimate<Real> h2(Real y) const;
  Real radicand(Real y) const;
  Real radicand_derivative(Real y) const;
  Real radicand_second_derivative(Real y) const;

  /// G(y) = 2 y H2(y) and G'(y) = 2 H2 + 2 H1 / y, finite through y = 0.
  std::pair<Real, Real> g(Real y) const;

  /// H2 by literal nested quadrature of H1(s)/s^2 from the base point.
  Real h2_nested(Real y) const;

  /// Integral of 1/sqrt(R) from y_ref to y. Simple roots at either endpoint
  /// are integrable and handled by s = s* -/+ w^2. Throws DomainError at a
  /// double root endpoint or where R <= 0 inside the interval.
  Estimate<Real> h3(Real y_ref, Real y) const;

  const CascadeConfig& config() const { return cfg_; }

 private:
  struct Knot {
    Real y, h1, g, gp;
    Real h1_err, g_err, gp_err;
  };
  struct Local {
    Real h1, g, gp;
    Real h1_err, g_err, gp_err;
  };

  Local local(Real y) const;
  void require_in_domain(Real y) const;

  CascadeConfig cfg_;
  Nonlinearity a_;
  Real c_, C2_, C3_, y_base_, lo_, hi_;
  QuadTolerance<Real> tol_;
  std::vector<Knot> knots_;
  Real r_scale_ = 0;
  Real rp_scale_ = 0;
};

using Cascade = BasicCascade<double>;
using CascadeLD = BasicCascade<long double>;

/// Base point chosen when CascadeConfig::y_base is unset.
double default_base_point(const CascadeConfig& cfg);

struct GaugeShiftReport {
  double delta_C2 = 0.0;
  double delta_C3 = 0.0;
  double max_residual = 0.0;  // max |R_shifted - R'| / max(1, |R'|) over the overlap
  double tolerance = 1e-9;
  std::size_t points = 0;
  bool pass = false;
};

/// Checks that moving the base point from cfg.y_base to other.y_base is
/// absorbed by C2 -> C2 + dC2, C3 -> C3 + dC3 with
/// dC2 = -G'(b'), dC3 = -H1(b') computed in the first gauge.
GaugeShiftReport gauge_shift_check(const CascadeConfig& cfg, const CascadeConfig& other,
                                   std::size_t points = 1000, double tolerance = 1e-9);

}  // namespace gkdv
