#pragma once

// Exterior algebra on the second-order jet space J^2(R,R) with coordinates
// (z, y, y1, y2). Vector fields carry dual-number component functions so that
// Lie brackets use exact partial derivatives.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/dual.hpp"
#include "gkdv/expr.hpp"

namespace gkdv {

struct JetPoint {
  double z = 0.0;
  double y = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
};

/// Components on the coordinate frame (d_z, d_y, d_y1, d_y2).
using JetVector = std::array<double, 4>;

class VectorField {
 public:
  using Lifted = std::array<Dual<double>, 4>;
  using Components = std::function<Lifted(const Lifted&)>;
  using DomainPredicate = std::function<bool(const JetPoint&)>;

  VectorField(std::string name, Components components, DomainPredicate domain = {});

  const std::string& name() const { return name_; }
  bool in_domain(const JetPoint& p) const { return !domain_ || domain_(p); }

  /// Throws DomainError outside the declared domain.
  JetVector at(const JetPoint& p) const;

  /// d[i][j] = partial derivative of component i with respect to coordinate j.
  std::array<JetVector, 4> jacobian(const JetPoint& p) const;

 private:
  std::string name_;
  Components components_;
  DomainPredicate domain_;
};

/// Constant-coefficient k-form at a point, stored on the basis
/// dx^I with I strictly increasing, in lexicographic order of I.
class KForm {
 public:
  explicit KForm(int degree);
  KForm(int degree, std::vector<double> coefficients);

  /// dz ^ dy ^ dy1 ^ dy2
  static KForm volume();

  int degree() const { return degree_; }
  std::span<const double> coefficients() const { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// Coefficient of dx^{i1} ^ ... for a strictly increasing index list.
  double coefficient(std::span<const int> indices) const;

  /// Strictly increasing multi-indices of the given degree, in storage order.
  static const std::vector<std::vector<int>>& basis(int degree);

 private:
  int degree_;
  std::vector<double> coeffs_;
};

/// v _| w. Throws ConfigError for degree-0 input.
KForm interior_product(const JetVector& v, const KForm& w);

/// [V, W] at p using dual-number partial derivatives.
JetVector lie_bracket(const VectorField& v, const VectorField& w, const JetPoint& p);

/// Z = d_z + y1 d_y + y2 d_y1 + (c - a(y)) y1 d_y2
VectorField gkdv_vector_field(const Nonlinearity& a, double c);
VectorField gkdv_vector_field(const NonlinearityExpr& a, double c, const ParamBindings& params);

struct CinfStructure {
  VectorField x1;
  VectorField x2;
  VectorField x3;
};

/// X1 = d_z, X2 = d_y1 + (y1/y) d_y2 (y != 0), X3 = d_y2.
CinfStructure cinf_structure();

/// omega_i = X_m _| ... (X_i omitted) ... _| X_1 _| Z _| Omega, for i = 1..m.
std::vector<KForm> structure_forms(const VectorField& z_field, std::span<const VectorField> fields,
                                   const JetPoint& p);

struct OmegaForms {
  std::array<KForm, 3> contraction;
  std::array<KForm, 3> closed_form;
  double max_relative_mismatch;
};

/// The three 1-forms of the reduction at p, from the contraction engine and
/// from their closed forms. Throws ConsistencyError if they differ by more
/// than 1e-10 relative, DomainError if y == 0.
OmegaForms omega_forms(const Nonlinearity& a, double c, const JetPoint& p);
OmegaForms omega_forms(const NonlinearityExpr& a, double c, const ParamBindings& params,
                       const JetPoint& p);

/// Closed forms: w1 = -y1 dz + dy; w2 = -y2 dy + y1 dy1;
/// w3 = -y1 (y2/y + a(y) - c) dy + (y1^2/y) dy1 - y1 dy2.
std::array<KForm, 3> closed_form_omegas(const Nonlinearity& a, double c, const JetPoint& p);

struct InvolutivityPoint {
  JetPoint point;
  std::array<int, 3> rank{};             // numerical rank of {Z, X1..Xi}
  std::array<double, 3> bracket_residual{};  // worst relative out-of-span residual
  bool pass = false;
};

struct InvolutivityReport {
  std::vector<InvolutivityPoint> points;
  double max_bracket_residual = 0.0;
  std::size_t failures = 0;
  bool pass() const { return failures == 0; }
};

inline constexpr double kRankThreshold = 1e-10;
inline constexpr double kBracketTolerance = 1e-8;

/// Numerical rank with singular values below threshold * sigma_max dropped.
int numerical_rank(std::span<const JetVector> columns, double threshold = kRankThreshold);

/// Relative residual of projecting b onto span(columns) by least squares.
double span_residual(std::span<const JetVector> columns, const JetVector& b);

InvolutivityReport involutivity_report(const Nonlinearity& a, double c,
                                       std::span<const JetPoint> sample);
InvolutivityReport involutivity_report(const NonlinearityExpr& a, double c,
                                       const ParamBindings& params,
                                       std::span<const JetPoint> sample);

/// Residuals of the two determining equations for eta(z, y, y1) with
/// eta = y1/y substituted:
///   eta^2 y1 + eta_y y1^2 + eta_y1 y1 y2 - eta y2 + eta_z y1,   eta_z.
/// Evaluated in extended precision. Throws DomainError if y == 0.
std::pair<double, double> determining_residual(const JetPoint& p);

}  // namespace gkdv
