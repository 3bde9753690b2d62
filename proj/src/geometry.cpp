#include "gkdv/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

namespace gkdv {

namespace {

using Lifted = VectorField::Lifted;

Lifted lift(const JetPoint& p, int seed = -1) {
  Lifted x{Dual<double>(p.z, 0.0), Dual<double>(p.y, 0.0), Dual<double>(p.y1, 0.0),
           Dual<double>(p.y2, 0.0)};
  if (seed >= 0) x[static_cast<std::size_t>(seed)].der = 1.0;
  return x;
}

std::vector<std::vector<int>> make_basis(int degree) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < 16; ++mask) {
    if (std::popcount(mask) != degree) continue;
    std::vector<int> idx;
    for (int i = 0; i < 4; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t basis_position(int degree, std::span<const int> indices) {
  const auto& b = KForm::basis(degree);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (std::equal(b[i].begin(), b[i].end(), indices.begin(), indices.end())) return i;
  }
  throw ConfigError("index list is not strictly increasing");
}

Eigen::MatrixXd as_matrix(std::span<const JetVector> columns) {
  Eigen::MatrixXd m(4, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (int i = 0; i < 4; ++i) m(i, static_cast<Eigen::Index>(j)) = columns[j][static_cast<std::size_t>(i)];
  return m;
}

}  // namespace

VectorField::VectorField(std::string name, Components components, DomainPredicate domain)
    : name_(std::move(name)), components_(std::move(components)), domain_(std::move(domain)) {}

JetVector VectorField::at(const JetPoint& p) const {
  if (!in_domain(p)) throw DomainError("point outside the domain of " + name_);
  const Lifted v = components_(lift(p));
  return {v[0].val, v[1].val, v[2].val, v[3].val};
}

std::array<JetVector, 4> VectorField::jacobian(const JetPoint& p) const {
  if (!in_domain(p)) throw DomainError("point outside the domain of " + name_);
  std::array<JetVector, 4> d{};
  for (int j = 0; j < 4; ++j) {
    const Lifted v = components_(lift(p, j));
    for (std::size_t i = 0; i < 4; ++i) d[i][static_cast<std::size_t>(j)] = v[i].der;
  }
  return d;
}

KForm::KForm(int degree) : degree_(degree) {
  if (degree < 0 || degree > 4) throw ConfigError("form degree must be in 0..4");
  coeffs_.assign(basis(degree).size(), 0.0);
}

KForm::KForm(int degree, std::vector<double> coefficients) : KForm(degree) {
  if (coefficients.size() != coeffs_.size()) throw ConfigError("wrong number of form coefficients");
  coeffs_ = std::move(coefficients);
}

KForm KForm::volume() { return KForm(4, {1.0}); }

double KForm::coefficient(std::span<const int> indices) const {
  return coeffs_[basis_position(degree_, indices)];
}

const std::vector<std::vector<int>>& KForm::basis(int degree) {
  static const std::array<std::vector<std::vector<int>>, 5> table{
      make_basis(0), make_basis(1), make_basis(2), make_basis(3), make_basis(4)};
  return table.at(static_cast<std::size_t>(degree));
}

KForm interior_product(const JetVector& v, const KForm& w) {
  if (w.degree() < 1) throw ConfigError("cannot contract a 0-form");
  KForm out(w.degree() - 1);
  const auto& target = KForm::basis(out.degree());
  std::vector<int> merged;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const auto& J = target[t];
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (std::find(J.begin(), J.end(), i) != J.end()) continue;
      // moving i from the front to its sorted slot costs one sign per smaller index
      const auto slot = std::count_if(J.begin(), J.end(), [i](int j) { return j < i; });
      merged.assign(J.begin(), J.end());
      merged.insert(merged.begin() + slot, i);
      const double sign = (slot % 2 == 0) ? 1.0 : -1.0;
      acc += sign * v[static_cast<std::size_t>(i)] * w.coefficient(merged);
    }
    out[t] = acc;
  }
  return out;
}

JetVector lie_bracket(const VectorField& v, const VectorField& w, const JetPoint& p) {
  const JetVector vv = v.at(p);
  const JetVector wv = w.at(p);
  const auto dv = v.jacobian(p);
  const auto dw = w.jacobian(p);
  JetVector out{};
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j) acc += vv[j] * dw[i][j] - wv[j] * dv[i][j];
    out[i] = acc;
  }
  return out;
}

VectorField gkdv_vector_field(const Nonlinearity& a, double c) {
  return VectorField("Z", [a, c](const Lifted& x) -> Lifted {
    const Dual<double> ay = a(x[1]);
    return {Dual<double>(1.0), x[2], x[3], (c - ay) * x[2]};
  });
}

VectorField gkdv_vector_field(const NonlinearityExpr& a, double c, const ParamBindings& params) {
  return gkdv_vector_field(Nonlinearity::bind(a, params), c);
}

CinfStructure cinf_structure() {
  VectorField x1("X1", [](const Lifted&) -> Lifted {
    return {Dual<double>(1.0), Dual<double>(0.0), Dual<double>(0.0), Dual<double>(0.0)};
  });
  VectorField x2(
      "X2",
      [](const Lifted& x) -> Lifted {
        return {Dual<double>(0.0), Dual<double>(0.0), Dual<double>(1.0), x[2] / x[1]};
      },
      [](const JetPoint& p) { return p.y != 0.0; });
  VectorField x3("X3", [](const Lifted&) -> Lifted {
    return {Dual<double>(0.0), Dual<double>(0.0), Dual<double>(0.0), Dual<double>(1.0)};
  });
  return {std::move(x1), std::move(x2), std::move(x3)};
}

std::vector<KForm> structure_forms(const VectorField& z_field, std::span<const VectorField> fields,
                                   const JetPoint& p) {
  const KForm base = interior_product(z_field.at(p), KForm::volume());
  std::vector<KForm> out;
  out.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    KForm w = base;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == i) continue;
      w = interior_product(fields[j].at(p), w);
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::array<KForm, 3> closed_form_omegas(const Nonlinearity& a, double c, const JetPoint& p) {
  if (p.y == 0.0) throw DomainError("closed-form omega_3 requires y != 0");
  const double ay = a(p.y);
  return {KForm(1, {-p.y1, 1.0, 0.0, 0.0}), KForm(1, {0.0, -p.y2, p.y1, 0.0}),
          KForm(1, {0.0, -p.y1 * (p.y2 / p.y + ay - c), p.y1 * p.y1 / p.y, -p.y1})};
}

OmegaForms omega_forms(const Nonlinearity& a, double c, const JetPoint& p) {
  if (p.y == 0.0) throw DomainError("omega forms require y != 0");
  const VectorField z = gkdv_vector_field(a, c);
  const CinfStructure s = cinf_structure();
  const std::array<VectorField, 3> xs{s.x1, s.x2, s.x3};
  const std::vector<KForm> engine = structure_forms(z, xs, p);
  OmegaForms out{{engine[0], engine[1], engine[2]}, closed_form_omegas(a, c, p), 0.0};
  for (std::size_t k = 0; k < 3; ++k) {
    double scale = 1.0;
    for (double v : out.closed_form[k].coefficients()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < 4; ++i) {
      const double d = std::abs(out.contraction[k][i] - out.closed_form[k][i]) / scale;
      out.max_relative_mismatch = std::max(out.max_relative_mismatch, d);
    }
  }
  if (out.max_relative_mismatch > 1e-10)
    throw ConsistencyError("contraction-engine omega forms disagree with their closed forms");
  return out;
}

OmegaForms omega_forms(const NonlinearityExpr& a, double c, const ParamBindings& params,
                       const JetPoint& p) {
  return omega_forms(Nonlinearity::bind(a, params), c, p);
}

int numerical_rank(std::span<const JetVector> columns, double threshold) {
  if (columns.empty()) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_matrix(columns));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold * s(0)) ++rank;
  return rank;
}

double span_residual(std::span<const JetVector> columns, const JetVector& b) {
  const auto m = as_matrix(columns);
  const Eigen::Vector4d rhs(b[0], b[1], b[2], b[3]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankThreshold);
  const Eigen::VectorXd coef = svd.solve(rhs);
  const double resid = (m * coef - rhs).norm();
  double scale = rhs.norm();
  for (Eigen::Index j = 0; j < m.cols(); ++j) scale = std::max(scale, m.col(j).norm());
  return scale > 0.0 ? resid / scale : 0.0;
}

InvolutivityReport involutivity_report(const Nonlinearity& a, double c,
                                       std::span<const JetPoint> sample) {
  const VectorField z = gkdv_vector_field(a, c);
  const CinfStructure s = cinf_structure();
  const std::array<const VectorField*, 4> fields{&z, &s.x1, &s.x2, &s.x3};

  InvolutivityReport report;
  for (const JetPoint& p : sample) {
    InvolutivityPoint r{p, {}, {}, true};
    try {
      std::array<JetVector, 4> values{};
      for (std::size_t k = 0; k < 4; ++k) values[k] = fields[k]->at(p);
      for (std::size_t i = 1; i <= 3; ++i) {
        const std::span<const JetVector> cols(values.data(), i + 1);
        r.rank[i - 1] = numerical_rank(cols);
        double worst = 0.0;
        for (std::size_t m = 0; m <= i; ++m)
          for (std::size_t n = m + 1; n <= i; ++n)
            worst = std::max(worst, span_residual(cols, lie_bracket(*fields[m], *fields[n], p)));
        r.bracket_residual[i - 1] = worst;
        if (r.rank[i - 1] != static_cast<int>(i) + 1 || worst > kBracketTolerance) r.pass = false;
        report.max_bracket_residual = std::max(report.max_bracket_residual, worst);
      }
    } catch (const DomainError&) {
      r.pass = false;
    }
    if (!r.pass) ++report.failures;
    report.points.push_back(r);
  }
  return report;
}

InvolutivityReport involutivity_report(const NonlinearityExpr& a, double c,
                                       const ParamBindings& params,
                                       std::span<const JetPoint> sample) {
  return involutivity_report(Nonlinearity::bind(a, params), c, sample);
}

std::pair<double, double> determining_residual(const JetPoint& p) {
  if (p.y == 0.0) throw DomainError("determining equations require y != 0");
  using D = Dual<long double>;
  // eta(z, y, y1) = y1 / y, lifted once per coordinate
  auto eta = [&](int seed) {
    D z(p.z, seed == 0 ? 1.0L : 0.0L);
    D y(p.y, seed == 1 ? 1.0L : 0.0L);
    D y1(p.y1, seed == 2 ? 1.0L : 0.0L);
    (void)z;
    return y1 / y;
  };
  const D ez = eta(0);
  const D ey = eta(1);
  const D ey1 = eta(2);
  const long double e = ez.val;
  const long double y1 = p.y1;
  const long double y2 = p.y2;
  const long double r1 = e * e * y1 + ey.der * y1 * y1 + ey1.der * y1 * y2 - e * y2 + ez.der * y1;
  return {static_cast<double>(r1), static_cast<double>(ez.der)};
}

}  // namespace gkdv
