#include "gkdv/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gkdv {

namespace {

constexpr int kKnotIntervals = 64;

std::string num(double v) { return std::to_string(v); }

}  // namespace

double default_base_point(const CascadeConfig& cfg) {
  if (cfg.y_min <= 0.0 && cfg.y_max >= 0.0) {
    try {
      Nonlinearity::bind(cfg.a, cfg.params)(0.0);
      return 0.0;
    } catch (const DomainError&) {
    }
  }
  return 0.5 * (cfg.y_min + cfg.y_max);
}

template <class Real>
BasicCascade<Real>::BasicCascade(const CascadeConfig& cfg)
    : cfg_(cfg), a_(Nonlinearity::bind(cfg.a, cfg.params)) {
  if (!std::isfinite(cfg.c) || !std::isfinite(cfg.C2) || !std::isfinite(cfg.C3))
    throw ConfigError("c, C2 and C3 must be finite");
  if (!(std::isfinite(cfg.y_min) && std::isfinite(cfg.y_max) && cfg.y_min < cfg.y_max))
    throw ConfigError("domain must be a finite interval with y_min < y_max");
  if (!(cfg.quad.abs > 0.0) || !(cfg.quad.rel > 0.0)) throw ConfigError("quadrature tolerances must be positive");
  const double base = cfg.y_base ? *cfg.y_base : default_base_point(cfg);
  if (base < cfg.y_min || base > cfg.y_max)
    throw ConfigError("base point " + num(base) + " outside the domain [" + num(cfg.y_min) + ", " + num(cfg.y_max) + "]");
  if (base != 0.0 && cfg.y_min < 0.0 && cfg.y_max > 0.0)
    throw ConfigError("domain straddles y = 0 but the base point is not 0");
  cfg_.y_base = base;

  c_ = cfg.c;
  C2_ = cfg.C2;
  C3_ = cfg.C3;
  y_base_ = base;
  lo_ = cfg.y_min;
  hi_ = cfg.y_max;
  tol_ = {static_cast<Real>(cfg.quad.abs), static_cast<Real>(cfg.quad.rel), cfg.quad.max_panels};

  std::vector<Real> ys;
  for (int i = 0; i <= kKnotIntervals; ++i) ys.push_back(lo_ + (hi_ - lo_) * Real(i) / Real(kKnotIntervals));
  ys.back() = hi_;
  ys.push_back(y_base_);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  knots_.resize(ys.size());
  const auto base_it = std::find(ys.begin(), ys.end(), y_base_);
  const std::size_t b = static_cast<std::size_t>(base_it - ys.begin());
  knots_[b] = {y_base_, 0, 0, 0, 0, 0, 0};

  // G(k1) = G(k0) + G'(k0) (k1 - k0) + int_{k0}^{k1} (k1 - s) 2 (c - a(s)) ds
  auto step = [&](const Knot& from, Real to) {
    auto f = [&](Real s) {
      const Real d = c_ - a_(s);
      return std::array<Real, 3>{s * d, 2 * (to - s) * d, 2 * d};
    };
    const auto q = integrate<Real, 3>(f, from.y, to, tol_);
    Knot k;
    k.y = to;
    k.h1 = from.h1 + q.value[0];
    k.g = from.g + from.gp * (to - from.y) + q.value[1];
    k.gp = from.gp + q.value[2];
    k.h1_err = from.h1_err + q.error[0];
    k.g_err = from.g_err + from.gp_err * std::abs(to - from.y) + q.error[1];
    k.gp_err = from.gp_err + q.error[2];
    return k;
  };
  for (std::size_t i = b + 1; i < ys.size(); ++i) knots_[i] = step(knots_[i - 1], ys[i]);
  for (std::size_t i = b; i-- > 0;) knots_[i] = step(knots_[i + 1], ys[i]);

  for (const Knot& k : knots_) {
    r_scale_ = std::max(r_scale_, std::abs(k.y * C2_ + k.g - 2 * C3_));
    rp_scale_ = std::max(rp_scale_, std::abs(C2_ + k.gp));
  }
  if (r_scale_ == 0) r_scale_ = 1;
  if (rp_scale_ == 0) rp_scale_ = 1;
}

template <class Real>
void BasicCascade<Real>::require_in_domain(Real y) const {
  if (!(y >= lo_ && y <= hi_))
    throw DomainError("y = " + num(static_cast<double>(y)) + " outside the cascade domain [" +
                      num(static_cast<double>(lo_)) + ", " + num(static_cast<double>(hi_)) + "]");
}

template <class Real>
typename BasicCascade<Real>::Local BasicCascade<Real>::local(Real y) const {
  require_in_domain(y);
  auto it = std::lower_bound(knots_.begin(), knots_.end(), y, [](const Knot& k, Real v) { return k.y < v; });
  if (it == knots_.end()) --it;
  if (it != knots_.begin() && std::abs(std::prev(it)->y - y) < std::abs(it->y - y)) --it;
  const Knot& k = *it;
  if (k.y == y) return {k.h1, k.g, k.gp, k.h1_err, k.g_err, k.gp_err};
  auto f = [&](Real s) {
    const Real d = c_ - a_(s);
    return std::array<Real, 3>{s * d, 2 * (y - s) * d, 2 * d};
  };
  const auto q = integrate<Real, 3>(f, k.y, y, tol_);
  return {k.h1 + q.value[0],
          k.g + k.gp * (y - k.y) + q.value[1],
          k.gp + q.value[2],
          k.h1_err + q.error[0],
          k.g_err + k.gp_err * std::abs(y - k.y) + q.error[1],
          k.gp_err + q.error[2]};
}

template <class Real>
Estimate<Real> BasicCascade<Real>::h1(Real y) const {
  const Local l = local(y);
  return {l.h1, l.h1_err};
}

template <class Real>
Estimate<Real> BasicCascade<Real>::h2(Real y) const {
  if (y == 0) {
    require_in_domain(y);
    if (y_base_ != 0) throw DomainError("H2 is singular at y = 0 for a nonzero base point");
    return {0, 0};
  }
  const Local l = local(y);
  return {l.g / (2 * y), l.g_err / (2 * std::abs(y))};
}

template <class Real>
std::pair<Real, Real> BasicCascade<Real>::g(Real y) const {
  const Local l = local(y);
  return {l.g, l.gp};
}

template <class Real>
Real BasicCascade<Real>::radicand(Real y) const {
  return y * C2_ + local(y).g - 2 * C3_;
}

template <class Real>
Real BasicCascade<Real>::radicand_derivative(Real y) const {
  return C2_ + local(y).gp;
}

template <class Real>
Real BasicCascade<Real>::radicand_second_derivative(Real y) const {
  require_in_domain(y);
  return 2 * (c_ - a_(y));
}

template <class Real>
Real BasicCascade<Real>::h2_nested(Real y) const {
  require_in_domain(y);
  if (y == y_base_) return 0;
  auto f = [&](Real s) { return h1(s).value / (s * s); };
  return integrate_scalar<Real>(f, y_base_, y, tol_).value[0];
}

template <class Real>
Estimate<Real> BasicCascade<Real>::h3(Real y_ref, Real y) const {
  require_in_domain(y_ref);
  require_in_domain(y);
  if (y == y_ref) return {0, 0};
  const Real lo = std::min(y_ref, y);
  const Real hi = std::max(y_ref, y);
  const Real root_tol = Real(1e-10) * r_scale_;

  // At a root endpoint e the radicand is taken as R'(e)(s - e) + int_e^s 2(s - t)(c - a(t)) dt,
  // which vanishes exactly at e.
  struct End {
    Real y;
    bool root;
    Real slope;
  };
  auto classify = [&](Real e) {
    const Real r = radicand(e);
    if (r < -root_tol)
      throw DomainError("radicand negative at H3 endpoint y = " + num(static_cast<double>(e)));
    const Real rp = radicand_derivative(e);
    if (r <= root_tol && std::abs(rp) <= Real(1e-6) * rp_scale_)
      throw DomainError("double root of the radicand at y = " + num(static_cast<double>(e)) +
                        ": H3 diverges (infinitely long tail)");
    return End{e, std::abs(r) <= 1024 * std::numeric_limits<Real>::epsilon() * r_scale_, rp};
  };
  const End ends[2] = {classify(lo), classify(hi)};
  const Real mid = (lo + hi) / 2;
  if (!(radicand(mid) > 0)) throw DomainError("radicand not positive inside the H3 interval");

  // s = e + side * w^2
  auto integrand = [&](const End& e, int side, Real w) {
    const Real d = side * w * w;
    const Real s = e.y + d;
    Real r;
    if (e.root) {
      if (w == 0) return 2 / std::sqrt(std::abs(e.slope));
      auto f = [&](Real t) { return 2 * (s - t) * (c_ - a_(t)); };
      r = e.slope * d + integrate_scalar<Real>(f, e.y, s, tol_).value[0];
    } else {
      r = radicand(s);
    }
    if (!(r > 0))
      throw DomainError("radicand not positive at y = " + num(static_cast<double>(s)) + " inside the H3 interval");
    return 2 * w / std::sqrt(r);
  };
  const auto left = integrate_scalar<Real>([&](Real w) { return integrand(ends[0], 1, w); }, Real(0),
                                           std::sqrt(mid - lo), tol_);
  const auto right = integrate_scalar<Real>([&](Real w) { return integrand(ends[1], -1, w); }, Real(0),
                                            std::sqrt(hi - mid), tol_);
  const Real total = left.value[0] + right.value[0];
  const Real err = left.error[0] + right.error[0];
  return {y > y_ref ? total : -total, err};
}

template class BasicCascade<double>;
template class BasicCascade<long double>;

GaugeShiftReport gauge_shift_check(const CascadeConfig& cfg, const CascadeConfig& other, std::size_t points,
                                   double tolerance) {
  const Cascade first(cfg);
  const Cascade second(other);
  GaugeShiftReport rep;
  rep.tolerance = tolerance;
  const double b2 = second.y_base();
  const double lo = std::max(first.y_min(), second.y_min());
  const double hi = std::min(first.y_max(), second.y_max());
  if (!(lo < hi) || b2 < first.y_min() || b2 > first.y_max()) return rep;

  const auto [g, gp] = first.g(b2);
  (void)g;
  rep.delta_C2 = -gp;
  rep.delta_C3 = -first.h1(b2).value;

  CascadeConfig shifted = cfg;
  shifted.C2 = cfg.C2 + rep.delta_C2;
  shifted.C3 = cfg.C3 + rep.delta_C3;
  shifted.y_base = first.y_base();
  const Cascade moved(shifted);

  for (std::size_t i = 1; i <= points; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points + 1);
    const double target = second.radicand(y);
    const double d = std::abs(moved.radicand(y) - target) / std::max(1.0, std::abs(target));
    rep.max_residual = std::max(rep.max_residual, d);
  }
  rep.points = points;
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

}  // namespace gkdv
