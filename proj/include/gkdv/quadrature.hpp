#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for small vector-valued
// integrands. Panels use the Boost node tables; the subdivision loop is ours
// so that absolute and relative tolerances can be combined per component.

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "gkdv/errors.hpp"

namespace gkdv {

template <class Real>
struct QuadTolerance {
  Real abs = Real(1e-12);
  Real rel = Real(1e-10);
  int max_panels = 2000;
};

template <class Real, std::size_t N>
struct QuadResult {
  std::array<Real, N> value{};
  std::array<Real, N> error{};
  std::size_t evaluations = 0;
};

namespace detail {

template <class Real, std::size_t N>
struct Panel {
  Real a, b;
  std::array<Real, N> value, error;
  Real priority;
  bool operator<(const Panel& o) const { return priority < o.priority; }
};

template <class Real, std::size_t N, class F>
Panel<Real, N> gk15_panel(F& f, Real a, Real b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& x = gauss_kronrod<Real, 15>::abscissa();
  const auto& wk = gauss_kronrod<Real, 15>::weights();
  const auto& wg = gauss<Real, 7>::weights();
  const Real mid = (a + b) / 2;
  const Real half = (b - a) / 2;

  std::array<Real, N> kron{}, gaus{};
  const std::array<Real, N> f0 = f(mid);
  for (std::size_t k = 0; k < N; ++k) {
    kron[k] = wk[0] * f0[k];
    gaus[k] = wg[0] * f0[k];
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    const std::array<Real, N> fl = f(mid - half * x[i]);
    const std::array<Real, N> fr = f(mid + half * x[i]);
    for (std::size_t k = 0; k < N; ++k) {
      kron[k] += wk[i] * (fl[k] + fr[k]);
      if (i % 2 == 0) gaus[k] += wg[i / 2] * (fl[k] + fr[k]);
    }
  }
  Panel<Real, N> p{a, b, {}, {}, Real(0)};
  for (std::size_t k = 0; k < N; ++k) {
    p.value[k] = kron[k] * half;
    p.error[k] = std::abs((kron[k] - gaus[k]) * half);
  }
  return p;
}

}  // namespace detail

/// Integral of f over [a, b] (a > b allowed). f maps Real to std::array<Real, N>.
/// Throws NumericalError when the panel budget is exhausted above the roundoff floor.
template <class Real, std::size_t N, class F>
QuadResult<Real, N> integrate(F&& f, Real a, Real b, const QuadTolerance<Real>& tol = {}) {
  QuadResult<Real, N> out;
  if (a == b) return out;
  const bool flip = b < a;
  if (flip) std::swap(a, b);

  const Real eps = std::numeric_limits<Real>::epsilon();
  std::size_t evaluations = 0;
  auto panel = [&](Real lo, Real hi) {
    evaluations += 15;
    auto p = detail::gk15_panel<Real, N>(f, lo, hi);
    p.priority = Real(0);
    for (std::size_t k = 0; k < N; ++k) p.priority = std::max(p.priority, p.error[k]);
    return p;
  };

  std::priority_queue<detail::Panel<Real, N>> heap;
  heap.push(panel(a, b));
  std::array<Real, N> total = heap.top().value;
  std::array<Real, N> err = heap.top().error;

  auto converged = [&] {
    for (std::size_t k = 0; k < N; ++k) {
      const Real target = std::max(tol.abs, tol.rel * std::abs(total[k]));
      const Real floor = Real(50) * eps * std::abs(total[k]);
      if (err[k] > target && err[k] > floor) return false;
    }
    return true;
  };

  int panels = 1;
  while (!converged()) {
    auto worst = heap.top();
    const Real mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= Real(64) * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      break;  // cannot resolve further in this precision
    }
    if (panels >= tol.max_panels)
      throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(static_cast<double>(a)) +
                           ", " + std::to_string(static_cast<double>(b)) + "]");
    heap.pop();
    auto left = panel(worst.a, mid);
    auto right = panel(mid, worst.b);
    for (std::size_t k = 0; k < N; ++k) {
      total[k] += left.value[k] + right.value[k] - worst.value[k];
      err[k] += left.error[k] + right.error[k] - worst.error[k];
    }
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  // re-sum to avoid drift from the running updates
  out.value = {};
  out.error = {};
  while (!heap.empty()) {
    const auto& p = heap.top();
    for (std::size_t k = 0; k < N; ++k) {
      out.value[k] += p.value[k];
      out.error[k] += p.error[k];
    }
    heap.pop();
  }
  if (flip)
    for (auto& v : out.value) v = -v;
  out.evaluations = evaluations;
  return out;
}

/// Scalar convenience wrapper.
template <class Real, class F>
QuadResult<Real, 1> integrate_scalar(F&& f, Real a, Real b, const QuadTolerance<Real>& tol = {}) {
  return integrate<Real, 1>([&f](Real x) { return std::array<Real, 1>{f(x)}; }, a, b, tol);
}

}  // namespace gkdv
