#include "gkdv/evolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include <fmt/format.h>

namespace gkdv {

void SpectralGrid::validate() const {
  if (N < 64 || (N & (N - 1)) != 0) throw ConfigError(fmt::format("N = {} must be a power of two >= 64", N));
  if (!(L > 0) || !std::isfinite(L)) throw ConfigError("period L must be positive");
}

std::vector<double> SpectralGrid::points() const {
  std::vector<double> xs(N);
  for (std::size_t j = 0; j < N; ++j) xs[j] = x(j);
  return xs;
}

double default_time_step(const SpectralGrid& g, const Nonlinearity& a, const std::vector<double>& u0) {
  double amax = 1.0;
  for (double v : u0) amax = std::max(amax, std::abs(a(v)));
  return 0.2 * g.dx() / amax;
}

namespace {

using cplx = std::complex<double>;

bool finite(const std::vector<double>& u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Real-to-complex transforms of length N with FFTW_ESTIMATE plans, so the
// same input always takes the same code path.
class Transform {
 public:
  explicit Transform(std::size_t n)
      : n_(n),
        real_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        spec_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    const int ni = static_cast<int>(n);
    forward_ = fftw_plan_dft_r2c_1d(ni, real_.get(), spec_.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(ni, spec_.get(), real_.get(), FFTW_ESTIMATE);
  }
  ~Transform() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  void forward(const std::vector<double>& in, std::vector<cplx>& out) {
    std::copy(in.begin(), in.end(), real_.get());
    fftw_execute(forward_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_.get()[k][0], spec_.get()[k][1]};
  }

  // normalised inverse
  void backward(const std::vector<cplx>& in, std::vector<double>& out) {
    for (std::size_t k = 0; k < in.size(); ++k) {
      spec_.get()[k][0] = in[k].real();
      spec_.get()[k][1] = in[k].imag();
    }
    fftw_execute(backward_);
    out.resize(n_);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = real_.get()[j] * s;
  }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> real_;
  std::unique_ptr<fftw_complex, FftwFree> spec_;
  fftw_plan forward_;
  fftw_plan backward_;
};

class Stepper {
 public:
  Stepper(const Nonlinearity& a, const SpectralGrid& g, double dt) : a_(a), fft_(g.N), dt_(dt) {
    const std::size_t m = g.N / 2 + 1;
    ik_.resize(m);
    e_.resize(m);
    e2_.resize(m);
    mask_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double kk = 2 * std::numbers::pi * static_cast<double>(k) / g.L;
      ik_[k] = k == g.N / 2 ? cplx(0) : cplx(0, kk);
      e_[k] = std::exp(cplx(0, kk * kk * kk * dt / 2));
      e2_[k] = e_[k] * e_[k];
      mask_[k] = 3 * k < g.N ? 1.0 : 0.0;  // 2/3 rule
    }
  }

  // dt * (-a(u) u_x), dealiased
  void nonlinear(const std::vector<cplx>& v, std::vector<cplx>& out) {
    tmp_.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) tmp_[k] = ik_[k] * v[k];
    fft_.backward(tmp_, ux_);
    fft_.backward(v, u_);
    if (!finite(u_)) throw NumericalError("non-finite field");
    prod_.resize(u_.size());
    for (std::size_t j = 0; j < u_.size(); ++j) prod_[j] = -a_(u_[j]) * ux_[j];
    fft_.forward(prod_, out);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] *= dt_ * mask_[k];
  }

  void step(std::vector<cplx>& v) {
    const std::size_t m = v.size();
    nonlinear(v, A_);
    for (std::size_t k = 0; k < m; ++k) w_[k] = e_[k] * (v[k] + A_[k] / 2.0);
    nonlinear(w_, B_);
    for (std::size_t k = 0; k < m; ++k) w_[k] = e_[k] * v[k] + B_[k] / 2.0;
    nonlinear(w_, C_);
    for (std::size_t k = 0; k < m; ++k) w_[k] = e2_[k] * v[k] + e_[k] * C_[k];
    nonlinear(w_, D_);
    for (std::size_t k = 0; k < m; ++k)
      v[k] = e2_[k] * v[k] + (e2_[k] * A_[k] + 2.0 * e_[k] * (B_[k] + C_[k]) + D_[k]) / 6.0;
  }

  void prepare(std::size_t m) { w_.resize(m); }
  Transform& fft() { return fft_; }

 private:
  const Nonlinearity& a_;
  Transform fft_;
  double dt_;
  std::vector<cplx> ik_, e_, e2_, A_, B_, C_, D_, w_, tmp_;
  std::vector<double> mask_, u_, ux_, prod_;
};

}  // namespace

EvolveResult evolve_gkdv(const FieldState& u0, const Nonlinearity& a, const SpectralGrid& g, double dt, double T,
                         std::size_t snapshot_every) {
  g.validate();
  if (u0.u.size() != g.N) throw ConfigError(fmt::format("initial state has {} samples, grid has {}", u0.u.size(), g.N));
  if (!(T >= 0) || !std::isfinite(T)) throw ConfigError("T must be finite and >= 0");
  if (!finite(u0.u)) throw NumericalError("initial state is not finite");

  EvolveResult res;
  const double tail = std::max(std::abs(u0.u.front()), std::abs(u0.u.back()));
  if (tail > 1e-10)
    res.warnings.push_back(fmt::format("initial state is {:.3g} at the boundary; periodic images interact", tail));

  if (!(dt > 0)) dt = default_time_step(g, a, u0.u);
  const std::size_t steps = T == 0 ? 0 : static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  if (steps > 0) dt = T / static_cast<double>(steps);
  res.dt = dt;
  res.steps = steps;

  Stepper st(a, g, dt);
  std::vector<cplx> v;
  st.fft().forward(u0.u, v);
  st.prepare(v.size());
  if (snapshot_every > 0) res.snapshots.push_back(u0);

  std::vector<double> u = u0.u;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t = u0.t + static_cast<double>(n) * dt;
    try {
      st.step(v);
    } catch (const NumericalError&) {
      throw NumericalError(fmt::format("solution blew up before t = {}", t));
    }
    const bool keep = snapshot_every > 0 && (n % snapshot_every == 0 || n == steps);
    if (keep || n == steps || n % 64 == 0) {
      st.fft().backward(v, u);
      if (!finite(u)) throw NumericalError(fmt::format("solution blew up before t = {}", t));
      if (keep) res.snapshots.push_back({t, u});
    }
  }
  if (steps == 0) u = u0.u;
  res.state = {u0.t + static_cast<double>(steps) * dt, u};
  return res;
}

double mass(const SpectralGrid& g, const std::vector<double>& u) {
  double s = 0;
  for (double v : u) s += v;
  return s * g.dx();
}

double peak_position(const SpectralGrid& g, const std::vector<double>& u) {
  const std::size_t n = u.size();
  if (n < 3) throw ConfigError("peak_position needs at least 3 samples");
  const std::size_t j = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
  const double um = u[(j + n - 1) % n], u0 = u[j], up = u[(j + 1) % n];
  const double den = um - 2 * u0 + up;
  const double off = den == 0 ? 0.0 : 0.5 * (um - up) / den;
  return g.x(j) + off * g.dx();
}

namespace {

double wrap(double xi, double L) {
  double r = std::fmod(xi + L / 2, L);
  if (r < 0) r += L;
  return r - L / 2;
}

}  // namespace

ShapeError shape_error(const SpectralGrid& g, const FieldState& s, const std::function<double(double)>& F, double c,
                       double C1) {
  g.validate();
  if (s.u.size() != g.N) throw ConfigError("state and grid sizes differ");
  const double shift = c * s.t + C1;
  std::vector<double> ref(g.N);
  for (std::size_t j = 0; j < g.N; ++j) ref[j] = F(wrap(g.x(j) - shift, g.L));
  ShapeError e;
  for (std::size_t j = 0; j < g.N; ++j) e.raw = std::max(e.raw, std::abs(s.u[j] - ref[j]));
  e.phase = wrap(peak_position(g, s.u) - peak_position(g, ref), g.L);
  for (std::size_t j = 0; j < g.N; ++j)
    e.aligned = std::max(e.aligned, std::abs(s.u[j] - F(wrap(g.x(j) - shift - e.phase, g.L))));
  return e;
}

ShapeError shape_error(const SpectralGrid& g, const FieldState& s, const CatalogEntry& e, double c, double C1,
                       const ParamBindings& params) {
  return shape_error(g, s, [&](double xi) { return eval_entry<double>(e, xi, 0.0, c, 0.0, params); }, c, C1);
}

ShapeError shape_error(const SpectralGrid& g, const FieldState& s, const ProfileInterpolant& F, double c, double C1) {
  return shape_error(g, s, [&](double xi) { return F(xi); }, c, C1);
}

FieldState initial_state(const SpectralGrid& g, const std::function<double(double)>& F, double C1) {
  g.validate();
  FieldState s;
  s.u.resize(g.N);
  for (std::size_t j = 0; j < g.N; ++j) s.u[j] = F(g.x(j) - C1);
  return s;
}

}  // namespace gkdv
