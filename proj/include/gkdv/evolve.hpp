#pragma once

// Periodic pseudo-spectral evolution of u_t + u_xxx + a(u) u_x = 0 with an
// integrating-factor RK4 scheme: the dispersive term is applied exactly in
// Fourier space, a(u) u_x is evaluated on the grid with 2/3-rule dealiasing.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gkdv/catalog.hpp"
#include "gkdv/expr.hpp"
#include "gkdv/profile.hpp"

namespace gkdv {

struct SpectralGrid {
  std::size_t N = 1024;
  double L = 80.0;

  /// Throws ConfigError unless N is a power of two >= 64 and L > 0.
  void validate() const;
  double dx() const { return L / static_cast<double>(N); }
  double x(std::size_t j) const { return -L / 2 + static_cast<double>(j) * dx(); }
  std::vector<double> points() const;
};

struct FieldState {
  double t = 0.0;
  std::vector<double> u;
};

struct EvolveResult {
  FieldState state;
  std::vector<FieldState> snapshots;  // includes the initial state when snapshots are requested
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<std::string> warnings;
};

/// 0.2 dx / max(1, max |a(u0)|).
double default_time_step(const SpectralGrid& g, const Nonlinearity& a, const std::vector<double>& u0);

/// Advances u0 to time u0.t + T in ceil(T / dt) equal steps. dt <= 0 selects
/// default_time_step. snapshot_every = k > 0 keeps every k-th step and the
/// final state. Throws NumericalError with the blow-up time on non-finite values.
EvolveResult evolve_gkdv(const FieldState& u0, const Nonlinearity& a, const SpectralGrid& g, double dt, double T,
                         std::size_t snapshot_every = 0);

/// Trapezoidal integral of u over one period.
double mass(const SpectralGrid& g, const std::vector<double>& u);

/// Location of the maximum of u, refined by a parabola through the three
/// largest neighbouring samples.
double peak_position(const SpectralGrid& g, const std::vector<double>& u);

struct ShapeError {
  double raw = 0.0;      // L-infinity distance to the reference shifted by c t + C1
  double aligned = 0.0;  // same after matching the peaks
  double phase = 0.0;    // peak offset removed by the alignment
};

/// Reference F(xi), xi = x - c t - C1 wrapped into [-L/2, L/2).
ShapeError shape_error(const SpectralGrid& g, const FieldState& s, const std::function<double(double)>& F, double c,
                       double C1);
ShapeError shape_error(const SpectralGrid& g, const FieldState& s, const CatalogEntry& e, double c, double C1,
                       const ParamBindings& params);
ShapeError shape_error(const SpectralGrid& g, const FieldState& s, const ProfileInterpolant& F, double c, double C1);

/// Samples F(x - C1) on the grid at t = 0.
FieldState initial_state(const SpectralGrid& g, const std::function<double(double)>& F, double C1 = 0.0);

}  // namespace gkdv
