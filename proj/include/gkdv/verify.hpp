#pragma once

// Independent checks: residuals of the travelling-wave ODE and the PDE,
// conserved quantities along integrated trajectories, and an aggregated
// report for one configuration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gkdv/cascade.hpp"
#include "gkdv/catalog.hpp"
#include "gkdv/geometry.hpp"
#include "gkdv/profile.hpp"

namespace gkdv {

struct VerificationReport {
  std::string id;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string sample;
};

/// max |-c y1 + y3 + a(y) y1| over interior points, with y3 from sixth-order
/// centred differences of y2. Needs a uniform grid of at least 9 points.
double ode_residual(const WaveProfile& p, const Nonlinearity& a, double c);
double ode_residual(const WaveProfile& p, const NonlinearityExpr& a, double c, const ParamBindings& params);

/// max |u_t + u_xxx + a(u) u_x| over the sample, derivatives by nested duals.
double pde_residual(const CatalogEntry& e, const std::vector<SamplePoint>& sample, double c, double C1,
                    const ParamBindings& params);

/// Same for a closed form outside the catalog.
template <class F>
double pde_residual(F&& u, const Nonlinearity& a, const std::vector<SamplePoint>& sample) {
  using D1 = Dual<double>;
  using D3 = Dual<Dual<Dual<double>>>;
  double worst = 0;
  for (const SamplePoint& s : sample) {
    const D3 vx = u(seed_variable<D3>(s.x), D3(s.t));
    const D1 vt = u(D1(s.x), seed_variable<D1>(s.t));
    const double r = vt.der + derivative<3>(vx) + a(derivative<0>(vx)) * derivative<1>(vx);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// A point of a trajectory of y3 = (c - a(y)) y1.
struct TrajectoryPoint {
  long double z;
  long double y;
  long double y1;
  long double y2;
};

struct TrajectoryOptions {
  long double abs_tol = 1e-18L;
  long double rel_tol = 1e-18L;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) in long double; every accepted step is recorded.
std::vector<TrajectoryPoint> integrate_jet(const Nonlinearity& a, double c, const TrajectoryPoint& start,
                                           long double z_end, const TrajectoryOptions& opt = {});

struct ConservedDrift {
  double drift_I3 = 0.0;
  double drift_I2 = 0.0;
  long double I3_initial = 0.0L;
  long double I2_initial = 0.0L;
  std::size_t points = 0;
};

/// I3 = y y2 - y1^2/2 - H1(y) and I2 = (y1^2 - 2 y H2(y) + 2 C3) / y with
/// C3 = I3(0). The cascade supplies H1, H2; its own C2, C3 are not used.
/// Throws DomainError if the trajectory reaches y = 0.
ConservedDrift conserved_drift(const std::vector<TrajectoryPoint>& traj, const CascadeLD& f);

/// Seeded jet points with y in [y_min, y_max], |y| >= y_floor and a(y) defined;
/// z, y1, y2 uniform in [-2, 2].
std::vector<JetPoint> sample_jet_points(const Nonlinearity& a, double y_min, double y_max, std::size_t count,
                                        std::uint64_t seed, double y_floor = 0.1);

struct VerifyConfig {
  std::string a_source = "6*u";
  ParamBindings params;
  double c = 1.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double y_min = -4.0;
  double y_max = 4.0;
  std::optional<double> y_base;
  std::size_t jet_points = 50;
  std::size_t grid_points = 1000;
  std::size_t pde_points = 200;
  double drift_length = 20.0;
  std::uint64_t seed = 1;
};

/// Every check for one configuration, in a fixed order. A nonlinearity that
/// does not parse or bind gives a single failing entry.
std::vector<VerificationReport> full_report(const VerifyConfig& cfg);

bool all_pass(const std::vector<VerificationReport>& reports);

}  // namespace gkdv
