#pragma once

// Travelling-wave profiles y(z) from the final Pfaffian equation
// dy = +/- sqrt(R(y)) dz, with branch switching at simple roots of R.

#include <optional>
#include <string>
#include <vector>

#include "gkdv/cascade.hpp"

namespace gkdv {

enum class RootKind { simple, double_root, higher };

std::string to_string(RootKind k);

struct TurningPoint {
  double y;
  RootKind kind;
  double slope;  // R'(y)
  /// R decreases through a simple root: y is a local maximum of the profile.
  bool is_maximum() const { return kind == RootKind::simple && slope < 0; }
};

/// Roots of R on [lo, hi], sorted. Sign changes are polished to
/// |R| <= 1e-12 * scale; tangential roots are found through sign changes of R'.
std::vector<TurningPoint> find_turning_points(const Cascade& f, double lo, double hi, int samples = 512);
std::vector<TurningPoint> find_turning_points(const Cascade& f);

struct ProfileMeta {
  double c = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  std::string a_source;
  ParamBindings params;
};

struct WaveProfile {
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> y1;
  std::vector<double> y2;
  std::vector<int> branch;        // sign of dy/dz; 0 exactly at a turning point
  std::vector<double> turning_z;  // locations of the simple turning points crossed
  ProfileMeta meta;

  std::size_t size() const { return z.size(); }
};

struct ProfileOptions {
  double z_min = -10.0;
  double z_max = 10.0;
  std::size_t points = 2001;
  double z_start = 0.0;
  double C1 = 0.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double guard = 1e-8;  // local model used where |R| < guard * radicand_scale
};

/// Profile started at y(z_start) = y_start on the branch sign_start.
/// A start on a simple root ignores sign_start; a start on a double root
/// gives the constant profile. Throws DomainError if R(y_start) < 0 or the
/// solution leaves the cascade domain, NumericalError on step-size underflow.
WaveProfile integrate_profile(const Cascade& f, const ProfileOptions& opt, double y_start, int sign_start);

/// Default branch: negative when the R > 0 component containing y_start is
/// bounded above by a maximum-type turning point, positive otherwise.
int default_sign(const Cascade& f, double y_start);

/// Default start: the largest maximum-type simple root, else the smallest
/// minimum-type simple root.
std::optional<double> default_start(const Cascade& f);

/// Fills y1 = branch * sqrt(R(y)) and y2 = (y1^2 + 2 H1(y) + 2 C3) / (2 y).
/// Throws DomainError if y = 0 at a sample.
void prolong(WaveProfile& p, const Cascade& f);

/// Solves sign * H3(y_ref, y) = z - z_ref for y between y_ref and y_end
/// (one monotone segment). Newton steps safeguarded by bisection.
double invert_h3(const Cascade& f, double y_ref, double z_ref, int sign, double z, double y_end,
                 std::optional<double> guess = std::nullopt);

/// Piecewise cubic Hermite interpolant through (z, y, y1), with the
/// Fritsch-Carlson limiter on monotone intervals.
class ProfileInterpolant {
 public:
  explicit ProfileInterpolant(const WaveProfile& p);
  /// Throws DomainError outside [z.front(), z.back()].
  double operator()(double z) const;
  double z_min() const { return z_.front(); }
  double z_max() const { return z_.back(); }

 private:
  std::vector<double> z_, y_, m_;
};

/// u(x, t) = y(x - c t - C1).
double to_travelling_wave(const ProfileInterpolant& F, double c, double C1, double x, double t);
std::vector<double> to_travelling_wave(const WaveProfile& p, double C1, const std::vector<double>& x, double t);

}  // namespace gkdv
