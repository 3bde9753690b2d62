#include "gkdv/profile.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>
#include <cmath>
#include <cstdint>

namespace gkdv {

namespace {

constexpr double kRootTol = 1e-12;   // |R| at a polished root, relative to the radicand scale
constexpr double kSlopeTol = 1e-6;   // |R'| below this (relative) is not a simple root
constexpr double kSwitch = 1e-2;     // RK hands over to the turning-point treatment below this
                                     // fraction of max R on the root's monotone segment

int sgn(double v) { return (v > 0) - (v < 0); }

double polish(const std::function<double(double)>& g, double a, double b) {
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

// y(d) = y* + (R'/4) d^2 + (R'' R'/96) d^4 about a simple root, d = z - z*.
struct LocalModel {
  double y_star, a2, a4;

  double at(double d) const {
    const double d2 = d * d;
    return y_star + a2 * d2 + a4 * d2 * d2;
  }
  double slope(double d) const { return 2 * a2 * d + 4 * a4 * d * d * d; }

  // d >= 0 with at(d) = y
  double time_to(double y) const {
    const double dy = y - y_star;
    if (dy * a2 <= 0) return 0.0;
    const double disc = std::sqrt(std::max(0.0, a2 * a2 + 4 * a4 * dy));
    const double x = 2 * dy / (a2 + std::copysign(disc, a2));
    return std::sqrt(std::max(x, 0.0));
  }
};

LocalModel model_at(const Cascade& f, double y_star) {
  const double r1 = f.radicand_derivative(y_star);
  const double r2 = f.radicand_second_derivative(y_star);
  return {y_star, r1 / 4, r1 * r2 / 96};
}

struct Sample {
  double y;
  int branch;
};

class Marcher {
 public:
  Marcher(const Cascade& f, const std::vector<TurningPoint>& tps, const ProfileOptions& opt)
      : f_(f), tps_(tps), opt_(opt) {
    for (const TurningPoint& t : tps_) levels_.push_back(t.kind == RootKind::simple ? switch_level(t) : 0.0);
  }

  // Samples at the given ascending offsets w >= 0 from the start.
  std::vector<Sample> run(double y0, int s, const std::vector<double>& offsets, std::vector<double>& turns) {
    out_.assign(offsets.size(), {y0, 0});
    offsets_ = &offsets;
    k_ = 0;
    const double scale = f_.radicand_scale();
    const double r0 = f_.radicand(y0);
    if (r0 < -kRootTol * scale)
      throw DomainError("radicand negative at the starting point y = " + std::to_string(y0));

    double w = 0.0;
    double y = y0;
    if (std::abs(r0) <= kRootTol * scale) {
      const double r1 = f_.radicand_derivative(y0);
      if (std::abs(r1) <= kSlopeTol * f_.radicand_slope_scale()) return out_;  // equilibrium
      const LocalModel m = model_at(f_, y0);
      const TurningPoint* at = nearest(y0);
      const double level = at ? levels_[static_cast<std::size_t>(at - tps_.data())] : kSwitch * scale;
      const double y_exit = y0 + sgn(r1) * level / std::abs(r1);
      const double T = std::abs(f_.h3(y0, y_exit).value);
      emit_turn(m, y_exit, 0.0, T);
      turns.push_back(0.0);
      w = T;
      y = y_exit;
      s = sgn(r1);
    } else if (const TurningPoint* t = target(y0, s); t && t->kind == RootKind::simple && r0 <= level_of(*t)) {
      const double T = turn(*t, 0.0, y0);
      turns.push_back(T);
      w = 2 * T;
      s = -s;
    }

    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 1>;
    ode::runge_kutta_dopri5<State> stepper;
    int branch = s;
    bool clamped = false;  // a stage reached R <= 0: the step ran past a root
    auto rhs = [&](const State& x, State& dx, double) {
      const double r = f_.radicand(x[0]);
      if (r <= 0) clamped = true;
      dx[0] = branch * std::sqrt(std::max(r, 0.0));
    };

    double h = 1e-3;
    const std::size_t n = offsets.size();
    while (true) {
      emit_until(w, y, s);
      if (k_ == n) break;
      const double step = std::min(h, offsets[k_] - w);
      if (step <= 1e-14 * (1 + std::abs(w)))
        throw NumericalError("profile step size underflow at offset " + std::to_string(w));

      branch = s;
      clamped = false;
      State in{y}, outs{}, err{};
      try {
        stepper.do_step(rhs, in, w, outs, step, err);
      } catch (const DomainError&) {
        h = step / 2;
        if (h <= 1e-12 * (1 + std::abs(w)))
          throw DomainError("profile reaches the edge of the cascade domain near y = " + std::to_string(y));
        continue;
      }
      const double y_new = outs[0];
      const TurningPoint* t = target(y, s);
      const bool passed = t && s * (y_new - t->y) >= 0;

      if (t && t->kind == RootKind::simple &&
          (passed || clamped || f_.radicand(y_new) <= level_of(*t))) {
        // the step would enter the switch band: time the turn exactly from here
        const double T = turn(*t, w, y);
        turns.push_back(w + T);
        w += 2 * T;
        s = -s;
        continue;
      }
      if (passed) {
        h = step / 2;
        continue;
      }
      const double errnorm =
          std::abs(err[0]) / (opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y), std::abs(y_new)));
      const double factor = errnorm == 0 ? 5.0 : std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
      if (errnorm > 1) {
        h = step * factor;
        continue;
      }
      w += step;
      y = y_new;
      h = step < h ? std::max(h, step * factor) : step * factor;
    }
    return out_;
  }

 private:
  // kSwitch times the largest R between t and the next root (or domain edge) on its positive side
  double switch_level(const TurningPoint& t) const {
    const int side = t.slope < 0 ? -1 : 1;
    double end = side < 0 ? f_.y_min() : f_.y_max();
    for (const TurningPoint& u : tps_)
      if (side * (u.y - t.y) > 0 && side * (u.y - end) < 0) end = u.y;
    double top = 0;
    for (int i = 1; i < 64; ++i) top = std::max(top, f_.radicand(t.y + (end - t.y) * i / 64.0));
    return kSwitch * top;
  }

  double level_of(const TurningPoint& t) const { return levels_[static_cast<std::size_t>(&t - tps_.data())]; }

  const TurningPoint* nearest(double y) const {
    const TurningPoint* best = nullptr;
    for (const TurningPoint& t : tps_)
      if (t.kind == RootKind::simple && std::abs(t.y - y) <= 1e-9 * (1 + std::abs(y)) &&
          (!best || std::abs(t.y - y) < std::abs(best->y - y)))
        best = &t;
    return best;
  }

  // nearest root strictly ahead of y in direction s
  const TurningPoint* target(double y, int s) const {
    const TurningPoint* best = nullptr;
    for (const TurningPoint& t : tps_) {
      if (s < 0 && t.y < y && (!best || t.y > best->y)) best = &t;
      if (s > 0 && t.y > y && (!best || t.y < best->y)) best = &t;
    }
    return best;
  }

  // Turn about the simple root t entered at (w, y). The transit time to the
  // root is |H3(y, y*)|; samples on both sides follow by symmetry. Returns it.
  double turn(const TurningPoint& t, double w, double y) {
    const LocalModel m = model_at(f_, t.y);
    const double T = std::abs(f_.h3(y, t.y).value);
    emit_model_or_h3(m, y, w + T, w + 2 * T);
    return T;
  }

  void emit_turn(const LocalModel& m, double y_far, double w_star, double w_end) {
    emit_model_or_h3(m, y_far, w_star, w_end);
  }

  // samples at offsets up to w_end of the even solution about w_star,
  // between the root m.y_star and y_far
  void emit_model_or_h3(const LocalModel& m, double y_far, double w_star, double w_end) {
    const auto& off = *offsets_;
    const double band = 2 * std::sqrt(opt_.guard * f_.radicand_scale()) / std::abs(4 * m.a2);
    const int side = sgn(y_far - m.y_star);
    while (k_ < off.size() && off[k_] <= w_end + 1e-12 * (1 + std::abs(w_end))) {
      const double d = off[k_] - w_star;
      const double ad = std::abs(d);
      double yv;
      if (ad <= band)
        yv = m.at(ad);
      else
        yv = invert_h3(f_, m.y_star, 0.0, side, ad, y_far, std::clamp(m.at(ad), std::min(m.y_star, y_far), std::max(m.y_star, y_far)));
      out_[k_++] = {yv, d == 0 ? 0 : sgn(m.slope(d))};
    }
  }

  void emit_until(double w, double y, int s) {
    const auto& off = *offsets_;
    while (k_ < off.size() && off[k_] <= w + 1e-12 * (1 + std::abs(w))) out_[k_++] = {y, s};
  }

  const Cascade& f_;
  const std::vector<TurningPoint>& tps_;
  const ProfileOptions& opt_;
  std::vector<Sample> out_;
  const std::vector<double>* offsets_ = nullptr;
  std::size_t k_ = 0;
  std::vector<double> levels_;
};

}  // namespace

std::string to_string(RootKind k) {
  switch (k) {
    case RootKind::simple:
      return "simple";
    case RootKind::double_root:
      return "double";
    case RootKind::higher:
      return "higher";
  }
  return "unknown";
}

std::vector<TurningPoint> find_turning_points(const Cascade& f, double lo, double hi, int samples) {
  if (!(lo < hi)) throw ConfigError("turning-point interval must satisfy lo < hi");
  samples = std::max(samples, 8);
  const double scale = f.radicand_scale();
  const double root_tol = kRootTol * scale;
  const double slope_tol = kSlopeTol * f.radicand_slope_scale();
  auto R = [&](double y) { return f.radicand(y); };
  auto Rp = [&](double y) { return f.radicand_derivative(y); };

  std::vector<double> ys(static_cast<std::size_t>(samples) + 1), rs(ys.size()), rps(ys.size());
  double curv_scale = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    ys[i] = i + 1 == ys.size() ? hi : lo + (hi - lo) * static_cast<double>(i) / samples;
    rs[i] = R(ys[i]);
    rps[i] = Rp(ys[i]);
    curv_scale = std::max(curv_scale, std::abs(f.radicand_second_derivative(ys[i])));
  }

  std::vector<TurningPoint> found;
  auto classify = [&](double y) {
    const double r1 = Rp(y);
    if (std::abs(r1) > slope_tol) return TurningPoint{y, RootKind::simple, r1};
    const double r2 = f.radicand_second_derivative(y);
    return TurningPoint{y, std::abs(r2) > kSlopeTol * std::max(curv_scale, 1e-300) ? RootKind::double_root : RootKind::higher, r1};
  };

  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (std::abs(rs[i]) <= root_tol) found.push_back(classify(ys[i]));
    if (i + 1 == ys.size()) break;
    if (std::abs(rs[i]) > root_tol && std::abs(rs[i + 1]) > root_tol && rs[i] * rs[i + 1] < 0)
      found.push_back(classify(polish(R, ys[i], ys[i + 1])));
    if (rps[i] * rps[i + 1] < 0) {
      const double ym = polish(Rp, ys[i], ys[i + 1]);
      if (std::abs(R(ym)) <= 1e-10 * scale) found.push_back(classify(ym));
    }
  }

  std::sort(found.begin(), found.end(), [](const TurningPoint& a, const TurningPoint& b) { return a.y < b.y; });
  std::vector<TurningPoint> merged;
  for (const TurningPoint& t : found) {
    if (!merged.empty() && std::abs(t.y - merged.back().y) <= 1e-9 * (1 + std::abs(t.y))) {
      if (t.kind != RootKind::simple) merged.back() = t;
      continue;
    }
    merged.push_back(t);
  }
  return merged;
}

std::vector<TurningPoint> find_turning_points(const Cascade& f) {
  return find_turning_points(f, f.y_min(), f.y_max());
}

int default_sign(const Cascade& f, double y_start) {
  for (const TurningPoint& t : find_turning_points(f))
    if (t.y > y_start) return t.is_maximum() ? -1 : 1;
  return 1;
}

std::optional<double> default_start(const Cascade& f) {
  const auto tps = find_turning_points(f);
  for (auto it = tps.rbegin(); it != tps.rend(); ++it)
    if (it->is_maximum()) return it->y;
  for (const TurningPoint& t : tps)
    if (t.kind == RootKind::simple) return t.y;
  return std::nullopt;
}

WaveProfile integrate_profile(const Cascade& f, const ProfileOptions& opt, double y_start, int sign_start) {
  if (!(opt.z_min < opt.z_max) || opt.points < 2) throw ConfigError("profile grid needs z_min < z_max and >= 2 points");
  if (opt.z_start < opt.z_min || opt.z_start > opt.z_max) throw ConfigError("z_start outside [z_min, z_max]");
  if (!(opt.abs_tol > 0 && opt.rel_tol > 0 && opt.guard > 0)) throw ConfigError("profile tolerances must be positive");
  if (sign_start != 1 && sign_start != -1) throw ConfigError("sign_start must be +1 or -1");

  WaveProfile p;
  p.meta = {f.c(), opt.C1, f.C2(), f.C3(), f.config().a.source(), f.config().params};
  const std::size_t n = opt.points;
  p.z.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    p.z[i] = i + 1 == n ? opt.z_max : opt.z_min + (opt.z_max - opt.z_min) * static_cast<double>(i) / static_cast<double>(n - 1);

  std::vector<double> fwd, bwd;
  std::size_t split = 0;
  while (split < n && p.z[split] < opt.z_start) ++split;
  for (std::size_t i = split; i < n; ++i) fwd.push_back(p.z[i] - opt.z_start);
  for (std::size_t i = split; i-- > 0;) bwd.push_back(opt.z_start - p.z[i]);

  const auto tps = find_turning_points(f);
  Marcher marcher(f, tps, opt);
  std::vector<double> turns_f, turns_b;
  const auto ahead = marcher.run(y_start, sign_start, fwd, turns_f);
  const auto behind = marcher.run(y_start, -sign_start, bwd, turns_b);

  p.y.resize(n);
  p.branch.resize(n);
  for (std::size_t j = 0; j < ahead.size(); ++j) {
    p.y[split + j] = ahead[j].y;
    p.branch[split + j] = ahead[j].branch;
  }
  for (std::size_t j = 0; j < behind.size(); ++j) {
    p.y[split - 1 - j] = behind[j].y;
    p.branch[split - 1 - j] = -behind[j].branch;
  }
  for (double w : turns_b)
    if (w > 0) p.turning_z.push_back(opt.z_start - w);
  for (double w : turns_f) p.turning_z.push_back(opt.z_start + w);
  std::sort(p.turning_z.begin(), p.turning_z.end());
  p.turning_z.erase(std::remove_if(p.turning_z.begin(), p.turning_z.end(),
                                   [&](double z) { return z < opt.z_min || z > opt.z_max; }),
                    p.turning_z.end());
  prolong(p, f);
  return p;
}

void prolong(WaveProfile& p, const Cascade& f) {
  const std::size_t n = p.y.size();
  if (p.branch.size() != n) throw ConfigError("profile branch signs missing");
  p.y1.resize(n);
  p.y2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = p.y[i];
    if (y == 0.0) throw DomainError("y = 0 at z = " + std::to_string(p.z[i]) + ": y2 is undefined");
    p.y1[i] = p.branch[i] == 0 ? 0.0 : p.branch[i] * std::sqrt(std::max(f.radicand(y), 0.0));
    p.y2[i] = (p.y1[i] * p.y1[i] + 2 * f.h1(y).value + 2 * f.C3()) / (2 * y);
  }
}

double invert_h3(const Cascade& f, double y_ref, double z_ref, int sign, double z, double y_end,
                 std::optional<double> guess) {
  const double target = z - z_ref;
  if (target == 0.0) return y_ref;
  auto F = [&](double y) { return sign * f.h3(y_ref, y).value - target; };
  // p keeps the sign of F(y_ref), q the opposite one
  double p = y_ref, q = y_end;
  const int s0 = sgn(-target);
  double y = guess.value_or(0.5 * (y_ref + y_end));
  for (int it = 0; it < 100; ++it) {
    if (!((y - p) * (y - q) < 0)) y = 0.5 * (p + q);
    double Fy;
    try {
      Fy = F(y);
    } catch (const DomainError&) {
      q = y;  // at the far root: treat as beyond the solution
      y = 0.5 * (p + q);
      continue;
    }
    if (Fy == 0) return y;
    if (sgn(Fy) == s0)
      p = y;
    else
      q = y;
    const double dF = sign / std::sqrt(std::max(f.radicand(y), 1e-300));
    double next = y - Fy / dF;
    if (!((next - p) * (next - q) < 0)) next = 0.5 * (p + q);
    if (std::abs(next - y) <= 1e-15 * (1 + std::abs(y)) || std::abs(p - q) <= 1e-15 * (1 + std::abs(y)))
      return next;
    y = next;
  }
  throw NumericalError("H3 inversion did not converge");
}

ProfileInterpolant::ProfileInterpolant(const WaveProfile& p) : z_(p.z), y_(p.y), m_(p.y1) {
  if (z_.size() < 2 || y_.size() != z_.size() || m_.size() != z_.size())
    throw ConfigError("interpolation needs a prolonged profile with at least two samples");
}

double ProfileInterpolant::operator()(double z) const {
  if (!(z >= z_.front() && z <= z_.back()))
    throw DomainError("z = " + std::to_string(z) + " outside the profile range");
  std::size_t i = static_cast<std::size_t>(std::upper_bound(z_.begin(), z_.end(), z) - z_.begin());
  i = std::clamp<std::size_t>(i, 1, z_.size() - 1) - 1;
  const double h = z_[i + 1] - z_[i];
  const double t = (z - z_[i]) / h;
  const double secant = (y_[i + 1] - y_[i]) / h;
  double m0 = m_[i], m1 = m_[i + 1];
  if (secant != 0 && sgn(m0) == sgn(secant) && sgn(m1) == sgn(secant)) {
    const double a = m0 / secant, b = m1 / secant;
    const double r = a * a + b * b;
    if (r > 9) {
      const double tau = 3 / std::sqrt(r);
      m0 *= tau;
      m1 *= tau;
    }
  }
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y_[i + 1] +
         (t3 - t2) * h * m1;
}

double to_travelling_wave(const ProfileInterpolant& F, double c, double C1, double x, double t) {
  return F(x - c * t - C1);
}

std::vector<double> to_travelling_wave(const WaveProfile& p, double C1, const std::vector<double>& x, double t) {
  const ProfileInterpolant F(p);
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = to_travelling_wave(F, p.meta.c, C1, x[i], t);
  return u;
}

}  // namespace gkdv
