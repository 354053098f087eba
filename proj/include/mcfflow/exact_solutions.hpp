#ifndef MCFFLOW_EXACT_SOLUTIONS_HPP
#define MCFFLOW_EXACT_SOLUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mcfflow/curvature.hpp"
#include "mcfflow/errors.hpp"
#include "mcfflow/numerics.hpp"
#include "mcfflow/support_profile.hpp"
#include "mcfflow/trajectory.hpp"

namespace mcfflow {

enum class FamilyKind { Sphere, Cylinder, GrimReaper, AngenentOval, SphericalCap, Equator };

inline std::string to_string(FamilyKind k) {
  switch (k) {
  case FamilyKind::Sphere: return "sphere";
  case FamilyKind::Cylinder: return "cylinder";
  case FamilyKind::GrimReaper: return "grim-reaper";
  case FamilyKind::AngenentOval: return "oval";
  case FamilyKind::SphericalCap: return "cap";
  case FamilyKind::Equator: return "equator";
  }
  return "unknown";
}

inline FamilyKind family_from_string(const std::string& s) {
  for (auto k : {FamilyKind::Sphere, FamilyKind::Cylinder, FamilyKind::GrimReaper,
                 FamilyKind::AngenentOval, FamilyKind::SphericalCap, FamilyKind::Equator})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown exact family '" + s + "'");
}

/// A closed-form ancient solution. `k` is the flat-factor count of a cylinder,
/// `ambient_radius` the radius R of the ambient sphere for caps and equators.
/// Every family is evaluated at t - time_offset.
struct ExactFamily {
  FamilyKind kind = FamilyKind::Sphere;
  int n = 1;
  int k = 0;
  double ambient_radius = 1.0;
  double time_offset = 0.0;

  void validate() const {
    require(n >= 1, "dimension n must be >= 1");
    if (kind == FamilyKind::Cylinder)
      require(k >= 1 && k <= n - 1, "cylinder needs 1 <= k <= n-1");
    if (kind == FamilyKind::GrimReaper || kind == FamilyKind::AngenentOval)
      require(n == 1, "grim reaper and Angenent oval are curves (n = 1)");
    if (kind == FamilyKind::SphericalCap || kind == FamilyKind::Equator)
      require(ambient_radius > 0.0, "ambient radius must be positive");
  }

  /// Open time domain: (-inf, 0) for shrinking families, all t otherwise.
  bool ancient_only() const {
    return kind != FamilyKind::GrimReaper && kind != FamilyKind::Equator;
  }
};

inline double sphere_radius(int n, double t) {
  require(n >= 1, "sphere_radius: n must be >= 1");
  if (!(t < 0.0)) throw ValidationError("sphere_radius: t must be negative");
  return std::sqrt(-2.0 * n * t);
}

inline double cylinder_radius(int n, int k, double t) {
  require(k >= 1 && k <= n - 1, "cylinder_radius: need 1 <= k <= n-1");
  if (!(t < 0.0)) throw ValidationError("cylinder_radius: t must be negative");
  return std::sqrt(-2.0 * (n - k) * t);
}

/// Principal curvatures of S^{n-k}(R) x R^k in ascending order.
inline std::vector<double> cylinder_curvatures(int n, int k, double t) {
  const double r = cylinder_radius(n, k, t);
  std::vector<double> lam(static_cast<std::size_t>(n), 1.0 / r);
  std::fill_n(lam.begin(), k, 0.0);
  return lam;
}

struct GraphPoint {
  double height = 0.0;
  double curvature = 0.0;
};

/// y = -log cos x + t: the unit-speed translating curve, curvature cos x.
inline GraphPoint grim_reaper_profile(double x, double t) {
  if (!(std::abs(x) < 0.5 * pi)) throw ValidationError("grim_reaper_profile: need |x| < pi/2");
  return {-std::log(std::cos(x)) + t, std::cos(x)};
}

// Angenent oval {cos x = e^t cosh y}. Parametrized by the outward normal angle
// theta the support point is x = asin(s cos theta), y = +-asinh(e^-t s |sin theta|)
// with s = sqrt(1 - e^{2t}), and the curvature is cos x / s.
namespace oval {

struct NormalPoint {
  Vec2 point;
  double curvature = 0.0;
};

inline NormalPoint at_normal(double theta, double t) {
  const double e2t = std::exp(2.0 * t);
  const double s = std::sqrt(-std::expm1(2.0 * t));
  const double c = std::cos(theta), sn = std::sin(theta);
  const double cosx = std::sqrt(sn * sn + c * c * e2t);
  const double x = std::atan2(s * c, cosx);
  const double y = std::copysign(std::asinh(std::exp(-t) * s * std::abs(sn)), sn);
  return {{x, y}, cosx / s};
}

inline double half_width(double t) { return std::acos(std::exp(t)); }
inline double half_height(double t) { return std::acosh(std::exp(-t)); }

inline double support(double theta, double t) {
  const auto p = at_normal(theta, t).point;
  return dot(p, unit_at(theta));
}

} // namespace oval

inline SupportProfile angenent_oval_slice(double t, std::size_t resolution) {
  if (!(t < 0.0)) throw ValidationError("angenent_oval_slice: t must be negative");
  require(resolution >= 16, "angenent_oval_slice: resolution must be >= 16");
  std::vector<double> h(resolution);
  ExactSideData ex{std::vector<double>(resolution), std::vector<double>(resolution)};
  const double step = 2.0 * pi / static_cast<double>(resolution);
  for (std::size_t j = 0; j < resolution; ++j) {
    const double th = step * static_cast<double>(j);
    const auto np = oval::at_normal(th, t);
    const Vec2 nu = unit_at(th), tau{-nu.y, nu.x};
    h[j] = dot(np.point, nu);
    ex.dh[j] = dot(np.point, tau);
    ex.kappa[j] = np.curvature;
  }
  return SupportProfile::plane_curve(std::move(h), std::move(ex));
}

/// Geodesic radius of the shrinking cap in S^{n+1}_R, extinct at t = 0:
/// rho(t) = R arccos(exp(n t / R^2)).
inline double cap_radius(double R, int n, double t) {
  require(R > 0.0 && n >= 1, "cap_radius: need R > 0, n >= 1");
  if (!(t < 0.0)) throw ValidationError("cap_radius: t must be negative");
  return R * std::acos(std::exp(n * t / (R * R)));
}

/// Same cap as its gap to the equator, pi/2 - rho/R = arcsin(exp(n t / R^2)).
inline double cap_equator_gap(double R, int n, double t) {
  require(R > 0.0 && n >= 1, "cap_equator_gap: need R > 0, n >= 1");
  if (!(t < 0.0)) throw ValidationError("cap_equator_gap: t must be negative");
  return std::asin(std::exp(n * t / (R * R)));
}

/// Slice of an exact family at time t. Spheres are curves for n = 1 and
/// axisymmetric profiles otherwise; caps and equators are CapStates.
inline TimeSlice exact_slice(const ExactFamily& fam, double t, std::size_t resolution) {
  fam.validate();
  const double tt = t - fam.time_offset;
  switch (fam.kind) {
  case FamilyKind::Sphere: {
    const double r = sphere_radius(fam.n, tt);
    if (fam.n == 1)
      return {t, SupportProfile::plane_curve(std::vector<double>(resolution, r))};
    return {t, SupportProfile::axisymmetric(fam.n, std::vector<double>(resolution + 1, r))};
  }
  case FamilyKind::AngenentOval: return {t, angenent_oval_slice(tt, resolution)};
  case FamilyKind::SphericalCap:
    return {t, CapState::from_gap(fam.n, fam.ambient_radius, cap_equator_gap(fam.ambient_radius, fam.n, tt))};
  case FamilyKind::Equator:
    return {t, CapState::from_gap(fam.n, fam.ambient_radius, 0.0)};
  default:
    throw ValidationError(to_string(fam.kind) +
                          " is a reference configuration, not a compact convex slice");
  }
}

/// Trajectory of an exact family sampled at the given (increasing) times.
inline Trajectory exact_trajectory(const ExactFamily& fam, const std::vector<double>& times,
                                   std::size_t resolution) {
  Trajectory traj;
  traj.engine = "exact";
  traj.n = fam.n;
  traj.provenance.engine = "exact:" + to_string(fam.kind);
  for (double t : times) traj.slices.push_back(exact_slice(fam, t, resolution));
  traj.validate();
  return traj;
}

/// `count` times geometrically spaced in -t from t_first to t_last (both < 0).
inline std::vector<double> log_spaced_times(double t_first, double t_last, std::size_t count) {
  require(t_first < t_last && t_last < 0.0 && count >= 2, "log_spaced_times: bad window");
  std::vector<double> ts(count);
  const double a = std::log(-t_first), b = std::log(-t_last);
  for (std::size_t i = 0; i < count; ++i)
    ts[i] = -std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  ts.front() = t_first;
  ts.back() = t_last;
  return ts;
}

/// Normal angle, curvature and arclength weight along a stretch of the grim
/// reaper; the outward normal of the convex side is (sin x, -cos x).
struct NormalSample {
  Vec2 normal;
  double curvature = 0.0;
  double weight = 0.0;
};

inline std::vector<NormalSample> grim_reaper_samples(double half_width, std::size_t count) {
  require(half_width > 0.0 && half_width < 0.5 * pi && count >= 3, "grim_reaper_samples: bad range");
  std::vector<NormalSample> out(count);
  const double dx = 2.0 * half_width / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = -half_width + dx * static_cast<double>(j);
    const double w = (j == 0 || j + 1 == count) ? 0.5 : 1.0;
    // ds = sec x dx
    out[j] = {{std::sin(x), -std::cos(x)}, std::cos(x), w * dx / std::cos(x)};
  }
  return out;
}

/// max |V_normal + H| for an exact family at time t. With dt = 0 the analytic
/// normal velocity is used; otherwise the velocity is a central difference
/// with increment dt.
inline double flow_residual(const ExactFamily& fam, double t, std::size_t samples, double dt = 0.0) {
  fam.validate();
  require(samples >= 1, "flow_residual: need >= 1 sample");
  require(dt >= 0.0, "flow_residual: dt must be >= 0");
  const double tt = t - fam.time_offset;
  if (fam.ancient_only() && !(tt + dt < 0.0))
    throw ValidationError("flow_residual: t at the boundary of the time domain");

  auto deriv = [dt](auto&& f, double at) { return (f(at + dt) - f(at - dt)) / (2.0 * dt); };
  switch (fam.kind) {
  case FamilyKind::Sphere:
  case FamilyKind::Cylinder: {
    const int m = fam.kind == FamilyKind::Sphere ? fam.n : fam.n - fam.k;
    auto radius = [m](double s) { return std::sqrt(-2.0 * m * s); };
    const double r = radius(tt);
    const double v = dt == 0.0 ? -m / r : deriv(radius, tt);
    return std::abs(v + m / r);
  }
  case FamilyKind::GrimReaper: {
    double worst = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
      const double x = -0.5 * pi + pi * (static_cast<double>(j) + 0.5) / static_cast<double>(samples);
      auto height = [x](double s) { return grim_reaper_profile(x, s).height; };
      const double vy = dt == 0.0 ? 1.0 : deriv(height, tt);
      // velocity (0, vy) against the outward normal (sin x, -cos x)
      const double vn = -std::cos(x) * vy;
      worst = std::max(worst, std::abs(vn + grim_reaper_profile(x, tt).curvature));
    }
    return worst;
  }
  case FamilyKind::AngenentOval: {
    double worst = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
      const double th = 2.0 * pi * static_cast<double>(j) / static_cast<double>(samples);
      const double kappa = oval::at_normal(th, tt).curvature;
      auto h = [th](double s) { return oval::support(th, s); };
      const double v = dt == 0.0 ? -kappa : deriv(h, tt);
      worst = std::max(worst, std::abs(v + kappa));
    }
    return worst;
  }
  case FamilyKind::SphericalCap: {
    const double R = fam.ambient_radius;
    const int n = fam.n;
    auto rho = [R, n](double s) { return cap_radius(R, n, s); };
    const double H = CapState::from_gap(n, R, cap_equator_gap(R, n, tt)).mean_curvature();
    const double v = dt == 0.0 ? -H : deriv(rho, tt);
    return std::abs(v + H);
  }
  case FamilyKind::Equator: return 0.0;
  }
  return 0.0;
}

/// max over interior slices of |dh/dt + H| with dh/dt a three-point difference
/// in time at fixed normal (or d rho / dt for caps).
inline double flow_residual(const Trajectory& traj) {
  require(traj.size() >= 3, "flow_residual: trajectory needs >= 3 slices");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto& a = traj.slices[i - 1];
    const auto& b = traj.slices[i];
    const auto& c = traj.slices[i + 1];
    if (b.is_cap()) {
      const double v = central_derivative(a.t, a.cap().geodesic_radius(), b.t, b.cap().geodesic_radius(),
                                          c.t, c.cap().geodesic_radius());
      worst = std::max(worst, std::abs(v + b.cap().mean_curvature()));
      continue;
    }
    const auto H = mean_curvature(b.profile());
    const auto ha = a.profile().values(), hb = b.profile().values(), hc = c.profile().values();
    require(ha.size() == hb.size() && hb.size() == hc.size(), "flow_residual: grid changed");
    for (std::size_t j = 0; j < hb.size(); ++j) {
      const double v = central_derivative(a.t, ha[j], b.t, hb[j], c.t, hc[j]);
      worst = std::max(worst, std::abs(v + H[j]));
    }
  }
  return worst;
}

} // namespace mcfflow

#endif
