#ifndef MCFFLOW_FLOW_ENGINE_HPP
#define MCFFLOW_FLOW_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "mcfflow/convex_geometry.hpp"
#include "mcfflow/errors.hpp"
#include "mcfflow/numerics.hpp"
#include "mcfflow/support_profile.hpp"
#include "mcfflow/trajectory.hpp"

namespace mcfflow {

inline constexpr int max_step_retries = 20;
/// Number of trailing accepted steps used by the extinction fit.
inline constexpr std::size_t extinction_fit_window = 20;

namespace detail {

// Mean curvature on raw samples (no validation), used by the RK stages;
// callers inspect `min_rho` for loss of convexity.
struct RawCurvature {
  std::vector<double> H;
  double min_rho = INFINITY;
  double max_k_sq = 0.0; // stiffness: k1^2 (+ (n-1) k2^2 for profiles)
};

inline RawCurvature raw_curvature(ProfileMode mode, int n, std::span<const double> h) {
  RawCurvature out;
  const std::size_t m = h.size();
  out.H.resize(m);
  if (mode == ProfileMode::PlaneCurve) {
    const double dx = 2.0 * pi / static_cast<double>(m);
    const auto at = stencil::periodic(h);
    for (std::size_t j = 0; j < m; ++j) {
      const double rho = stencil::d2(at, static_cast<std::ptrdiff_t>(j), dx) + h[j];
      out.min_rho = std::min(out.min_rho, rho);
      out.H[j] = 1.0 / rho;
      out.max_k_sq = std::max(out.max_k_sq, out.H[j] * out.H[j]);
    }
    return out;
  }
  const std::size_t last = m - 1;
  const double dx = pi / static_cast<double>(last);
  const auto at = stencil::reflective(h);
  for (std::size_t j = 0; j <= last; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double rho = stencil::d2(at, jj, dx) + h[j];
    out.min_rho = std::min(out.min_rho, rho);
    const double k1 = 1.0 / rho;
    double k2 = k1;
    if (j != 0 && j != last) {
      const double phi = dx * static_cast<double>(j);
      const double r = h[j] * std::sin(phi) + stencil::d1(at, jj, dx) * std::cos(phi);
      if (!(r > 0.0))
        throw PoleSingularity("distance to the axis vanished at interior node " + std::to_string(j));
      k2 = std::sin(phi) / r;
    }
    out.H[j] = k1 + (n - 1) * k2;
    out.max_k_sq = std::max(out.max_k_sq, k1 * k1 + (n - 1) * k2 * k2);
  }
  return out;
}

} // namespace detail

/// Largest explicit step allowed on this body: cfl * dx^2 / max(k^2), where for
/// profiles k^2 = k1^2 + (n-1) k2^2 (the parallel curvature also acts
/// diffusively near the poles).
inline double stable_dt(const SupportProfile& body, double cfl) {
  const auto c = detail::raw_curvature(body.mode(), body.dimension(), body.values());
  const double dx = body.spacing();
  return cfl * dx * dx / c.max_k_sq;
}

struct StepResult {
  SupportProfile body;
  double dt = 0.0;  // step actually taken
  int halvings = 0;
};

namespace detail {

inline StepResult rk4_step(const SupportProfile& body, double dt, double cfl) {
  const double bound = stable_dt(body, cfl);
  if (dt > bound * (1.0 + 1e-12))
    throw StabilityViolation("dt = " + std::to_string(dt) + " exceeds stability bound " + std::to_string(bound));
  const ProfileMode mode = body.mode();
  const int n = body.dimension();
  const std::vector<double> h0(body.values().begin(), body.values().end());
  const std::size_t m = h0.size();
  for (int attempt = 0; attempt <= max_step_retries; ++attempt) {
    bool ok = true;
    auto stage = [&](const std::vector<double>& base, const std::vector<double>* k, double a) {
      std::vector<double> x = base;
      if (k)
        for (std::size_t j = 0; j < m; ++j) x[j] -= a * (*k)[j];
      auto c = raw_curvature(mode, n, x);
      if (!(c.min_rho > 0.0)) ok = false;
      return c.H;
    };
    const auto k1 = stage(h0, nullptr, 0.0);
    const auto k2 = ok ? stage(h0, &k1, 0.5 * dt) : k1;
    const auto k3 = ok ? stage(h0, &k2, 0.5 * dt) : k1;
    const auto k4 = ok ? stage(h0, &k3, dt) : k1;
    if (ok) {
      std::vector<double> h1(m);
      for (std::size_t j = 0; j < m; ++j) h1[j] = h0[j] - dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      for (double v : h1)
        if (!std::isfinite(v)) throw NumericalError("non-finite support value after step");
      if (raw_curvature(mode, n, h1).min_rho > 0.0) return {body.with_values(std::move(h1)), dt, attempt};
    }
    dt *= 0.5;
  }
  throw ConvexityLost("convexity lost after " + std::to_string(max_step_retries) + " step halvings");
}

} // namespace detail

/// One explicit RK4 step of h_t = -k for a plane curve. On loss of convexity
/// the step is halved and retried; `StepResult::dt` reports what was taken.
inline StepResult step_curve(const SupportProfile& h, double dt, double cfl = FlowControls{}.cfl) {
  require(h.is_curve(), "step_curve needs a plane curve");
  require(dt > 0.0, "dt must be positive");
  return detail::rk4_step(h, dt, cfl);
}

/// One explicit RK4 step of h_t = -H for a convex body of revolution.
inline StepResult step_axisym(const SupportProfile& h, double dt, double cfl = FlowControls{}.cfl) {
  require(!h.is_curve(), "step_axisym needs an axisymmetric profile");
  require(dt > 0.0, "dt must be positive");
  return detail::rk4_step(h, dt, cfl);
}

/// Evolves until the outer radius drops below `stop_rho_plus` or the clock
/// reaches `t_end`. When the run ends by extinction, rho_+^2 is fitted linearly
/// against the clock over the last accepted steps and the zero crossing becomes
/// the new time origin; runs stopped by `t_end` keep the caller's clock.
inline Trajectory evolve(const SupportProfile& initial, double t0, const FlowControls& controls) {
  controls.validate();
  require(t0 < 0.0, "initial time must be negative");
  if (controls.t_end) require(*controls.t_end > t0, "t_end must exceed t0");
  Trajectory traj;
  traj.engine = initial.is_curve() ? "curve" : "axisym";
  traj.n = initial.dimension();
  traj.controls = controls;

  SupportProfile body = initial.exact() ? initial.with_values({initial.values().begin(), initial.values().end()})
                                        : initial;
  double s = t0;
  std::deque<std::pair<double, double>> recent; // (s, rho_+^2)
  auto rho_plus = [](const SupportProfile& b) { return outer_radius(b); };
  double rp = rho_plus(body);
  recent.emplace_back(s, rp * rp);
  traj.slices.push_back({s, body});
  std::size_t accepted = 0;
  bool extinct = rp < controls.stop_rho_plus;
  bool reached_end = false;
  while (!extinct && !reached_end) {
    double dt = std::min(controls.max_dt, stable_dt(body, controls.cfl));
    if (controls.t_end && s + dt >= *controls.t_end) {
      dt = *controls.t_end - s;
      reached_end = true;
    }
    StepResult res = [&] {
      try {
        return detail::rk4_step(body, dt, controls.cfl);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (at t = " + std::to_string(s) + ")");
      }
    }();
    if (res.halvings > 0) reached_end = false;
    if (!reached_end && !(s + res.dt > s))
      throw NumericalError("time step below clock resolution (at t = " + std::to_string(s) + ")");
    s = reached_end ? *controls.t_end : s + res.dt;
    body = std::move(res.body);
    ++accepted;
    rp = rho_plus(body);
    recent.emplace_back(s, rp * rp);
    if (recent.size() > extinction_fit_window) recent.pop_front();
    extinct = rp < controls.stop_rho_plus;
    if (extinct || reached_end || accepted % controls.snapshot_stride == 0) traj.slices.push_back({s, body});
  }
  if (extinct && recent.size() >= 3) {
    std::vector<double> xs, ys;
    for (const auto& [x, y] : recent) {
      xs.push_back(x);
      ys.push_back(y);
    }
    const auto fit = least_squares_line(xs, ys);
    if (!(fit.slope < 0.0)) throw NumericalError("extinction fit has non-negative slope");
    const double s_ext = -fit.intercept / fit.slope;
    if (!(s_ext > s)) throw NumericalError("extrapolated extinction precedes the last step");
    traj.t_ext_estimate = s_ext;
    for (auto& sl : traj.slices) sl.t -= s_ext;
  }
  traj.validate();
  return traj;
}

/// Geodesic sphere in the round sphere of radius R. Integrates the gap to the
/// equator, g = pi/2 - rho/R, which obeys dg/dt = (n / R^2) tan g (the same
/// law as d rho / dt = -(n / R) cot(rho / R)), by RK4 with steps limited to a
/// small fraction of g / |g'| and of the distance to extinction. The equator
/// is returned unchanged at every sample time.
inline Trajectory evolve_cap(const CapState& initial, double t0, const FlowControls& controls) {
  controls.validate();
  const int n = initial.n;
  const double R = initial.ambient_radius;
  require(n >= 1, "dimension must be >= 1");
  require(R > 0.0, "ambient radius must be positive");
  const double g0 = initial.equator_gap;
  require(g0 >= 0.0 && g0 < 0.5 * pi, "geodesic radius must lie in (0, pi R / 2]");
  if (controls.t_end) require(*controls.t_end > t0, "t_end must exceed t0");
  Trajectory traj;
  traj.engine = "cap";
  traj.n = n;
  traj.controls = controls;
  const bool equator = initial.is_equator();
  if (!equator) traj.t_ext_estimate = t0 - R * R / n * std::log(std::sin(g0));
  // without t_end, strict caps run to near extinction and the equator is
  // sampled up to -max_dt
  const double t_stop = controls.t_end ? *controls.t_end
                        : equator       ? std::max(-controls.max_dt, t0 + controls.max_dt)
                                        : INFINITY;
  const double a = n / (R * R);
  auto rhs = [a](double g) { return a * std::tan(g); };
  double t = t0, g = g0;
  traj.slices.push_back({t, CapState::from_gap(n, R, g)});
  std::size_t accepted = 0;
  while (true) {
    double dt = controls.max_dt;
    if (!equator) dt = std::min({dt, 0.01 / a * g / std::tan(g), 0.01 * (0.5 * pi - g) / rhs(g)});
    bool last = false;
    if (t + dt >= t_stop) {
      dt = t_stop - t;
      last = true;
    }
    if (!equator) {
      const double k1 = rhs(g), k2 = rhs(g + 0.5 * dt * k1), k3 = rhs(g + 0.5 * dt * k2), k4 = rhs(g + dt * k3);
      g += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!(g < 0.5 * pi)) throw NumericalError("cap collapsed past extinction");
    }
    t = last ? t_stop : t + dt;
    ++accepted;
    const CapState st = CapState::from_gap(n, R, g);
    const bool done = last || (!equator && st.geodesic_radius() < controls.stop_rho_plus);
    if (done || accepted % controls.snapshot_stride == 0) traj.slices.push_back({t, st});
    if (done) break;
  }
  traj.validate();
  return traj;
}

inline Trajectory evolve_cap(int n, double R, double rho0, double t0, const FlowControls& controls) {
  require(R > 0.0, "ambient radius must be positive");
  require(rho0 > 0.0 && rho0 <= 0.5 * pi * R, "rho0 must lie in (0, pi R / 2]");
  return evolve_cap(CapState::from_radius(n, R, rho0), t0, controls);
}

} // namespace mcfflow

#endif
