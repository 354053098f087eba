#ifndef MCFFLOW_SUPPORT_PROFILE_HPP
#define MCFFLOW_SUPPORT_PROFILE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcfflow/errors.hpp"
#include "mcfflow/extremal_balls.hpp"
#include "mcfflow/numerics.hpp"

namespace mcfflow {

enum class ProfileMode { PlaneCurve, Axisymmetric };

/// Optional closed-form side data attached by exact families. When present it
/// replaces finite differences: `dh` for h' and `kappa` for the profile
/// curvature 1/(h'' + h).
struct ExactSideData {
  std::vector<double> dh;
  std::vector<double> kappa;
};

// Support function of a convex body sampled on its normal angle.
//
//  PlaneCurve   (n = 1): N samples, theta_j = 2 pi j / N, periodic.
//  Axisymmetric (n >= 2): N + 1 samples, phi_j = pi j / N on [0, pi], where
//                phi is the angle between the normal and the rotation axis.
//                Profile-plane coordinates are (z, r) with the axis along z.
//
// The body is always valid: discretely convex (h'' + h > 0) and h > 0.
class SupportProfile {
public:
  static SupportProfile plane_curve(std::vector<double> h,
                                    std::optional<ExactSideData> exact = std::nullopt) {
    return SupportProfile(ProfileMode::PlaneCurve, 1, std::move(h), std::move(exact));
  }

  static SupportProfile axisymmetric(int n, std::vector<double> h,
                                     std::optional<ExactSideData> exact = std::nullopt) {
    require(n >= 2, "axisymmetric profiles need n >= 2");
    return SupportProfile(ProfileMode::Axisymmetric, n, std::move(h), std::move(exact));
  }

  /// Same mode and dimension, new samples. Used by the flow engine, which
  /// performs its own convexity bookkeeping.
  SupportProfile with_values(std::vector<double> h) const {
    return SupportProfile(mode_, n_, std::move(h), std::nullopt);
  }

  ProfileMode mode() const noexcept { return mode_; }
  int dimension() const noexcept { return n_; }
  bool is_curve() const noexcept { return mode_ == ProfileMode::PlaneCurve; }
  /// Grid parameter N (sample count is N for curves, N + 1 for profiles).
  std::size_t grid_size() const noexcept { return is_curve() ? h_.size() : h_.size() - 1; }
  std::size_t sample_count() const noexcept { return h_.size(); }
  std::span<const double> values() const noexcept { return h_; }
  double operator[](std::size_t j) const { return h_[j]; }
  bool recentered() const noexcept { return recentered_; }
  /// Restores the gauge flag of a body read back from storage.
  void mark_recentered(bool v = true) noexcept { recentered_ = v; }
  const std::optional<ExactSideData>& exact() const noexcept { return exact_; }

  double spacing() const noexcept {
    return (is_curve() ? 2.0 * pi : pi) / static_cast<double>(grid_size());
  }
  double angle(std::size_t j) const noexcept { return spacing() * static_cast<double>(j); }
  Vec2 normal(std::size_t j) const noexcept { return unit_at(angle(j)); }

  std::vector<double> first_derivative() const {
    if (exact_) return exact_->dh;
    return apply([](const auto& at, std::ptrdiff_t j, double dx) { return stencil::d1(at, j, dx); });
  }

  std::vector<double> second_derivative() const {
    return apply([](const auto& at, std::ptrdiff_t j, double dx) { return stencil::d2(at, j, dx); });
  }

  /// Radius of curvature of the (profile) curve, h'' + h.
  std::vector<double> curvature_radius() const {
    std::vector<double> rho = second_derivative();
    for (std::size_t j = 0; j < rho.size(); ++j) rho[j] += h_[j];
    return rho;
  }

  /// Curvature of the (profile) curve at each sample.
  std::vector<double> profile_curvature() const {
    if (exact_) return exact_->kappa;
    std::vector<double> k = curvature_radius();
    for (double& v : k) v = 1.0 / v;
    return k;
  }

  /// Boundary point with normal angle a: h nu + h' nu_perp. For profiles the
  /// components are (z, r).
  std::vector<Vec2> boundary_points() const {
    const std::vector<double> dh = first_derivative();
    std::vector<Vec2> p(h_.size());
    for (std::size_t j = 0; j < h_.size(); ++j) {
      const double c = std::cos(angle(j)), s = std::sin(angle(j));
      p[j] = {h_[j] * c - dh[j] * s, h_[j] * s + dh[j] * c};
    }
    if (!is_curve()) {
      p.front().y = 0.0;
      p.back().y = 0.0;
    }
    return p;
  }

  /// Periodic samples on [0, 2pi): the curve itself, or the even extension of
  /// a profile (the meridian curve reflected across the axis).
  std::vector<double> periodic_samples() const {
    if (is_curve()) return h_;
    std::vector<double> ext(2 * grid_size());
    for (std::size_t j = 0; j < ext.size(); ++j)
      ext[j] = h_[j <= grid_size() ? j : 2 * grid_size() - j];
    return ext;
  }

  TrigInterpolant interpolant() const { return TrigInterpolant(periodic_samples()); }

  double min_curvature_radius() const {
    const auto rho = curvature_radius();
    return *std::min_element(rho.begin(), rho.end());
  }

  SupportProfile scaled(double lambda) const {
    require(lambda > 0.0, "scale factor must be positive");
    std::vector<double> h = h_;
    for (double& v : h) v *= lambda;
    std::optional<ExactSideData> ex;
    if (exact_) {
      ex = *exact_;
      for (double& v : ex->dh) v *= lambda;
      for (double& v : ex->kappa) v /= lambda;
    }
    return SupportProfile(mode_, n_, std::move(h), std::move(ex));
  }

  /// Chebyshev (incircle) center and radius of the sampled body. Profiles keep
  /// the center on the axis, so `center.y` is 0 and `center.x` is the z offset.
  ChebyshevBall<2> chebyshev() const {
    if (is_curve()) {
      std::vector<std::array<double, 2>> a(h_.size());
      for (std::size_t j = 0; j < h_.size(); ++j) a[j] = {std::cos(angle(j)), std::sin(angle(j))};
      const std::size_t n = h_.size();
      return chebyshev_ball<2>(a, h_, {0, (n + 1) / 3, (2 * n + 1) / 3});
    }
    std::vector<std::array<double, 1>> a(h_.size());
    for (std::size_t j = 0; j < h_.size(); ++j) a[j] = {std::cos(angle(j))};
    const auto ball = chebyshev_ball<1>(a, h_, {0, h_.size() - 1});
    return {{ball.center[0], 0.0}, ball.radius};
  }

private:
  SupportProfile(ProfileMode mode, int n, std::vector<double> h, std::optional<ExactSideData> ex)
      : mode_(mode), n_(n), h_(std::move(h)), exact_(std::move(ex)) {
    require(is_curve() ? h_.size() >= 8 : h_.size() >= 9, "support profile grid too small");
    for (double v : h_)
      if (!std::isfinite(v)) throw ValidationError("support profile contains NaN/Inf");
    if (exact_) {
      require(exact_->dh.size() == h_.size() && exact_->kappa.size() == h_.size(),
              "exact side data must match the sample count");
    }
    if (!exact_) {
      double worst = min_curvature_radius();
      // convexity missed by rounding only: lift h by a constant
      if (worst <= 0.0 && worst > -1e-12) {
        const double lift = 1e-12 - worst;
        for (double& v : h_) v += lift;
        worst = min_curvature_radius();
      }
      if (!(worst > 0.0))
        throw ValidationError("support profile violates discrete convexity (min h''+h = " +
                              std::to_string(worst) + ")");
    }
    if (*std::min_element(h_.begin(), h_.end()) <= 0.0) recenter();
  }

  void recenter() {
    const auto ball = chebyshev();
    if (!(ball.radius > 0.0)) throw ValidationError("support profile encloses no interior");
    const Vec2 c{ball.center[0], ball.center[1]};
    for (std::size_t j = 0; j < h_.size(); ++j) {
      const Vec2 nu = normal(j);
      h_[j] -= is_curve() ? dot(c, nu) : c.x * nu.x;
      if (exact_) exact_->dh[j] -= is_curve() ? (-c.x * nu.y + c.y * nu.x) : -c.x * nu.y;
    }
    recentered_ = true;
  }

  template <class Op>
  std::vector<double> apply(Op op) const {
    std::vector<double> out(h_.size());
    const double dx = spacing();
    if (is_curve()) {
      const auto at = stencil::periodic(h_);
      for (std::size_t j = 0; j < h_.size(); ++j) out[j] = op(at, static_cast<std::ptrdiff_t>(j), dx);
    } else {
      const auto at = stencil::reflective(h_);
      for (std::size_t j = 0; j < h_.size(); ++j) out[j] = op(at, static_cast<std::ptrdiff_t>(j), dx);
    }
    return out;
  }

  ProfileMode mode_;
  int n_;
  std::vector<double> h_;
  std::optional<ExactSideData> exact_;
  bool recentered_ = false;
};

} // namespace mcfflow

#endif
