#ifndef MCFFLOW_NUMERICS_HPP
#define MCFFLOW_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "mcfflow/errors.hpp"

namespace mcfflow {

inline constexpr double pi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Volume of the unit ball in R^d (d >= 0).
inline double unit_ball_volume(int d) {
  return std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface measure of the unit sphere S^d embedded in R^{d+1}.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(pi, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

namespace stencil {

// Fourth-order central differences. `at(j)` must resolve ghost indices
// (periodic wrap or even reflection) for j in [-2, size+1].
template <class Access>
double d1(const Access& at, std::ptrdiff_t j, double dx) {
  return (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * dx);
}

template <class Access>
double d2(const Access& at, std::ptrdiff_t j, double dx) {
  return (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1) - at(j + 2)) /
         (12.0 * dx * dx);
}

inline auto periodic(std::span<const double> v) {
  return [v](std::ptrdiff_t j) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    return v[static_cast<std::size_t>(((j % n) + n) % n)];
  };
}

// Even reflection about both end nodes: v[-j] = v[j], v[last+j] = v[last-j].
inline auto reflective(std::span<const double> v) {
  return [v](std::ptrdiff_t j) {
    const auto last = static_cast<std::ptrdiff_t>(v.size()) - 1;
    if (j < 0) j = -j;
    if (j > last) j = 2 * last - j;
    return v[static_cast<std::size_t>(j)];
  };
}

} // namespace stencil

/// Trigonometric interpolant of equispaced periodic samples on [0, 2pi).
class TrigInterpolant {
public:
  TrigInterpolant() = default;

  explicit TrigInterpolant(std::span<const double> samples) : m_(samples.size()) {
    require(m_ >= 3, "trigonometric interpolation needs at least 3 samples");
    const std::size_t half = m_ / 2;
    a_.assign(half + 1, 0.0);
    b_.assign(half + 1, 0.0);
    const double step = 2.0 * pi / static_cast<double>(m_);
    for (std::size_t k = 0; k <= half; ++k) {
      double sa = 0.0, sb = 0.0;
      for (std::size_t j = 0; j < m_; ++j) {
        // reduce k*j mod m so the angle stays small and exact
        const double ang = step * static_cast<double>((k * j) % m_);
        sa += samples[j] * std::cos(ang);
        sb += samples[j] * std::sin(ang);
      }
      const double w = (k == 0 || (m_ % 2 == 0 && k == half)) ? 1.0 : 2.0;
      a_[k] = w * sa / static_cast<double>(m_);
      b_[k] = w * sb / static_cast<double>(m_);
    }
    if (m_ % 2 == 0) b_[half] = 0.0;
  }

  /// Value (order 0) or derivative of the given order at angle x.
  double operator()(double x, int order = 0) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const double kk = static_cast<double>(k);
      const double c = std::cos(kk * x), sn = std::sin(kk * x);
      switch (order) {
      case 0: s += a_[k] * c + b_[k] * sn; break;
      case 1: s += kk * (-a_[k] * sn + b_[k] * c); break;
      default: s += -kk * kk * (a_[k] * c + b_[k] * sn); break;
      }
    }
    return s;
  }

  std::size_t size() const noexcept { return m_; }

private:
  std::size_t m_ = 0;
  std::vector<double> a_, b_;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
std::pair<double, double> golden_maximize(F&& f, double lo, double hi, int iterations = 90) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "line fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "line fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

/// Second-order derivative at the middle of three nonuniform nodes.
inline double central_derivative(double t0, double f0, double t1, double f1, double t2,
                                 double f2) {
  const double h0 = t1 - t0, h1 = t2 - t1;
  return (-h1 / (h0 * (h0 + h1))) * f0 + ((h1 - h0) / (h0 * h1)) * f1 +
         (h0 / (h1 * (h0 + h1))) * f2;
}

/// log(sum_j w_j * exp(e_j)) for positive weights, skipping e_j = -inf.
inline double log_weighted_sum_exp(std::span<const double> w, std::span<const double> e) {
  double m = -INFINITY;
  for (double v : e) m = std::max(m, v);
  if (!std::isfinite(m)) return -INFINITY;
  double s = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j)
    if (std::isfinite(e[j])) s += w[j] * std::exp(e[j] - m);
  return s > 0.0 ? m + std::log(s) : -INFINITY;
}

} // namespace mcfflow

#endif
