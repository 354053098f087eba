#ifndef MCFFLOW_CONVEX_GEOMETRY_HPP
#define MCFFLOW_CONVEX_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mcfflow/errors.hpp"
#include "mcfflow/extremal_balls.hpp"
#include "mcfflow/numerics.hpp"
#include "mcfflow/support_profile.hpp"

namespace mcfflow {

// Widths, diameters and projections of a body of revolution only involve its
// meridian section: the plane curve obtained by reflecting the profile across
// the axis. Everything below therefore works on a periodic support function
// of a closed plane curve, for both profile modes.

/// C^1 cubic Hermite interpolant of (h, h') on the periodic normal-angle grid.
class SupportInterpolant {
public:
  explicit SupportInterpolant(const SupportProfile& body) {
    h_ = body.periodic_samples();
    const auto dh = body.first_derivative();
    if (body.is_curve()) {
      dh_ = dh;
    } else {
      const std::size_t n = body.grid_size();
      dh_.resize(2 * n);
      for (std::size_t j = 0; j < 2 * n; ++j) dh_[j] = j <= n ? dh[j] : -dh[2 * n - j];
    }
    step_ = 2.0 * pi / static_cast<double>(h_.size());
  }

  /// h and h' at normal angle a (any real a).
  std::pair<double, double> operator()(double a) const {
    const double u = a / step_;
    const double fl = std::floor(u);
    const double s = u - fl;
    const auto m = static_cast<std::int64_t>(h_.size());
    const auto i0 = static_cast<std::size_t>(((static_cast<std::int64_t>(fl) % m) + m) % m);
    const std::size_t i1 = (i0 + 1) % h_.size();
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    const double v = h00 * h_[i0] + h10 * step_ * dh_[i0] + h01 * h_[i1] + h11 * step_ * dh_[i1];
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
    const double d = (d00 * h_[i0] + d01 * h_[i1]) / step_ + d10 * dh_[i0] + d11 * dh_[i1];
    return {v, d};
  }

  double support(double a) const { return (*this)(a).first; }

  /// Boundary point of the (meridian) curve with normal angle a.
  Vec2 point(double a) const {
    const auto [h, dh] = (*this)(a);
    const double c = std::cos(a), s = std::sin(a);
    return {h * c - dh * s, h * s + dh * c};
  }

  std::size_t nodes() const { return h_.size(); }
  double step() const { return step_; }

private:
  std::vector<double> h_, dh_;
  double step_ = 0.0;
};

namespace detail {

// Extremum of a periodic function of the normal angle: scan every node of
// [lo, lo + span) then refine the best bracket by golden section.
template <class F>
std::pair<double, double> periodic_extremum(F f, double lo, double span, std::size_t nodes,
                                            bool maximize) {
  const double sign = maximize ? 1.0 : -1.0;
  auto g = [&](double a) { return sign * f(a); };
  const double step = span / static_cast<double>(nodes);
  std::size_t best = 0;
  double best_val = -INFINITY;
  for (std::size_t j = 0; j <= nodes; ++j) {
    const double v = g(lo + step * static_cast<double>(j));
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  const double center = lo + step * static_cast<double>(best);
  auto [arg, val] = golden_maximize(g, center - step, center + step, 100);
  if (val < best_val) {
    arg = center;
    val = best_val;
  }
  return {arg, sign * val};
}

} // namespace detail

/// Width in the direction with normal angle `angle` (for profiles, the angle
/// from the rotation axis).
inline double width_at(const SupportInterpolant& s, double angle) {
  return s.support(angle) + s.support(angle + pi);
}

inline double width(const SupportProfile& body, Vec2 direction) {
  if (std::abs(norm(direction) - 1.0) > 1e-12) throw ValidationError("width: direction must be a unit vector");
  return width_at(SupportInterpolant(body), std::atan2(direction.y, direction.x));
}

struct WidthExtrema {
  double w_minus = 0.0;
  double w_plus = 0.0;
  double angle_minus = 0.0;
  double angle_plus = 0.0;
};

/// `directions` is the number of scanned directions over a half turn before
/// refinement (0: one per grid node).
inline WidthExtrema min_max_width(const SupportInterpolant& s, std::size_t directions = 0) {
  auto w = [&](double a) { return width_at(s, a); };
  const std::size_t nodes = directions ? directions : s.nodes() / 2;
  const auto [amin, wmin] = detail::periodic_extremum(w, 0.0, pi, nodes, false);
  const auto [amax, wmax] = detail::periodic_extremum(w, 0.0, pi, nodes, true);
  return {wmin, wmax, amin, amax};
}

inline WidthExtrema min_max_width(const SupportProfile& body) {
  return min_max_width(SupportInterpolant(body));
}

/// Extrinsic diameter: the longest chord joins two points with opposite normals.
inline double diameter(const SupportInterpolant& s) {
  auto chord = [&](double a) { return norm(s.point(a) - s.point(a + pi)); };
  return detail::periodic_extremum(chord, 0.0, pi, s.nodes() / 2, true).second;
}

inline double diameter(const SupportProfile& body) { return diameter(SupportInterpolant(body)); }

/// Radius of the smallest enclosing ball of the sampled boundary. For bodies
/// of revolution the reflected meridian points are included, which puts the
/// center on the axis.
inline double outer_radius(const SupportProfile& body) {
  auto pts = body.boundary_points();
  if (!body.is_curve()) {
    const std::size_t m = pts.size();
    for (std::size_t j = 1; j + 1 < m; ++j) pts.push_back({pts[j].x, -pts[j].y});
  }
  return min_enclosing_circle(pts).radius;
}

inline double inner_radius(const SupportProfile& body) {
  const double r = body.chebyshev().radius;
  if (!(r > 0.0)) throw InfeasibleBody("inner_radius: body has empty interior");
  return r;
}

struct AreaVolume {
  double area = 0.0;   // |M|, n-dimensional
  double volume = 0.0; // |Omega|, (n+1)-dimensional
};

namespace detail {

// int_0^pi sin^m(x) cos(k x) dx in closed form (Beta-function identity).
inline double sine_cosine_moment(int m, int k) {
  const double p = (m + 2 + k) / 2.0, q = (m + 2 - k) / 2.0;
  const double c = std::cos(k * pi / 2);
  if (std::abs(c) < 1e-12) return 0.0;
  if (q <= 0 && q == std::floor(q)) return 0.0;
  // 1/Gamma(q) may carry a sign for negative q
  double sign = c < 0 ? -1.0 : 1.0;
  if (q < 0) sign *= (static_cast<long>(std::floor(-q)) % 2 == 0) ? -1.0 : 1.0;
  const double logv = std::log(pi) - m * std::log(2.0) - std::log(m + 1.0) + std::lgamma(m + 2.0) - std::lgamma(p) -
                      std::lgamma(q);
  return sign * std::exp(logv);
}

// Weights w_j on phi_j = pi j / N with sum_j w_j G(phi_j) = int_0^pi sin^m G
// exactly for cosine polynomials G of degree <= N.
inline std::vector<double> sine_power_weights(std::size_t N, int m) {
  std::vector<double> mom(N + 1), w(N + 1);
  for (std::size_t k = 0; k <= N; ++k) mom[k] = sine_cosine_moment(m, static_cast<int>(k));
  for (std::size_t j = 0; j <= N; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
      const double ck = (k == 0 || k == N) ? 0.5 : 1.0;
      acc += ck * mom[k] * std::cos(pi * static_cast<double>(k * j) / static_cast<double>(N));
    }
    w[j] = (j == 0 || j == N ? 0.5 : 1.0) * 2.0 / static_cast<double>(N) * acc;
  }
  return w;
}

} // namespace detail

namespace detail {

// Weights are reused across snapshots of one run.
inline const std::vector<double>& cached_sine_power_weights(std::size_t N, int m) {
  thread_local std::map<std::pair<std::size_t, int>, std::vector<double>> cache;
  auto it = cache.find({N, m});
  if (it == cache.end()) it = cache.emplace(std::make_pair(N, m), sine_power_weights(N, m)).first;
  return it->second;
}

inline std::vector<double> radius_of_curvature(const SupportProfile& body) {
  if (!body.exact()) return body.curvature_radius();
  std::vector<double> rho;
  for (double k : body.exact()->kappa) rho.push_back(1.0 / k);
  return rho;
}

// g = r / sin(phi) = h + h' cot(phi), even and smooth through the poles
// (g -> rho1 there).
inline std::vector<double> axis_distance_ratio(const SupportProfile& body, const std::vector<double>& rho1) {
  const auto h = body.values();
  const auto dh = body.first_derivative();
  const std::size_t N = body.grid_size();
  std::vector<double> g(h.size());
  for (std::size_t j = 0; j <= N; ++j)
    g[j] = (j == 0 || j == N) ? rho1[j] : h[j] + dh[j] / std::tan(body.angle(j));
  return g;
}

} // namespace detail

/// Quadrature weights for the induced measure: sum_j w_j f_j approximates the
/// integral of f over the hypersurface. Profiles integrate sin^(n-1) against a
/// smooth cosine series exactly, so the pole behaviour costs no accuracy.
inline std::vector<double> surface_weights(const SupportProfile& body) {
  const auto rho = detail::radius_of_curvature(body);
  std::vector<double> w(rho.size());
  if (body.is_curve()) {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = rho[j] * body.spacing();
    return w;
  }
  const int n = body.dimension();
  const auto g = detail::axis_distance_ratio(body, rho);
  const auto& q = detail::cached_sine_power_weights(body.grid_size(), n - 1);
  for (std::size_t j = 0; j < w.size(); ++j)
    w[j] = unit_sphere_area(n - 1) * q[j] * std::pow(g[j], n - 1) * rho[j];
  return w;
}

inline double surface_integral(const SupportProfile& body, std::span<const double> f) {
  const auto w = surface_weights(body);
  require(f.size() == w.size(), "integrand size mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * f[j];
  return acc;
}

inline AreaVolume area_and_volume(const SupportProfile& body) {
  const auto h = body.values();
  if (body.is_curve()) {
    const auto dh = body.first_derivative();
    double per = 0.0, vol = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      per += h[j];
      vol += h[j] * h[j] - dh[j] * dh[j];
    }
    return {per * body.spacing(), 0.5 * vol * body.spacing()};
  }
  const int n = body.dimension();
  const auto rho = detail::radius_of_curvature(body);
  const auto g = detail::axis_distance_ratio(body, rho);
  const auto& q = detail::cached_sine_power_weights(body.grid_size(), n + 1);
  const auto w = surface_weights(body);
  double a = 0.0, v = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    a += w[j];
    v += q[j] * std::pow(g[j], n) * rho[j];
  }
  return {a, unit_ball_volume(n) * v};
}

/// Hausdorff distance of two convex bodies: the sup-norm distance of their
/// support functions, sampled on the finer grid and the other's interpolant.
inline double hausdorff_distance(const SupportProfile& a, const SupportProfile& b) {
  require(a.is_curve() == b.is_curve(), "Hausdorff distance needs matching profile modes");
  const SupportInterpolant ia(a), ib(b);
  const std::size_t m = 4 * std::max(ia.nodes(), ib.nodes());
  double d = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(m);
    d = std::max(d, std::abs(ia.support(t) - ib.support(t)));
  }
  return d;
}

/// |M|^{n+1} / |Omega|^n.
inline double iso_ratio(int n, const AreaVolume& av) {
  return std::pow(av.area, n + 1) / std::pow(av.volume, n);
}

inline double iso_ratio(const SupportProfile& body) {
  return iso_ratio(body.dimension(), area_and_volume(body));
}

struct MeshResolution {
  std::size_t meridian = 64;
  std::size_t azimuth = 128;
};

namespace detail {

// Shortest paths on a sampled surface of revolution in R^3. Edges join nodes
// whose (meridian, azimuth) index offsets are coprime and at most 3 apart;
// weights are chord lengths. By rotational symmetry, sources on a single
// meridian suffice.
inline double revolution_surface_diameter(const std::vector<Vec2>& zr, std::size_t azimuth) {
  const std::size_t rings = zr.size(); // includes both poles
  const std::size_t m = rings - 1;
  const std::size_t J = azimuth;
  // node ids: pole 0 -> 0, rings 1..m-1 -> 1 + (i-1)*J + j, pole m -> last
  const std::size_t count = 2 + (m - 1) * J;
  auto id = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == 0) return 0;
    if (i == m) return count - 1;
    return 1 + (i - 1) * J + (j % J);
  };
  std::vector<double> cs(J), sn(J);
  for (std::size_t j = 0; j < J; ++j) {
    cs[j] = std::cos(2.0 * pi * static_cast<double>(j) / static_cast<double>(J));
    sn[j] = std::sin(2.0 * pi * static_cast<double>(j) / static_cast<double>(J));
  }
  auto pos = [&](std::size_t i, std::size_t j) {
    struct P { double x, y, z; };
    return P{zr[i].x, zr[i].y * cs[j % J], zr[i].y * sn[j % J]};
  };
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(count);
  auto link = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    const auto a = pos(i0, j0), b = pos(i1, j1);
    const double d = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
    adj[id(i0, j0)].push_back({id(i1, j1), d});
    adj[id(i1, j1)].push_back({id(i0, j0), d});
  };
  const int reach = 3;
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      for (int di = 0; di <= reach; ++di) {
        for (int dj = -reach; dj <= reach; ++dj) {
          if (di == 0 && dj <= 0) continue;
          if (std::gcd(di, std::abs(dj)) != 1) continue;
          const std::size_t i1 = i + static_cast<std::size_t>(di);
          if (i1 >= m) continue;
          link(i, j, i1, (j + J + static_cast<std::size_t>(dj + static_cast<int>(J))) % J);
        }
      }
    }
  }
  // poles connect to every node of the nearest rings
  for (std::size_t i = 1; i <= static_cast<std::size_t>(reach) && i < m; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      link(0, 0, i, j);
      link(m, 0, m - i, j);
    }
  }
  if (m <= static_cast<std::size_t>(reach)) link(0, 0, m, 0);

  std::vector<std::size_t> sources{0, count - 1};
  for (std::size_t i = 1; i < m; ++i) sources.push_back(id(i, 0));
  double diam = 0.0;
  std::vector<double> dist(count);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t src : sources) {
    std::fill(dist.begin(), dist.end(), INFINITY);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        if (d + w < dist[v]) {
          dist[v] = d + w;
          pq.push({dist[v], v});
        }
      }
    }
    diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
  }
  return diam;
}

} // namespace detail

/// Intrinsic (geodesic) diameter. Curves: half the perimeter. Bodies of
/// revolution: graph shortest paths on a meridian x azimuth mesh; any two
/// points lie on a 2-D totally geodesic section, so a surface in R^3 suffices.
inline double intrinsic_diameter(const SupportProfile& body, MeshResolution mesh = {}) {
  if (body.is_curve()) return 0.5 * area_and_volume(body).area;
  require(mesh.meridian >= 4 && mesh.azimuth >= 8, "intrinsic_diameter: mesh too coarse");
  const SupportInterpolant s(body);
  std::vector<Vec2> zr(mesh.meridian + 1);
  for (std::size_t i = 0; i <= mesh.meridian; ++i) {
    const double phi = pi * static_cast<double>(i) / static_cast<double>(mesh.meridian);
    zr[i] = s.point(phi);
    if (i == 0 || i == mesh.meridian) zr[i].y = 0.0;
  }
  return detail::revolution_surface_diameter(zr, mesh.azimuth);
}

/// Explicit radius-ratio bound from the reverse isoperimetric chain:
/// w+ <= (c1 + 1) w- for n = 1, w+ <= (1 + c1 / kappa_n) w- otherwise with
/// kappa_n = omega_{n-1} / (2 n (n+2)^{n-1}); then rho+/rho- <= (n+2) (w+/w-) / sqrt 2.
inline double reverse_iso_radius_bound(double c1, int n) {
  require(c1 > 0.0, "reverse_iso_radius_bound: c1 must be positive");
  require(n >= 1, "reverse_iso_radius_bound: n must be >= 1");
  double width_ratio;
  if (n == 1) {
    width_ratio = c1 + 1.0;
  } else {
    const double kappa = unit_ball_volume(n - 1) / (2.0 * n * std::pow(n + 2.0, n - 1));
    width_ratio = 1.0 + c1 / kappa;
  }
  return (n + 2.0) * width_ratio / std::sqrt(2.0);
}

struct BodyMeasurements {
  double w_minus = 0.0;
  double w_plus = 0.0;
  double diam = 0.0;
  double diam_I = 0.0;
  double rho_minus = 0.0;
  double rho_plus = 0.0;
  double area = 0.0;
  double volume = 0.0;
  double iso_ratio = 0.0;
};

inline BodyMeasurements measure(const SupportProfile& body, MeshResolution mesh = {}, std::size_t directions = 0) {
  const SupportInterpolant s(body);
  const auto w = min_max_width(s, directions);
  const auto av = area_and_volume(body);
  BodyMeasurements m;
  m.w_minus = w.w_minus;
  m.w_plus = w.w_plus;
  m.diam = diameter(s);
  m.diam_I = intrinsic_diameter(body, mesh);
  m.rho_minus = inner_radius(body);
  m.rho_plus = outer_radius(body);
  m.area = av.area;
  m.volume = av.volume;
  m.iso_ratio = iso_ratio(body.dimension(), av);
  return m;
}

/// Quantities of the shadow Sigma of the body onto the hyperplane orthogonal
/// to its minimal-width direction (n = 1, and bodies of revolution with n = 2).
struct ShadowFacts {
  double w_minus = 0.0;
  double w_plus = 0.0;
  double sigma_measure = 0.0; // |Sigma|
  double sigma_diam = 0.0;
  double area = 0.0;
  double volume = 0.0;
};

inline ShadowFacts shadow_facts(const SupportProfile& body, std::size_t samples = 512) {
  require(body.dimension() <= 2, "shadow_facts: only n = 1 and n = 2 are supported");
  const SupportInterpolant s(body);
  const auto w = min_max_width(s);
  const auto av = area_and_volume(body);
  ShadowFacts f{w.w_minus, w.w_plus, 0.0, 0.0, av.area, av.volume};
  if (body.is_curve()) {
    f.sigma_measure = width_at(s, w.angle_minus + 0.5 * pi);
    f.sigma_diam = f.sigma_measure;
    return f;
  }
  // The shadow is a plane convex body whose support function is h restricted
  // to unit vectors u orthogonal to nu; for a body of revolution h(u) = h(phi)
  // with cos(phi) = u_z.
  const double a = w.angle_minus;
  const double nz = std::cos(a), nr = std::sin(a);
  // orthonormal basis of nu^perp in (z, x, y) coordinates with nu = (nz, nr, 0)
  const double e1[3] = {-nr, nz, 0.0};
  const double e2[3] = {0.0, 0.0, 1.0};
  std::vector<double> hs(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double psi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(samples);
    const double uz = std::cos(psi) * e1[0] + std::sin(psi) * e2[0];
    hs[j] = s.support(std::acos(std::clamp(uz, -1.0, 1.0)));
  }
  const auto at = stencil::periodic(hs);
  const double dpsi = 2.0 * pi / static_cast<double>(samples);
  double area = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double d = stencil::d1(at, static_cast<std::ptrdiff_t>(j), dpsi);
    area += hs[j] * hs[j] - d * d;
  }
  f.sigma_measure = 0.5 * area * dpsi;
  double best = 0.0;
  for (std::size_t j = 0; j < samples / 2; ++j) best = std::max(best, hs[j] + hs[j + samples / 2]);
  f.sigma_diam = best;
  return f;
}

struct RandomBodyOptions {
  int n = 1;
  std::size_t resolution = 256;
  int max_mode = 6;
  /// Upper bound of the convexity budget sum (m^2-1)(|a_m|+|b_m|) / c0; < 1.
  double max_budget = 0.9;
};

/// Seeded random convex body: h = c0 + sum_{m>=2} (a_m cos m x + b_m sin m x)
/// (cosine terms only for profiles), scaled so that h'' + h > 0. Translations
/// (m = 1) are excluded.
inline SupportProfile random_body(std::uint64_t seed, const RandomBodyOptions& opt = {}) {
  require(opt.max_budget > 0.0 && opt.max_budget < 1.0, "random_body: budget must be in (0,1)");
  require(opt.max_mode >= 2, "random_body: max_mode must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 3.0);
  std::uniform_real_distribution<double> budget_dist(0.05, opt.max_budget);
  const double c0 = scale(rng);
  const bool curve = opt.n == 1;
  std::vector<double> a(static_cast<std::size_t>(opt.max_mode) + 1, 0.0), b(a.size(), 0.0);
  double used = 0.0;
  for (int m = 2; m <= opt.max_mode; ++m) {
    const double decay = 1.0 / (m * m);
    a[static_cast<std::size_t>(m)] = unit(rng) * decay;
    b[static_cast<std::size_t>(m)] = curve ? unit(rng) * decay : 0.0;
    used += (m * m - 1.0) * (std::abs(a[static_cast<std::size_t>(m)]) + std::abs(b[static_cast<std::size_t>(m)]));
  }
  const double factor = used > 0.0 ? budget_dist(rng) * c0 / used : 0.0;
  const std::size_t count = curve ? opt.resolution : opt.resolution + 1;
  const double step = (curve ? 2.0 * pi : pi) / static_cast<double>(opt.resolution);
  std::vector<double> h(count, c0);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = step * static_cast<double>(j);
    for (int m = 2; m <= opt.max_mode; ++m)
      h[j] += factor * (a[static_cast<std::size_t>(m)] * std::cos(m * x) + b[static_cast<std::size_t>(m)] * std::sin(m * x));
  }
  return curve ? SupportProfile::plane_curve(std::move(h)) : SupportProfile::axisymmetric(opt.n, std::move(h));
}

/// Sphere of radius R with a seeded perturbation in modes 2..max_mode whose
/// coefficients sum to `amplitude` in absolute value, so |h/R - 1| <= amplitude.
inline SupportProfile perturbed_sphere(int n, double R, double amplitude, std::uint64_t seed, std::size_t resolution,
                                       int max_mode = 4) {
  require(R > 0.0 && amplitude >= 0.0 && max_mode >= 2, "perturbed_sphere: invalid parameters");
  require(amplitude * (max_mode * max_mode - 1.0) < 1.0, "perturbed_sphere: amplitude too large for convexity");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const bool curve = n == 1;
  std::vector<double> a(static_cast<std::size_t>(max_mode) + 1, 0.0), b(a.size(), 0.0);
  double total = 0.0;
  for (int m = 2; m <= max_mode; ++m) {
    a[static_cast<std::size_t>(m)] = unit(rng);
    b[static_cast<std::size_t>(m)] = curve ? unit(rng) : 0.0;
    total += std::abs(a[static_cast<std::size_t>(m)]) + std::abs(b[static_cast<std::size_t>(m)]);
  }
  const std::size_t count = curve ? resolution : resolution + 1;
  const double step = (curve ? 2.0 * pi : pi) / static_cast<double>(resolution);
  std::vector<double> h(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = step * static_cast<double>(j);
    double d = 0.0;
    for (int m = 2; m <= max_mode; ++m)
      d += a[static_cast<std::size_t>(m)] * std::cos(m * x) + b[static_cast<std::size_t>(m)] * std::sin(m * x);
    h[j] = R * (1.0 + amplitude * d / total);
  }
  return curve ? SupportProfile::plane_curve(std::move(h)) : SupportProfile::axisymmetric(n, std::move(h));
}

} // namespace mcfflow

#endif
