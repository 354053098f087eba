#ifndef MCFFLOW_DIAGNOSTICS_HPP
#define MCFFLOW_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mcfflow/convex_geometry.hpp"
#include "mcfflow/curvature.hpp"
#include "mcfflow/errors.hpp"
#include "mcfflow/numerics.hpp"
#include "mcfflow/trajectory.hpp"

namespace mcfflow {

inline constexpr double umbilic_tolerance = 1e-10;
inline constexpr double positivity_floor = 1e-12;

/// Per-sample curvature data. Principal curvatures are stored as the pair
/// (k1, k2) with multiplicities (1, n-1); curves only use k1 and caps are a
/// single umbilic sample.
struct CurvatureField {
  int n = 1;
  std::vector<double> k1, k2;
  std::vector<double> H, A2;
  std::vector<double> grad_H2, grad_A2;
  std::vector<double> weights; // d mu quadrature weights

  std::size_t size() const { return H.size(); }

  /// Sorted principal curvatures lambda_1 <= ... <= lambda_n at sample j.
  std::vector<double> eigenvalues(std::size_t j) const {
    std::vector<double> lam{k1[j]};
    for (int i = 1; i < n; ++i) lam.push_back(k2[j]);
    std::sort(lam.begin(), lam.end());
    return lam;
  }
};

namespace detail {

inline std::vector<double> angular_derivative(const SupportProfile& body, std::span<const double> f) {
  std::vector<double> out(f.size());
  const double dx = body.spacing();
  if (body.is_curve()) {
    const auto at = stencil::periodic(f);
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = stencil::d1(at, static_cast<std::ptrdiff_t>(j), dx);
  } else {
    const auto at = stencil::reflective(f);
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = stencil::d1(at, static_cast<std::ptrdiff_t>(j), dx);
  }
  return out;
}

} // namespace detail

/// Gradients are meridian (arclength) derivatives, d/ds = k1 d/dphi; for
/// bodies of revolution Codazzi gives |grad A|^2 = (k1_s)^2 + 3 (n-1) (k2_s)^2.
inline CurvatureField curvature_field(const SupportProfile& body) {
  CurvatureField f;
  f.n = body.dimension();
  const auto pc = profile_curvatures(body);
  f.k1 = pc.k1;
  f.k2 = body.is_curve() ? pc.k1 : pc.k2;
  const std::size_t m = f.k1.size();
  f.H.resize(m);
  f.A2.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double c = f.n - 1;
    f.H[j] = body.is_curve() ? f.k1[j] : f.k1[j] + c * f.k2[j];
    f.A2[j] = body.is_curve() ? f.k1[j] * f.k1[j] : f.k1[j] * f.k1[j] + c * f.k2[j] * f.k2[j];
  }
  const auto dH = detail::angular_derivative(body, f.H);
  const auto d1 = detail::angular_derivative(body, f.k1);
  const auto d2 = body.is_curve() ? d1 : detail::angular_derivative(body, f.k2);
  f.grad_H2.resize(m);
  f.grad_A2.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double s = f.k1[j] * f.k1[j];
    f.grad_H2[j] = s * dH[j] * dH[j];
    f.grad_A2[j] = body.is_curve() ? s * d1[j] * d1[j] : s * (d1[j] * d1[j] + 3.0 * (f.n - 1) * d2[j] * d2[j]);
  }
  f.weights = surface_weights(body);
  return f;
}

inline CurvatureField curvature_field(const CapState& cap) {
  CurvatureField f;
  f.n = cap.n;
  const double k = cap.principal_curvature();
  f.k1 = {k};
  f.k2 = {k};
  f.H = {cap.mean_curvature()};
  f.A2 = {cap.n * k * k};
  f.grad_H2 = {0.0};
  f.grad_A2 = {0.0};
  const double r = cap.ambient_radius * std::cos(cap.equator_gap); // R sin(rho / R)
  f.weights = {unit_sphere_area(cap.n) * std::pow(r, cap.n)};
  return f;
}

inline CurvatureField curvature_field(const TimeSlice& s) {
  return s.is_cap() ? curvature_field(s.cap()) : curvature_field(s.profile());
}

/// Curvature y'' / (1 + y'^2)^{3/2} of a graph sampled on a uniform x grid,
/// fourth-order differences; the two nodes at each end are left NaN.
inline std::vector<double> graph_curvature(std::span<const double> y, double dx) {
  require(y.size() >= 5, "graph needs >= 5 samples");
  std::vector<double> k(y.size(), NAN);
  const auto at = [y](std::ptrdiff_t j) { return y[static_cast<std::size_t>(j)]; };
  for (std::size_t j = 2; j + 2 < y.size(); ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double d1 = stencil::d1(at, jj, dx), d2 = stencil::d2(at, jj, dx);
    k[j] = d2 / std::pow(1.0 + d1 * d1, 1.5);
  }
  return k;
}

namespace detail {

inline void require_positive_H(const CurvatureField& f) {
  for (double h : f.H)
    if (!(h > positivity_floor)) throw ValidationError("mean curvature below positivity floor");
}

} // namespace detail

/// f_sigma = (|A|^2 - H^2/n) / H^(2 - sigma) and log of its L^p integral.
struct FSigma {
  std::vector<double> field;
  std::vector<double> weights;

  double max() const { return *std::max_element(field.begin(), field.end()); }
  /// log of the integral of f^p d mu (-inf when f vanishes identically).
  double log_lp(double p) const {
    std::vector<double> e(field.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = field[j] > 0.0 ? p * std::log(field[j]) : -INFINITY;
    return log_weighted_sum_exp(weights, e);
  }
  /// log of the integral of g f^q d mu.
  double log_weighted(std::span<const double> g, double q) const {
    std::vector<double> w(field.size()), e(field.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
      w[j] = weights[j] * g[j];
      e[j] = field[j] > 0.0 ? q * std::log(field[j]) : -INFINITY;
    }
    return log_weighted_sum_exp(w, e);
  }
};

inline FSigma f_sigma(const CurvatureField& f, double sigma) {
  detail::require_positive_H(f);
  FSigma out;
  out.weights = f.weights;
  out.field.resize(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double num = f.A2[j] - f.H[j] * f.H[j] / f.n;
    // umbilic samples are exactly zero
    const auto lam = f.eigenvalues(j);
    const bool umbilic = lam.back() - lam.front() < umbilic_tolerance * std::max(1.0, std::abs(f.H[j]));
    out.field[j] = umbilic ? 0.0 : std::max(0.0, num) / std::pow(f.H[j], 2.0 - sigma);
  }
  return out;
}

inline FSigma f_sigma(const TimeSlice& s, double sigma) { return f_sigma(curvature_field(s), sigma); }

/// f_{sigma,eta} = (|A|^2 - (1/(n-k+1) + eta) H^2) / H^(2 - sigma), signed.
inline std::vector<double> f_sigma_eta(const CurvatureField& f, double sigma, double eta, int k) {
  require(k >= 2 && k <= f.n - 1, "f_sigma_eta needs 2 <= k <= n-1");
  require(sigma >= 0.0 && sigma <= 2.0, "sigma must lie in [0, 2]");
  require(eta >= 0.0, "eta must be non-negative");
  detail::require_positive_H(f);
  std::vector<double> out(f.size());
  const double c = 1.0 / (f.n - k + 1) + eta;
  for (std::size_t j = 0; j < f.size(); ++j)
    out[j] = (f.A2[j] - c * f.H[j] * f.H[j]) / std::pow(f.H[j], 2.0 - sigma);
  return out;
}

struct KConvexity {
  double margin = 0.0;           // min (lambda_1 + ... + lambda_k) / H
  double sufficient_alpha = 0.0; // largest alpha certified by the |A|^2/H^2 test
};

/// alpha certified by |A|^2 / H^2 <= (1 - 2 alpha) / (n - k).
inline double sufficient_alpha(double ahh_max, int n, int k) {
  return std::max(0.0, 0.5 * (1.0 - (n - k) * ahh_max));
}

inline KConvexity kconvexity(const CurvatureField& f, int k) {
  require(k >= 1 && k <= f.n - 1, "kconvexity needs 1 <= k <= n-1");
  detail::require_positive_H(f);
  KConvexity out{INFINITY, 0.0};
  double ahh = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto lam = f.eigenvalues(j);
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += lam[i];
    out.margin = std::min(out.margin, s / f.H[j]);
    ahh = std::max(ahh, f.A2[j] / (f.H[j] * f.H[j]));
  }
  out.sufficient_alpha = sufficient_alpha(ahh, f.n, k);
  return out;
}

// --- eigenvalue-tuple arithmetic ------------------------------------------

struct TupleQuantities {
  double H = 0.0, A2 = 0.0, trA3 = 0.0;
  double Z = 0.0;          // H tr(A^3) - |A|^4
  double Z_pairs = 0.0;    // sum_{i<j} l_i l_j (l_i - l_j)^2
};

inline TupleQuantities tuple_quantities(std::span<const double> lam) {
  TupleQuantities q;
  for (double l : lam) {
    q.H += l;
    q.A2 += l * l;
    q.trA3 += l * l * l;
  }
  q.Z = q.H * q.trA3 - q.A2 * q.A2;
  for (std::size_t i = 0; i < lam.size(); ++i)
    for (std::size_t j = i + 1; j < lam.size(); ++j) {
      const double d = lam[i] - lam[j];
      q.Z_pairs += lam[i] * lam[j] * d * d;
    }
  return q;
}

/// Sum of the k smallest entries.
inline double smallest_sum(std::span<const double> lam, int k) {
  std::vector<double> s(lam.begin(), lam.end());
  std::sort(s.begin(), s.end());
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += s[static_cast<std::size_t>(i)];
  return acc;
}

/// Lower bound for Z on the set where the tuple is uniformly k-convex with
/// constant alpha and f_{sigma,eta} > 0.
inline double z_lower_bound(int n, int k, double alpha, double eta, double H) {
  return (n - k + 1) * alpha * alpha * eta / (k * k) * H * H * H * H;
}

/// Integer h whose reciprocal is nearest to |A|^2/H^2 (1/n for spheres,
/// 1/(n-k) for the cylinders S^{n-k} x R^k).
inline int nearest_reciprocal(double ahh) {
  require(ahh > 0.0, "ratio must be positive");
  const int lo = std::max(1, static_cast<int>(std::floor(1.0 / ahh)));
  return std::abs(1.0 / lo - ahh) <= std::abs(1.0 / (lo + 1) - ahh) ? lo : lo + 1;
}

struct SweepResult {
  std::size_t tested = 0;         // tuples meeting the hypothesis
  std::size_t counterexamples = 0;
  double worst_margin = INFINITY; // min over tested tuples of the conclusion's slack
};

/// k-convexity oracle: i.i.d. uniform(0,1] tuples with |A|^2/H^2 <= (1-2a)/(n-k)
/// must satisfy lambda_1 + ... + lambda_k >= a H.
inline SweepResult kconvexity_sweep(int n, int k, double alpha, std::size_t count, std::uint64_t seed) {
  require(k >= 1 && k < n, "need 1 <= k < n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SweepResult r;
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (double& l : lam) l = 1.0 - u(rng);
    const auto q = tuple_quantities(lam);
    if (q.A2 > (1.0 - 2.0 * alpha) / (n - k) * q.H * q.H) continue;
    ++r.tested;
    const double slack = smallest_sum(lam, k) - alpha * q.H;
    r.worst_margin = std::min(r.worst_margin, slack / q.H);
    if (slack < -1e-12 * q.H) ++r.counterexamples;
  }
  return r;
}

/// Oracle for the Z lower bound: convex tuples with sum of k smallest >= a H
/// and |A|^2 > (1/(n-k+1) + eta) H^2 must have Z >= (n-k+1) a^2 eta / k^2 H^4.
/// Tuples are uniform(0,1]; the hypothesis filter keeps those that qualify.
inline SweepResult z_bound_sweep(int n, int k, double alpha, double eta, std::size_t count, std::uint64_t seed) {
  require(k >= 1 && k <= n, "need 1 <= k <= n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SweepResult r;
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (double& l : lam) l = 1.0 - u(rng);
    const auto q = tuple_quantities(lam);
    if (smallest_sum(lam, k) < alpha * q.H) continue;
    if (!(q.A2 > (1.0 / (n - k + 1) + eta) * q.H * q.H)) continue;
    ++r.tested;
    const double bound = z_lower_bound(n, k, alpha, eta, q.H);
    const double slack = q.Z - bound;
    r.worst_margin = std::min(r.worst_margin, slack / std::pow(q.H, 4));
    if (slack < -1e-12 * std::pow(q.H, 4)) ++r.counterexamples;
  }
  return r;
}

/// Z identity oracle: max relative gap between the two forms of Z.
inline double z_identity_gap(int n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> lam(static_cast<std::size_t>(n));
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (double& l : lam) l = 1.0 - u(rng);
    const auto q = tuple_quantities(lam);
    worst = std::max(worst, std::abs(q.Z - q.Z_pairs) / std::max(q.A2 * q.A2, 1e-300));
  }
  return worst;
}

/// k-convex tuples (entries uniform in [-1, 1], sum of k smallest >= 0, H > 0)
/// must satisfy |A|^2 <= n^3 H^2.
inline SweepResult kconvex_norm_sweep(int n, int k, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SweepResult r;
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (double& l : lam) l = u(rng);
    const auto q = tuple_quantities(lam);
    if (!(q.H > 0.0) || smallest_sum(lam, k) < 0.0) continue;
    ++r.tested;
    const double slack = std::pow(n, 3) * q.H * q.H - q.A2;
    r.worst_margin = std::min(r.worst_margin, slack / (q.H * q.H));
    if (slack < 0.0) ++r.counterexamples;
  }
  return r;
}

// --- trajectory-level diagnostics -------------------------------------------

namespace detail {

inline std::size_t interior_index(const Trajectory& traj, double t) {
  require(traj.size() >= 3, "trajectory needs >= 3 slices");
  for (std::size_t i = 1; i + 1 < traj.size(); ++i)
    if (std::abs(traj.slices[i].t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  throw ValidationError("time is not an interior sample of the trajectory");
}

} // namespace detail

/// dH/dt - |grad H|^2 / H at every sample of slice i (interior). The time
/// derivative is a three-point difference at fixed normal; the support-function
/// parametrization moves points tangentially, so the term <A^{-1} grad H,
/// grad H> = |grad H|^2 / k1 converts it to the derivative along the normal
/// motion.
inline std::vector<double> harnack_field(const Trajectory& traj, std::size_t i) {
  require(i >= 1 && i + 1 < traj.size(), "Harnack needs an interior slice");
  const auto& a = traj.slices[i - 1];
  const auto& b = traj.slices[i];
  const auto& c = traj.slices[i + 1];
  const auto fa = curvature_field(a), fb = curvature_field(b), fc = curvature_field(c);
  require(fa.size() == fb.size() && fb.size() == fc.size(), "grid changed along the trajectory");
  std::vector<double> q(fb.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double Ht = central_derivative(a.t, fa.H[j], b.t, fb.H[j], c.t, fc.H[j]);
    const double g = fb.grad_H2[j];
    q[j] = Ht + (g > 0.0 ? g / fb.k1[j] - g / fb.H[j] : 0.0);
  }
  return q;
}

inline double harnack_min_at(const Trajectory& traj, std::size_t i) {
  const auto q = harnack_field(traj, i);
  return *std::min_element(q.begin(), q.end());
}

inline double harnack_quantity(const Trajectory& traj, double t) {
  return harnack_min_at(traj, detail::interior_index(traj, t));
}

/// Coarsest grid at which the Harnack tolerance is calibrated.
inline constexpr std::size_t harnack_coarsest_grid = 64;

/// Harnack tolerance for a discretized run: 1e-2 (max H)^3 over the run at the
/// coarsest grid, halved with every doubling of N.
inline double harnack_tolerance(const Trajectory& traj) {
  double h = 0.0;
  std::size_t grid = 0;
  for (const auto& s : traj.slices) {
    const auto f = curvature_field(s);
    h = std::max(h, *std::max_element(f.H.begin(), f.H.end()));
    grid = s.is_cap() ? harnack_coarsest_grid : s.profile().grid_size();
  }
  return 1e-2 * h * h * h * static_cast<double>(harnack_coarsest_grid) / static_cast<double>(grid);
}

struct TypeQuantities {
  double typeI_sup = 0.0;    // sup sqrt(-t) max H
  double diam_growth = 0.0;  // sup diam / (1 + sqrt(-t))
  double radius_ratio = 0.0; // sup rho_+ / rho_-
  double H_ratio = 0.0;      // sup max H / min H
  double iso_sup = 0.0;      // sup |M|^{n+1} / |Omega|^n
};

/// Per-slice scale-invariant and growth quantities of one Euclidean slice.
struct SliceQuantities {
  double t = 0.0;
  double max_H = 0.0, min_H = 0.0;
  double diam = 0.0, rho_plus = 0.0, rho_minus = 0.0;
  double iso = 0.0;
};

inline SliceQuantities slice_quantities(const TimeSlice& s) {
  require(!s.is_cap(), "slice quantities need a Euclidean slice");
  const auto& b = s.profile();
  const auto H = mean_curvature(b);
  SliceQuantities q;
  q.t = s.t;
  q.max_H = *std::max_element(H.begin(), H.end());
  q.min_H = *std::min_element(H.begin(), H.end());
  q.diam = diameter(b);
  q.rho_plus = outer_radius(b);
  q.rho_minus = inner_radius(b);
  q.iso = iso_ratio(b);
  return q;
}

inline TypeQuantities type_quantities(const Trajectory& traj) {
  require(traj.size() >= 10, "type quantities need >= 10 slices");
  TypeQuantities out;
  for (const auto& s : traj.slices) {
    require(s.t < 0.0, "type quantities need negative times");
    const auto q = slice_quantities(s);
    const double r = std::sqrt(-s.t);
    out.typeI_sup = std::max(out.typeI_sup, r * q.max_H);
    out.diam_growth = std::max(out.diam_growth, q.diam / (1.0 + r));
    out.radius_ratio = std::max(out.radius_ratio, q.rho_plus / q.rho_minus);
    out.H_ratio = std::max(out.H_ratio, q.max_H / q.min_H);
    out.iso_sup = std::max(out.iso_sup, q.iso);
  }
  return out;
}

/// sigma(n, k) = (3/(n+2) - 1/(n-k+1)) / 2.
inline double gradient_sigma(int n, int k) { return 0.5 * (3.0 / (n + 2) - 1.0 / (n - k + 1)); }

struct GradientRatio {
  double max_ratio = 0.0; // max |grad A|^2 / |A|^4
  std::optional<double> g1_min, g2_min, sigma_H2_min; // reported when k < (2n+1)/3
  bool ordering_holds = false; // g2 > g1 > sigma H^2 > 0 at every sample
};

inline GradientRatio gradient_ratio(const CurvatureField& f, std::optional<int> k = std::nullopt) {
  GradientRatio out;
  for (std::size_t j = 0; j < f.size(); ++j) {
    require(f.A2[j] > 0.0, "gradient ratio needs |A| > 0");
    out.max_ratio = std::max(out.max_ratio, f.grad_A2[j] / (f.A2[j] * f.A2[j]));
  }
  if (k && *k >= 1 && *k <= f.n && 3 * *k < 2 * f.n + 1) {
    const double s = gradient_sigma(f.n, *k);
    double g1m = INFINITY, g2m = INFINITY, sm = INFINITY;
    bool ok = true;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double H2 = f.H[j] * f.H[j];
      const double g1 = (1.0 / (f.n - *k + 1) + s) * H2 - f.A2[j];
      const double g2 = 3.0 / (f.n + 2) * H2 - f.A2[j];
      g1m = std::min(g1m, g1);
      g2m = std::min(g2m, g2);
      sm = std::min(sm, s * H2);
      ok = ok && g2 > g1 && g1 > s * H2 && s * H2 > 0.0;
    }
    out.g1_min = g1m;
    out.g2_min = g2m;
    out.sigma_H2_min = sm;
    out.ordering_holds = ok;
  }
  return out;
}

/// Z = H tr(A^3) - |A|^4 and the margin Z - (n-k+1) a^2 eta / k^2 H^4 on
/// samples where f_{sigma,eta} > 0 (NaN elsewhere).
struct ZField {
  std::vector<double> Z;
  std::vector<double> margin;
};

inline ZField z_quantity(const CurvatureField& f, int k, double alpha, double eta, double sigma = 0.0) {
  require(k >= 1 && k <= f.n, "need 1 <= k <= n");
  ZField out;
  const double c = 1.0 / (f.n - k + 1) + eta;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto lam = f.eigenvalues(j);
    require(lam.front() > 0.0, "Z quantity needs a convex slice");
    const auto q = tuple_quantities(lam);
    out.Z.push_back(q.Z);
    const double fse = (q.A2 - c * q.H * q.H) / std::pow(q.H, 2.0 - sigma);
    out.margin.push_back(fse > 0.0 ? q.Z - z_lower_bound(f.n, k, alpha, eta, q.H) : NAN);
  }
  return out;
}

// --- caps in the ambient sphere -------------------------------------------

/// b of the ambient pinching function: 3/2 n(n-1) K for n >= 3,
/// 4(4 - eps)K/3 for n = 2.
inline double ambient_b(int n, double K, double eps = 0.0) {
  require(n >= 2, "ambient pinching needs n >= 2");
  return n >= 3 ? 1.5 * n * (n - 1) * K : 4.0 * (4.0 - eps) * K / 3.0;
}

/// Hypothesis margin: 2K - (|A|^2 - H^2/(n-1)) for n >= 3,
/// (4 - eps)K/3 - (|A|^2 - 3H^2/4) for n = 2 (non-negative when it holds).
inline double ambient_hypothesis_margin(int n, double K, double A2, double H, double eps = 0.0) {
  if (n >= 3) return 2.0 * K - (A2 - H * H / (n - 1));
  return (4.0 - eps) * K / 3.0 - (A2 - 0.75 * H * H);
}

struct AmbientPinchingSlice {
  double t = 0.0;
  std::optional<double> f; // (|A|^2 - H^2/n)/H^2; absent on the equator
  double phi_b = 0.0;      // (|A|^2 - H^2/n)/(H^2 + b)
  double hypothesis_margin = 0.0;
};

inline std::vector<AmbientPinchingSlice> ambient_pinching(const Trajectory& traj, double b, double eps = 0.0) {
  std::vector<AmbientPinchingSlice> out;
  for (const auto& s : traj.slices) {
    require(s.is_cap(), "ambient pinching needs a cap trajectory");
    const auto& c = s.cap();
    const auto f = curvature_field(c);
    const double H = f.H[0], A2 = f.A2[0];
    // every geodesic sphere is umbilic (k1 == k2), so the traceless part is 0
    const double num = f.k1[0] == f.k2[0] ? 0.0 : A2 - H * H / c.n;
    AmbientPinchingSlice r;
    r.t = s.t;
    if (!c.is_equator()) r.f = num / (H * H);
    r.phi_b = num / (H * H + b);
    r.hypothesis_margin = ambient_hypothesis_margin(c.n, c.ambient_curvature(), A2, H, eps);
    out.push_back(r);
  }
  return out;
}

/// Growth envelope e^{-4nK(t1 - t)} max f(t): the largest value max f(t1) may
/// take given max f at the earlier time t.
inline double pinching_decay_envelope(int n, double K, double t1, double t, double max_f_t) {
  require(t1 >= t, "envelope needs t1 >= t");
  return std::exp(-4.0 * n * K * (t1 - t)) * max_f_t;
}

// --- flow identities --------------------------------------------------------

struct FlowIdentityReport {
  double area_rel = 0.0;   // max |d|M|/dt + int H^2| / int H^2
  double volume_rel = 0.0; // max |d|Omega|/dt + int H| / int H
  double curvature_bound_rel = 0.0; // worst relative violation of min H <= sqrt(n/(-2t)), max H >= 1/sqrt(-2t)
  double radius_bound_rel = 0.0;    // worst relative violation of rho_- <= sqrt(-2nt) <= rho_+
};

inline FlowIdentityReport flow_identities(const Trajectory& traj, bool check_bounds = true) {
  require(traj.size() >= 3, "flow identities need >= 3 slices");
  FlowIdentityReport r;
  std::vector<AreaVolume> av;
  for (const auto& s : traj.slices) av.push_back(area_and_volume(s.profile()));
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto& a = traj.slices[i - 1];
    const auto& b = traj.slices[i];
    const auto& c = traj.slices[i + 1];
    const auto f = curvature_field(b);
    double iH = 0.0, iH2 = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      iH += f.weights[j] * f.H[j];
      iH2 += f.weights[j] * f.H[j] * f.H[j];
    }
    const double dA = central_derivative(a.t, av[i - 1].area, b.t, av[i].area, c.t, av[i + 1].area);
    const double dV = central_derivative(a.t, av[i - 1].volume, b.t, av[i].volume, c.t, av[i + 1].volume);
    r.area_rel = std::max(r.area_rel, std::abs(dA + iH2) / iH2);
    r.volume_rel = std::max(r.volume_rel, std::abs(dV + iH) / iH);
  }
  if (check_bounds) {
    const int n = traj.n;
    for (const auto& s : traj.slices) {
      require(s.t < 0.0, "curvature bounds need relabelled negative times");
      const auto q = slice_quantities(s);
      const double up = std::sqrt(n / (-2.0 * s.t)), lo = 1.0 / std::sqrt(-2.0 * s.t);
      r.curvature_bound_rel = std::max({r.curvature_bound_rel, q.min_H / up - 1.0, 1.0 - q.max_H / lo});
      const double rr = std::sqrt(-2.0 * n * s.t);
      r.radius_bound_rel = std::max({r.radius_bound_rel, q.rho_minus / rr - 1.0, 1.0 - q.rho_plus / rr});
    }
  }
  return r;
}

// --- per-slice table ----------------------------------------------------------

struct DiagnoseParams {
  double sigma = 0.0;
  double p = 2.0;
  std::optional<int> k;
  double eta = 0.0;
};

/// One row of the per-slice diagnostics table. Quantities that are undefined
/// for a slice (Euclidean measurements of caps, Harnack at the end slices,
/// ratios with vanishing denominators) are NaN.
struct DiagnosticRow {
  double t = 0.0;
  double eps_min = NAN;    // min lambda_1 / H
  double f0_max = NAN;     // max (|A|^2 - H^2/n) / H^2
  double fsigma_lp = NAN;  // (int f_sigma^p d mu)^{1/p}
  double harnack_min = NAN;
  double typeI = NAN;      // sqrt(-t) max H
  double diam = NAN, rho_minus = NAN, rho_plus = NAN, iso_ratio = NAN;
  double grad_ratio = NAN; // max |grad A|^2 / |A|^4
};

struct DiagnosticSummary {
  std::size_t slices = 0;
  double harnack_min = NAN;
  double harnack_tolerance = NAN;
  double eps_min = NAN;
  double typeI_sup = NAN;
  std::optional<double> kconvexity_margin; // min over slices, when k is given
  std::optional<FlowIdentityReport> identities; // Euclidean runs with >= 3 slices
};

inline std::vector<DiagnosticRow> diagnose_slices(const Trajectory& traj, const DiagnoseParams& prm = {}) {
  require(prm.p >= 1.0, "p must be >= 1");
  require(prm.sigma >= 0.0 && prm.sigma <= 2.0, "sigma must lie in [0, 2]");
  std::vector<DiagnosticRow> rows;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.slices[i];
    const auto f = curvature_field(s);
    DiagnosticRow r;
    r.t = s.t;
    double maxH = 0.0, eps = INFINITY, f0 = 0.0, gr = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double H = f.H[j];
      maxH = std::max(maxH, H);
      eps = std::min(eps, std::min(f.k1[j], f.k2[j]) / H);
      const auto lam = f.eigenvalues(j);
      if (lam.back() - lam.front() >= umbilic_tolerance * std::max(1.0, std::abs(H)))
        f0 = std::max(f0, (f.A2[j] - H * H / f.n) / (H * H));
      gr = std::max(gr, f.grad_A2[j] / (f.A2[j] * f.A2[j]));
    }
    if (maxH > positivity_floor) {
      r.eps_min = eps;
      r.f0_max = std::max(0.0, f0);
      r.grad_ratio = gr;
      r.fsigma_lp = std::exp(f_sigma(f, prm.sigma).log_lp(prm.p) / prm.p);
    }
    if (s.t < 0.0) r.typeI = std::sqrt(-s.t) * maxH;
    if (i >= 1 && i + 1 < traj.size()) r.harnack_min = harnack_min_at(traj, i);
    if (!s.is_cap()) {
      const auto q = slice_quantities(s);
      r.diam = q.diam;
      r.rho_minus = q.rho_minus;
      r.rho_plus = q.rho_plus;
      r.iso_ratio = q.iso;
    }
    rows.push_back(r);
  }
  return rows;
}

inline DiagnosticSummary summarize(const Trajectory& traj, const std::vector<DiagnosticRow>& rows,
                                   const DiagnoseParams& prm = {}) {
  DiagnosticSummary s;
  s.slices = rows.size();
  auto fold_min = [](double acc, double v) { return std::isnan(v) ? acc : std::isnan(acc) ? v : std::min(acc, v); };
  auto fold_max = [](double acc, double v) { return std::isnan(v) ? acc : std::isnan(acc) ? v : std::max(acc, v); };
  for (const auto& r : rows) {
    s.harnack_min = fold_min(s.harnack_min, r.harnack_min);
    s.eps_min = fold_min(s.eps_min, r.eps_min);
    s.typeI_sup = fold_max(s.typeI_sup, r.typeI);
  }
  if (traj.size() >= 3) s.harnack_tolerance = harnack_tolerance(traj);
  if (prm.k) {
    double m = INFINITY;
    for (const auto& sl : traj.slices) m = std::min(m, kconvexity(curvature_field(sl), *prm.k).margin);
    s.kconvexity_margin = m;
  }
  const bool euclidean = std::none_of(traj.slices.begin(), traj.slices.end(), [](const TimeSlice& x) { return x.is_cap(); });
  if (euclidean && traj.size() >= 3) s.identities = flow_identities(traj, traj.t_back() < 0.0);
  return s;
}

} // namespace mcfflow

#endif
