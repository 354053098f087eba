#ifndef MCFFLOW_ANCIENT_ANALYSIS_HPP
#define MCFFLOW_ANCIENT_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcfflow/convex_geometry.hpp"
#include "mcfflow/diagnostics.hpp"
#include "mcfflow/errors.hpp"
#include "mcfflow/exact_solutions.hpp"
#include "mcfflow/numerics.hpp"
#include "mcfflow/trajectory.hpp"

namespace mcfflow {

enum class Verdict { BoundedInWindow, GrowingTrend, Violated, NotApplicable };

inline std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::BoundedInWindow: return "BoundedInWindow";
  case Verdict::GrowingTrend: return "GrowingTrend";
  case Verdict::Violated: return "Violated";
  case Verdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

/// Thresholds of the trend rule. A series is Violated past `hard_cap`,
/// GrowingTrend if log(value) vs log(-t) has slope >= `growth_slope`,
/// BoundedInWindow if its latest-decade sup exceeds its earliest-decade sup by
/// less than `bounded_tolerance`, and GrowingTrend otherwise.
struct VerdictRule {
  double bounded_tolerance = 0.10;
  double growth_slope = 0.25;
  double hard_cap = 1e6;
  double min_decades = 2.0;
};

using Series = std::vector<std::pair<double, double>>; // (t, value)

struct ConditionResult {
  Series series;
  double sup = 0.0;
  double slope = 0.0;
  Verdict verdict = Verdict::NotApplicable;
};

inline Verdict classify_series(const Series& s, const VerdictRule& rule, double* slope_out = nullptr) {
  require(s.size() >= 2, "series needs >= 2 points");
  for (const auto& [t, v] : s)
    if (!std::isfinite(v) || v > rule.hard_cap) return Verdict::Violated;
  std::vector<double> x, y;
  for (const auto& [t, v] : s) {
    x.push_back(std::log(-t));
    y.push_back(std::log(std::max(v, 1e-300)));
  }
  const double slope = least_squares_line(x, y).slope;
  if (slope_out) *slope_out = slope;
  if (slope >= rule.growth_slope) return Verdict::GrowingTrend;
  const double far = -s.front().first, near = -s.back().first;
  double first = 0.0, last = 0.0;
  for (const auto& [t, v] : s) {
    if (-t >= far / 10.0) first = std::max(first, v);
    if (-t <= near * 10.0) last = std::max(last, v);
  }
  return last < (1.0 + rule.bounded_tolerance) * first ? Verdict::BoundedInWindow : Verdict::GrowingTrend;
}

inline ConditionResult make_condition(Series s, const VerdictRule& rule) {
  ConditionResult c;
  c.series = std::move(s);
  for (const auto& [t, v] : c.series) c.sup = std::max(c.sup, v);
  c.verdict = classify_series(c.series, rule, &c.slope);
  return c;
}

/// Condition ids in report order.
inline const std::array<std::string, 6>& condition_ids() {
  static const std::array<std::string, 6> ids{"ii", "iii", "iv", "v", "vi", "vii"};
  return ids;
}

/// Scale-invariant margin series of the six quantitative conditions:
///   ii  max H / lambda_1        iii diam / sqrt(-t)     iv rho_+ / rho_-
///   v   max H / min H           vi  iso ratio           vii sqrt(-t) max H
/// plus the sphericity proxy max f_0 and sup diam / (1 + sqrt(-t)).
struct ConditionReport {
  double window_start = 0.0, window_end = 0.0;
  std::map<std::string, ConditionResult> conditions;
  Series f0_max;
  double diam_affine_sup = 0.0; // sup diam / (1 + sqrt(-t))
};

inline double window_decades(const Trajectory& traj) {
  require(traj.size() >= 2, "trajectory needs >= 2 slices");
  require(traj.t_back() < 0.0, "window must end before the singular time");
  return std::log10(traj.t_front() / traj.t_back());
}

inline ConditionReport check_conditions(const Trajectory& traj, const VerdictRule& rule = {}) {
  if (traj.size() < 3 || !(window_decades(traj) >= rule.min_decades - 1e-9))
    throw WindowTooShort("window spans fewer than " + std::to_string(rule.min_decades) + " decades of -t");
  ConditionReport r;
  r.window_start = traj.t_front();
  r.window_end = traj.t_back();
  std::map<std::string, Series> s;
  for (const auto& sl : traj.slices) {
    require(!sl.is_cap(), "condition checker needs Euclidean slices");
    const auto f = curvature_field(sl);
    const auto q = slice_quantities(sl);
    const double t = sl.t, rt = std::sqrt(-t);
    double pinch = 0.0, f0 = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      pinch = std::max(pinch, f.H[j] / std::min(f.k1[j], f.k2[j]));
      const auto lam = f.eigenvalues(j);
      if (lam.back() - lam.front() >= umbilic_tolerance * f.H[j])
        f0 = std::max(f0, (f.A2[j] - f.H[j] * f.H[j] / f.n) / (f.H[j] * f.H[j]));
    }
    s["ii"].emplace_back(t, pinch);
    s["iii"].emplace_back(t, q.diam / rt);
    s["iv"].emplace_back(t, q.rho_plus / q.rho_minus);
    s["v"].emplace_back(t, q.max_H / q.min_H);
    s["vi"].emplace_back(t, q.iso);
    s["vii"].emplace_back(t, rt * q.max_H);
    r.f0_max.emplace_back(t, f0);
    r.diam_affine_sup = std::max(r.diam_affine_sup, q.diam / (1.0 + rt));
  }
  for (const auto& id : condition_ids()) {
    if (id == "ii" && traj.n == 1) {
      ConditionResult na;
      na.series = s[id];
      na.verdict = Verdict::NotApplicable;
      r.conditions[id] = na;
      continue;
    }
    r.conditions[id] = make_condition(s[id], rule);
  }
  return r;
}

/// Parabolic rescaling: space by lambda, time by lambda^2.
inline Trajectory scale_trajectory(const Trajectory& traj, double lambda) {
  require(lambda > 0.0, "scale factor must be positive");
  Trajectory out = traj;
  for (auto& s : out.slices) {
    s.t *= lambda * lambda;
    if (s.is_cap()) {
      auto c = s.cap();
      c.ambient_radius *= lambda;
      s.geometry = c;
    } else {
      s.geometry = s.profile().scaled(lambda);
    }
  }
  if (out.t_ext_estimate) *out.t_ext_estimate *= lambda * lambda;
  return out;
}

/// Moves the time origin by `shift` (t -> t - shift), as a mis-estimated
/// extinction time would.
inline Trajectory shift_time_origin(const Trajectory& traj, double shift) {
  Trajectory out = traj;
  for (auto& s : out.slices) s.t -= shift;
  return out;
}

// --- monotonicity of integral pinching ----------------------------------------

struct Theorem31Params {
  double sigma = 0.0;
  double p = 0.0;
};

/// Smallest-effort parameters meeting the gates p >= 100/eps^2,
/// sigma <= n eps^3 / (16 sqrt p) and p sigma > n: takes sigma at its bound
/// and p sigma = 1.1 n.
inline Theorem31Params theorem31_parameters(int n, double eps) {
  require(eps > 0.0 && eps <= 1.0, "pinching constant must lie in (0, 1]");
  const double root = 1.1 * 16.0 / (eps * eps * eps);
  const double p = std::max(root * root, 100.0 / (eps * eps));
  return {n * eps * eps * eps / (16.0 * std::sqrt(p)), p};
}

inline void check_theorem31_gates(int n, double eps, const Theorem31Params& q) {
  if (!(q.p >= 100.0 / (eps * eps))) throw ParameterGateViolated("p below 100/eps^2");
  if (!(q.sigma <= n * eps * eps * eps / (16.0 * std::sqrt(q.p)) * (1.0 + 1e-12)))
    throw ParameterGateViolated("sigma above n eps^3 / (16 sqrt p)");
  if (!(q.p * q.sigma > n)) throw ParameterGateViolated("p sigma must exceed n");
  if (!(q.sigma > 0.0)) throw ParameterGateViolated("sigma must be positive");
}

struct Theorem31Report {
  double eps = 0.0;       // measured min lambda_1 / H over the run
  Theorem31Params params;
  std::size_t pairs = 0;
  std::size_t violations = 0;  // snapshot pairs failing the discrete inequality
  double worst_slack = 0.0;    // max(0, (lhs - rhs) / |rhs|) over pairs
  double c3 = 0.0;             // fitted envelope constant (may underflow to 0)
  double log_c3 = -INFINITY;   // its logarithm, which does not
  double T0 = 0.0;
  bool envelope_holds = false;
  double area_constant = 0.0;  // sup |M_t| / (-t)^{n/2}
  Series log_integral;         // (t, log int f^p d mu)
};

inline double min_pinching(const Trajectory& traj) {
  double eps = INFINITY;
  for (const auto& s : traj.slices) {
    const auto f = curvature_field(s);
    for (std::size_t j = 0; j < f.size(); ++j) eps = std::min(eps, std::min(f.k1[j], f.k2[j]) / f.H[j]);
  }
  return eps;
}

/// Discrete check of d/dt int f^p <= -p sigma int H^2 f^p between consecutive
/// snapshots, in log form: log I2 - log I1 <= -(1 - slack) p sigma dt avg(J/I)
/// with J = int H^2 f^p. The envelope constant is fitted as the sup over the
/// window of (int f^p)^{2/(sigma p)} (|T0|^a - |t|^a), a = 1 - n/(sigma p).
inline Theorem31Report theorem31_envelope(const Trajectory& traj, std::optional<Theorem31Params> params = std::nullopt,
                                          double slack = 0.01, std::optional<double> T0 = std::nullopt) {
  require(traj.size() >= 3, "monotonicity check needs >= 3 slices");
  require(traj.n >= 2, "integral pinching needs n >= 2");
  Theorem31Report r;
  r.eps = min_pinching(traj);
  if (!(r.eps > 0.0)) throw ParameterGateViolated("trajectory is not uniformly pinched");
  r.params = params ? *params : theorem31_parameters(traj.n, r.eps);
  check_theorem31_gates(traj.n, r.eps, r.params);
  const double p = r.params.p, sigma = r.params.sigma;
  const int n = traj.n;
  std::vector<double> logI, ratio;
  for (const auto& s : traj.slices) {
    const auto f = curvature_field(s);
    const auto fs = f_sigma(f, sigma);
    std::vector<double> H2(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) H2[j] = f.H[j] * f.H[j];
    const double li = fs.log_lp(p);
    const double lj = fs.log_weighted(H2, p);
    logI.push_back(li);
    ratio.push_back(std::isfinite(li) ? std::exp(lj - li) : 0.0);
    r.log_integral.emplace_back(s.t, li);
    const auto av = area_and_volume(s.profile());
    r.area_constant = std::max(r.area_constant, av.area / std::pow(-s.t, 0.5 * n));
  }
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    if (!std::isfinite(logI[i]) || !std::isfinite(logI[i + 1])) continue; // f vanishes: both sides 0
    ++r.pairs;
    const double dt = traj.slices[i + 1].t - traj.slices[i].t;
    const double rhs = -p * sigma * dt * 0.5 * (ratio[i] + ratio[i + 1]);
    const double lhs = logI[i + 1] - logI[i];
    const double rel = (lhs - rhs) / std::abs(rhs);
    r.worst_slack = std::max(r.worst_slack, rel);
    if (lhs > rhs + slack * std::abs(rhs)) ++r.violations;
  }
  r.T0 = T0 ? *T0 : traj.t_front();
  const double a = 1.0 - n / (sigma * p);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.slices[i].t;
    if (t <= r.T0 || !std::isfinite(logI[i])) continue;
    const double d = std::pow(-r.T0, a) - std::pow(-t, a);
    r.log_c3 = std::max(r.log_c3, 2.0 / (sigma * p) * logI[i] + std::log(d));
  }
  r.c3 = std::exp(r.log_c3);
  // a > 0 keeps the denominator positive past T0, so the fitted sup is the
  // envelope constant whenever it is finite
  r.envelope_holds = a > 0.0 && r.log_c3 < INFINITY;
  return r;
}

// --- diameter / curvature equivalence -------------------------------------------

struct Lemma41Report {
  ConditionResult diameter;  // diam / sqrt(-t)
  ConditionResult curvature; // max(sqrt(-t) max H, 1 / (sqrt(-t) min H))
  bool agree = false;        // both bounded or both not bounded
  double c = 0.0;            // sup diam_I / sqrt(-t)
  std::size_t transfer_checks = 0;
  std::size_t transfer_failures = 0;
  double worst_transfer = 0.0; // max over checks of log(max H(t)) - log(e^{c^2/2} min H(t/2))
};

inline Lemma41Report lemma41_equivalence(const Trajectory& traj, const VerdictRule& rule = {},
                                        MeshResolution mesh = {32, 64}) {
  if (traj.size() < 3 || !(window_decades(traj) >= rule.min_decades - 1e-9))
    throw WindowTooShort("window spans fewer than " + std::to_string(rule.min_decades) + " decades of -t");
  Lemma41Report r;
  Series d, k;
  std::vector<double> maxH, minH;
  for (const auto& s : traj.slices) {
    const auto q = slice_quantities(s);
    const double rt = std::sqrt(-s.t);
    d.emplace_back(s.t, q.diam / rt);
    k.emplace_back(s.t, std::max(rt * q.max_H, 1.0 / (rt * q.min_H)));
    r.c = std::max(r.c, intrinsic_diameter(s.profile(), mesh) / rt);
    maxH.push_back(q.max_H);
    minH.push_back(q.min_H);
  }
  r.diameter = make_condition(d, rule);
  r.curvature = make_condition(k, rule);
  const bool bd = r.diameter.verdict == Verdict::BoundedInWindow;
  const bool bc = r.curvature.verdict == Verdict::BoundedInWindow;
  r.agree = bd == bc;
  // min H is non-decreasing in t, so the latest slice at or before t/2 gives
  // a lower bound for min H(t/2)
  const double logc = 0.5 * r.c * r.c;
  r.worst_transfer = -INFINITY;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double half = 0.5 * traj.slices[i].t;
    std::optional<std::size_t> m;
    for (std::size_t j = i; j < traj.size() && traj.slices[j].t <= half; ++j) m = j;
    if (!m) continue;
    ++r.transfer_checks;
    const double gap = std::log(maxH[i]) - (logc + std::log(minH[*m]));
    r.worst_transfer = std::max(r.worst_transfer, gap);
    if (gap > 0.0) ++r.transfer_failures;
  }
  return r;
}

// --- type II rescaling ------------------------------------------------------------

struct RescaledFlow {
  double t_k = 0.0;
  std::size_t p_k = 0;   // sample index of the maximizing point in the base grid
  double L_k = 0.0;
  std::size_t marked = 0; // index of p_k in the rescaled grid
  Trajectory flow;        // slices in tau = L_k^2 (t - t_k), space scaled by L_k
};

/// Maximizes sqrt(-t) H over slices with t in [-k, -1] (ties: latest t, then
/// smallest index) and rescales. Plane curves are also rotated so the marked
/// point has normal angle 0.
inline RescaledFlow type2_rescale(const Trajectory& traj, double k) {
  require(k > 1.0, "window parameter must exceed 1");
  const double tol = 1e-9 * k;
  if (traj.size() < 1 || traj.t_front() > -k + tol || traj.t_back() < -1.0 - tol)
    throw WindowNotCovered("trajectory does not cover [-k, -1]");
  RescaledFlow r;
  auto in_window = [&](double t) { return t >= -k - tol && t <= -1.0 + tol; };
  std::vector<CurvatureField> fields(traj.size());
  double best = -INFINITY;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!in_window(traj.slices[i].t)) continue;
    fields[i] = curvature_field(traj.slices[i]);
    for (double h : fields[i].H) best = std::max(best, std::sqrt(-traj.slices[i].t) * h);
  }
  // values within rounding of the max are ties: latest t, then smallest index
  const double floor = best * (1.0 - 1e-12);
  bool found = false;
  for (std::size_t i = traj.size(); i-- > 0 && !found;) {
    if (!in_window(traj.slices[i].t)) continue;
    const double rt = std::sqrt(-traj.slices[i].t);
    for (std::size_t j = 0; j < fields[i].size(); ++j) {
      if (rt * fields[i].H[j] >= floor) {
        r.t_k = traj.slices[i].t;
        r.p_k = j;
        r.L_k = fields[i].H[j];
        found = true;
        break;
      }
    }
  }
  require(r.L_k > 0.0, "no curvature maximum found in the window");
  r.flow = traj;
  r.flow.t_ext_estimate.reset();
  const double L = r.L_k;
  const bool rotate = !traj.slices.front().is_cap() && traj.slices.front().profile().is_curve();
  r.marked = rotate ? 0 : r.p_k;
  for (auto& s : r.flow.slices) {
    s.t = L * L * (s.t - r.t_k);
    const auto& b = s.profile();
    if (rotate) {
      std::vector<double> h(b.values().size());
      const std::size_t m = h.size();
      for (std::size_t j = 0; j < m; ++j) h[j] = L * b[(j + r.p_k) % m];
      std::optional<ExactSideData> ex;
      if (b.exact()) {
        ex = ExactSideData{std::vector<double>(m), std::vector<double>(m)};
        for (std::size_t j = 0; j < m; ++j) {
          ex->dh[j] = L * b.exact()->dh[(j + r.p_k) % m];
          ex->kappa[j] = b.exact()->kappa[(j + r.p_k) % m] / L;
        }
      }
      s.geometry = SupportProfile::plane_curve(std::move(h), std::move(ex));
    } else {
      s.geometry = b.scaled(L);
    }
  }
  return r;
}

/// Least-squares fit of H = <V, nu> over weighted samples; returns the
/// normalized residual sqrt(sum w (H - <V,nu>)^2 / sum w H^2).
struct SolitonFit {
  Vec2 V;
  double residual = 0.0;
};

inline SolitonFit soliton_fit(std::span<const NormalSample> samples) {
  require(samples.size() >= 2, "soliton fit needs >= 2 samples");
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0, hh = 0;
  for (const auto& s : samples) {
    a11 += s.weight * s.normal.x * s.normal.x;
    a12 += s.weight * s.normal.x * s.normal.y;
    a22 += s.weight * s.normal.y * s.normal.y;
    b1 += s.weight * s.normal.x * s.curvature;
    b2 += s.weight * s.normal.y * s.curvature;
    hh += s.weight * s.curvature * s.curvature;
  }
  const double det = a11 * a22 - a12 * a12;
  SolitonFit f;
  if (std::abs(det) > 1e-14 * (a11 + a22) * (a11 + a22)) {
    f.V = {(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};
  } else {
    // normals along one line: fit along the dominant direction
    const bool x = a11 >= a22;
    f.V = x ? Vec2{b1 / a11, 0.0} : Vec2{0.0, b2 / a22};
  }
  double res = 0.0;
  for (const auto& s : samples) {
    const double d = s.curvature - dot(f.V, s.normal);
    res += s.weight * d * d;
  }
  f.residual = std::sqrt(res / hh);
  return f;
}

/// Translation residual on the rescaled slice at tau = 0, over the samples
/// whose normal is within `cap_angle` of the marked point's normal.
inline SolitonFit soliton_proximity(const RescaledFlow& r, double cap_angle = 1.2) {
  require(r.flow.size() >= 3, "soliton proximity needs >= 3 slices");
  const TimeSlice* zero = nullptr;
  for (const auto& s : r.flow.slices)
    if (std::abs(s.t) <= 1e-12) zero = &s;
  require(zero != nullptr, "rescaled flow has no slice at tau = 0");
  const auto& b = zero->profile();
  const auto f = curvature_field(b);
  const double a0 = b.angle(r.marked);
  std::vector<NormalSample> samples;
  for (std::size_t j = 0; j < f.size(); ++j) {
    double d = std::remainder(b.angle(j) - a0, 2.0 * pi);
    if (std::abs(d) > cap_angle + 1e-12) continue;
    samples.push_back({b.normal(j), f.H[j], f.weights[j]});
  }
  return soliton_fit(samples);
}

// --- curvature-ratio bound under k-convexity --------------------------------------

struct Theorem52Report {
  Series margin;          // (t, min (H^2 - (n-k+1)|A|^2) / H^2)
  double alpha = 0.0;     // measured k-convexity constant
  bool holds = false;
  int gap_h = 0;          // nearest 1/h to max |A|^2/H^2 on the last slice
};

/// `alpha` is the required uniform k-convexity margin; the measured one must
/// be positive and at least `alpha`.
inline Theorem52Report theorem52_check(const Trajectory& traj, int k, double alpha = 0.0) {
  Theorem52Report r;
  r.alpha = INFINITY;
  r.holds = true;
  const int n = traj.n;
  require(k >= 1 && k <= n - 1, "k-convexity check needs 1 <= k <= n-1");
  double last_ahh = 0.0;
  for (const auto& s : traj.slices) {
    const auto f = curvature_field(s);
    r.alpha = std::min(r.alpha, kconvexity(f, k).margin);
    double m = INFINITY, ahh = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double H2 = f.H[j] * f.H[j];
      m = std::min(m, (H2 - (n - k + 1) * f.A2[j]) / H2);
      ahh = std::max(ahh, f.A2[j] / H2);
    }
    r.margin.emplace_back(s.t, m);
    r.holds = r.holds && m > 0.0;
    last_ahh = ahh;
  }
  if (!(r.alpha > 0.0) || r.alpha < alpha)
    throw NotKConvex("k-convexity margin " + std::to_string(r.alpha) + " below the required " + std::to_string(alpha));
  r.gap_h = nearest_reciprocal(last_ahh);
  return r;
}

} // namespace mcfflow

#endif
