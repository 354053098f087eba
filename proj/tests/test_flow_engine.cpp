#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "mcfflow/convex_geometry.hpp"
#include "mcfflow/curvature.hpp"
#include "mcfflow/exact_solutions.hpp"
#include "mcfflow/flow_engine.hpp"

using namespace mcfflow;

namespace {

SupportProfile round_body(int n, double r, std::size_t N) {
  if (n == 1) return SupportProfile::plane_curve(std::vector<double>(N, r));
  return SupportProfile::axisymmetric(n, std::vector<double>(N + 1, r));
}

double mean_value(const SupportProfile& b) {
  const auto h = b.values();
  return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
}

SupportProfile spheroid(int n, double a, double c, std::size_t N) {
  std::vector<double> h(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    const double p = pi * j / N;
    h[j] = std::sqrt(c * c * std::cos(p) * std::cos(p) + a * a * std::sin(p) * std::sin(p));
  }
  return SupportProfile::axisymmetric(n, std::move(h));
}

FlowControls until(double t_end) {
  FlowControls c;
  c.t_end = t_end;
  return c;
}

} // namespace

TEST(StepCurve, CircleShrinksAtUnitRate) {
  const auto c = round_body(1, 1.0, 128);
  const double dt = 1e-4;
  const auto r = step_curve(c, dt);
  EXPECT_EQ(r.halvings, 0);
  for (double v : r.body.values()) EXPECT_NEAR(v, std::sqrt(1.0 - 2.0 * dt), 1e-15);
}

TEST(StepCurve, RejectsOversizedSteps) {
  const auto c = round_body(1, 1.0, 128);
  const double bound = stable_dt(c, 0.4);
  EXPECT_NEAR(bound, 0.4 * std::pow(2 * pi / 128, 2), 1e-15);
  EXPECT_THROW(step_curve(c, 1.01 * bound), StabilityViolation);
  EXPECT_NO_THROW(step_curve(c, bound));
  EXPECT_THROW(step_axisym(c, 1e-4), ValidationError);
}

TEST(Evolve, CircleMatchesShrinkingRadius) {
  const auto tr = evolve(round_body(1, std::sqrt(2.0), 256), -1.0, until(-0.01));
  EXPECT_FALSE(tr.t_ext_estimate);
  EXPECT_DOUBLE_EQ(tr.t_back(), -0.01);
  double worst = 0.0;
  for (const auto& s : tr.slices) worst = std::max(worst, std::abs(mean_value(s.profile()) / std::sqrt(-2 * s.t) - 1));
  EXPECT_LE(worst, 1e-5);
}

TEST(Evolve, SphereMatchesShrinkingRadius) {
  const auto tr = evolve(round_body(2, 2.0, 256), -1.0, until(-0.01));
  double worst = 0.0;
  for (const auto& s : tr.slices) worst = std::max(worst, std::abs(mean_value(s.profile()) / std::sqrt(-4 * s.t) - 1));
  EXPECT_LE(worst, 1e-4);
}

TEST(Evolve, ExtinctionTimeExtrapolation) {
  const auto c = evolve(round_body(1, 1.0, 128), -5.0, {});
  ASSERT_TRUE(c.t_ext_estimate);
  EXPECT_NEAR(*c.t_ext_estimate - (-5.0), 0.5, 1e-4);
  EXPECT_LT(c.t_back(), 0.0);
  // relabelled clock: R^2 = -2t
  for (const auto& s : c.slices) EXPECT_NEAR(mean_value(s.profile()), std::sqrt(-2 * s.t), 1e-4);

  const auto sp = evolve(round_body(2, 2.0, 64), -3.0, {});
  ASSERT_TRUE(sp.t_ext_estimate);
  EXPECT_NEAR(*sp.t_ext_estimate + 3.0, 1.0, 1e-3);
}

TEST(Evolve, OvalMatchesImplicitFamily) {
  const auto init = angenent_oval_slice(-2.0, 256);
  const auto tr = evolve(init, -2.0, until(-0.5));
  const auto exact = angenent_oval_slice(-0.5, 256);
  const double d = hausdorff_distance(tr.slices.back().profile(), exact);
  EXPECT_LE(d, 1e-3 * diameter(exact));
}

TEST(Evolve, OvalRefinementOrder) {
  std::vector<double> err;
  for (std::size_t N : {32u, 64u, 128u}) {
    const auto tr = evolve(angenent_oval_slice(-2.0, N), -2.0, until(-1.0));
    err.push_back(hausdorff_distance(tr.slices.back().profile(), angenent_oval_slice(-1.0, 512)));
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
  EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}

TEST(Evolve, SpheroidStaysConvexAndPinchesTowardUmbilic) {
  const auto tr = evolve(spheroid(2, 1.0, 1.6, 64), -1.0, {});
  ASSERT_TRUE(tr.t_ext_estimate);
  std::vector<double> ts, pinch;
  for (const auto& s : tr.slices) {
    const auto k = profile_curvatures(s.profile());
    const auto H = mean_curvature(s.profile(), k);
    double p = INFINITY;
    for (std::size_t j = 0; j < H.size(); ++j) p = std::min(p, std::min(k.k1[j], k.k2[j]) / H[j]);
    ts.push_back(s.t);
    pinch.push_back(p);
    EXPECT_GT(s.profile().min_curvature_radius(), 0.0);
  }
  // last decade of -t before the end of the run
  const double t_last = ts.back();
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (ts[i - 1] >= 10 * t_last) {
      EXPECT_GE(pinch[i], pinch[i - 1] - 1e-9) << ts[i];
    }
  EXPECT_GT(pinch.back(), pinch.front());
  EXPECT_LE(pinch.back(), 0.5 + 1e-9);
  EXPECT_GT(pinch.back(), 0.48);
}

TEST(Evolve, AvoidanceAgainstEnclosingSphere) {
  // random body inside the circle of radius rho_+ (about its MEC center)
  // must vanish before that circle does
  for (std::uint64_t seed : {3u, 11u}) {
    const auto body = random_body(seed, {1, 128});
    const double R = outer_radius(body);
    FlowControls c;
    c.stop_rho_plus = 0.02;
    const auto tr = evolve(body, -10.0, c);
    EXPECT_LE(*tr.t_ext_estimate, -10.0 + R * R / 2 + 1e-9);
  }
}

TEST(Evolve, CurvatureAndRadiusBoundsInRelabelledTime) {
  for (const auto& init : {random_body(5, {1, 128}), random_body(6, {2, 48})}) {
    const int n = init.dimension();
    const auto tr = evolve(init, -3.0, {});
    for (const auto& s : tr.slices) {
      const auto H = mean_curvature(s.profile());
      const double lo = *std::min_element(H.begin(), H.end()), hi = *std::max_element(H.begin(), H.end());
      EXPECT_LE(lo, std::sqrt(n) / std::sqrt(-2 * s.t) * 1.01);
      EXPECT_GE(hi, 1.0 / std::sqrt(-2 * s.t) * 0.99);
      const double r = std::sqrt(-2 * n * s.t);
      EXPECT_LE(inner_radius(s.profile()), r * 1.01);
      EXPECT_GE(outer_radius(s.profile()), r * 0.99);
    }
  }
}

TEST(Evolve, CurvatureNondecreasingAtFixedNormal) {
  const auto tr = evolve(angenent_oval_slice(-3.0, 128), -3.0, until(-0.2));
  std::vector<double> prev;
  for (const auto& s : tr.slices) {
    const auto H = mean_curvature(s.profile());
    if (!prev.empty()) {
      for (std::size_t j = 0; j < H.size(); ++j) EXPECT_GE(H[j], prev[j] * (1 - 1e-9));
    }
    prev = H;
  }
}

TEST(Evolve, ValidatesControls) {
  FlowControls c;
  c.cfl = 0.6;
  EXPECT_THROW(evolve(round_body(1, 1.0, 64), -1.0, c), ValidationError);
  EXPECT_THROW(evolve(round_body(1, 1.0, 64), 0.5, {}), ValidationError);
}

TEST(EvolveCap, MatchesClosedForm) {
  const int n = 2;
  const double R = 1.0;
  const double rho0 = cap_radius(R, n, -1.0);
  const auto tr = evolve_cap(n, R, rho0, -1.0, until(-0.1));
  double worst = 0.0;
  for (const auto& s : tr.slices) worst = std::max(worst, std::abs(s.cap().geodesic_radius() - std::acos(std::exp(2 * s.t))));
  EXPECT_LE(worst, 1e-8);
  EXPECT_DOUBLE_EQ(tr.t_back(), -0.1);
  EXPECT_NEAR(*tr.t_ext_estimate, 0.0, 1e-12);
}

TEST(EvolveCap, LongWindowAndOtherRadii) {
  for (double R : {0.5, 1.0, 3.0}) {
    const int n = 3;
    const auto tr = evolve_cap(CapState::from_gap(n, R, cap_equator_gap(R, n, -20.0)), -20.0, until(-0.1));
    double prev = INFINITY;
    for (const auto& s : tr.slices) {
      EXPECT_NEAR(s.cap().geodesic_radius(), R * std::acos(std::exp(n * s.t / (R * R))), 1e-8);
      EXPECT_LE(s.cap().geodesic_radius(), prev);
      prev = s.cap().geodesic_radius();
    }
  }
}

TEST(EvolveCap, EquatorIsStationary) {
  const auto tr = evolve_cap(2, 1.0, 0.5 * pi, -5.0, until(-1.0));
  EXPECT_GT(tr.size(), 2u);
  for (const auto& s : tr.slices) {
    EXPECT_EQ(s.cap().geodesic_radius(), 0.5 * pi);
    EXPECT_TRUE(s.cap().is_equator());
    EXPECT_EQ(s.cap().mean_curvature(), 0.0);
  }
  EXPECT_FALSE(tr.t_ext_estimate);
  EXPECT_THROW(evolve_cap(2, 1.0, 2.0, -1.0, {}), ValidationError);
  EXPECT_THROW(evolve_cap(2, 1.0, 0.0, -1.0, {}), ValidationError);
}
