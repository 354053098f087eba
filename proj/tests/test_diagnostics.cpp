#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "mcfflow/diagnostics.hpp"
#include "mcfflow/exact_solutions.hpp"
#include "mcfflow/flow_engine.hpp"

using namespace mcfflow;

namespace {

// single-sample field with curvatures (a, b, ..., b)
CurvatureField pair_field(int n, double a, double b) {
  CurvatureField f;
  f.n = n;
  f.k1 = {a};
  f.k2 = {b};
  f.H = {a + (n - 1) * b};
  f.A2 = {a * a + (n - 1) * b * b};
  f.grad_H2 = {0.0};
  f.grad_A2 = {0.0};
  f.weights = {1.0};
  return f;
}

SupportProfile sphere_profile(int n, double r, std::size_t N = 64) {
  return SupportProfile::axisymmetric(n, std::vector<double>(N + 1, r));
}

} // namespace

TEST(CurvatureField, RoundSphere) {
  const auto f = curvature_field(sphere_profile(2, 2.0));
  for (std::size_t j = 0; j < f.size(); ++j) {
    EXPECT_NEAR(f.k1[j], 0.5, 1e-13);
    EXPECT_NEAR(f.k2[j], 0.5, 1e-13);
    EXPECT_NEAR(f.H[j], 1.0, 1e-13);
    EXPECT_NEAR(f.A2[j], 0.5, 1e-13);
    EXPECT_NEAR(f.grad_H2[j], 0.0, 1e-20);
  }
  double area = 0.0;
  for (double w : f.weights) area += w;
  EXPECT_NEAR(area, 16 * pi, 1e-11);
}

TEST(CurvatureField, GrimReaperGraph) {
  const std::size_t N = 512;
  const double a = 1.4, dx = 2 * a / (N - 1);
  std::vector<double> y(N);
  for (std::size_t j = 0; j < N; ++j) y[j] = -std::log(std::cos(-a + dx * j));
  const auto k = graph_curvature(y, dx);
  EXPECT_TRUE(std::isnan(k.front()));
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < N; ++j) worst = std::max(worst, std::abs(k[j] - std::cos(-a + dx * j)));
  EXPECT_LE(worst, 1e-6);
}

TEST(CurvatureField, OvalTipsAndFlanks) {
  const auto oval = angenent_oval_slice(-3.0, 256);
  const auto f = curvature_field(oval);
  const auto imax = std::max_element(f.H.begin(), f.H.end()) - f.H.begin();
  const auto imin = std::min_element(f.H.begin(), f.H.end()) - f.H.begin();
  // tips sit at normal angles pi/2, 3pi/2 (long axis y); flanks at 0, pi
  EXPECT_NEAR(std::abs(std::sin(oval.angle(imax))), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(std::cos(oval.angle(imin))), 1.0, 1e-9);
  EXPECT_GT(f.H[imax], 0.9);
  EXPECT_LT(f.H[imax], 1.1);
  // against the implicit-form curvature
  for (std::size_t j = 0; j < f.size(); j += 7) EXPECT_NEAR(f.H[j], oval::at_normal(oval.angle(j), -3.0).curvature, 1e-12);
}

TEST(CurvatureField, TraceInequalitiesOnRandomBodies) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const auto f = curvature_field(random_body(seed, {n, n == 1 ? 256u : 96u}));
    for (std::size_t j = 0; j < f.size(); ++j) {
      EXPECT_LE(f.H[j] * f.H[j] / n, f.A2[j] * (1 + 1e-12));
      EXPECT_LE(f.A2[j], f.H[j] * f.H[j] * (1 + 1e-12));
      EXPECT_GT(f.H[j], 0.0);
    }
  }
}

TEST(FSigma, VanishesOnUmbilicSlices) {
  const auto s = f_sigma(curvature_field(sphere_profile(3, 1.3)), 0.5);
  for (double v : s.field) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.log_lp(4.0), -INFINITY);
  const auto cap = exact_slice({FamilyKind::SphericalCap, 2, 0, 1.0}, -0.5, 8);
  EXPECT_EQ(f_sigma(cap, 0.3).max(), 0.0);
  const auto eq = exact_slice({FamilyKind::Equator, 2, 0, 1.0}, -0.5, 8);
  EXPECT_THROW(f_sigma(eq, 0.3), ValidationError);
}

TEST(FSigma, PointwiseBoundsOnRandomBodies) {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const auto f = curvature_field(random_body(seed, {n, 96}));
    const auto f0 = f_sigma(f, 0.0);
    EXPECT_LT(f0.max(), 1.0 - 1.0 / n);
    const double sigma = 0.3;
    const auto fs = f_sigma(f, sigma);
    for (std::size_t j = 0; j < f.size(); ++j) {
      EXPECT_GE(fs.field[j], 0.0);
      EXPECT_LT(fs.field[j], std::pow(f.H[j], sigma));
    }
    // L^p in log space agrees with direct summation for moderate p
    double direct = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) direct += f.weights[j] * std::pow(fs.field[j], 3.0);
    EXPECT_NEAR(fs.log_lp(3.0), std::log(direct), 1e-12);
  }
}

TEST(FSigmaEta, ReferenceConfigurations) {
  // sphere n = 3, k = 2: |A|^2/H^2 = 1/3 < 1/2
  EXPECT_LT(f_sigma_eta(pair_field(3, 1.0, 1.0), 0.5, 0.0, 2)[0], 0.0);
  // S^2 x R in R^4 (n = 3): curvatures (0, 1, 1), |A|^2/H^2 = 1/2
  const auto cyl = cylinder_curvatures(3, 1, -1.0);
  const auto c = pair_field(3, cyl[0], cyl[2]);
  EXPECT_NEAR(f_sigma_eta(c, 0.5, 0.0, 2)[0], 0.0, 1e-15);
  // eta lowers the field
  const auto g = pair_field(4, 0.2, 1.0);
  EXPECT_LT(f_sigma_eta(g, 1.0, 0.1, 2)[0], f_sigma_eta(g, 1.0, 0.0, 2)[0]);
  EXPECT_THROW(f_sigma_eta(g, 1.0, 0.0, 1), ValidationError);
  EXPECT_THROW(f_sigma_eta(g, 2.5, 0.0, 2), ValidationError);
}

TEST(KConvexity, SufficientAlphaAndArithmetic) {
  EXPECT_NEAR(sufficient_alpha(0.8, 3, 2), 0.1, 1e-15);
  EXPECT_EQ(sufficient_alpha(2.0, 3, 2), 0.0);
  const std::vector<double> lam{0.1, 0.45, 0.45};
  const auto q = tuple_quantities(lam);
  EXPECT_NEAR(q.H, 1.0, 1e-15);
  EXPECT_NEAR(q.A2, 0.415, 1e-15);
  EXPECT_LE(q.A2 / (q.H * q.H), (1 - 2 * 0.1) / (3 - 2));
  EXPECT_GE(smallest_sum(lam, 2), 0.1 * q.H);
  const auto k = kconvexity(pair_field(3, 0.1, 0.45), 2);
  EXPECT_NEAR(k.margin, 0.55, 1e-15);
  EXPECT_NEAR(k.sufficient_alpha, 0.5 * (1 - 0.415), 1e-15);
  EXPECT_THROW(kconvexity(pair_field(3, 0.1, 0.45), 3), ValidationError);
}

TEST(KConvexity, MarginNondecreasingInK) {
  const auto f = curvature_field(random_body(9, {5, 64}));
  double prev = -INFINITY;
  for (int k = 1; k < 5; ++k) {
    const double m = kconvexity(f, k).margin;
    EXPECT_GE(m, prev);
    prev = m;
  }
}

TEST(BruteForce, KConvexityFromPinching) {
  for (int n = 2; n <= 6; ++n)
    for (int k = 1; k < n; ++k)
      for (double alpha : {0.0, 0.05, 0.2}) {
        const auto r = kconvexity_sweep(n, k, alpha, 20000, 1000 + n * 10 + k);
        EXPECT_EQ(r.counterexamples, 0u) << n << " " << k << " " << alpha;
      }
}

TEST(BruteForce, ZIdentityAndBound) {
  for (int n = 2; n <= 6; ++n) EXPECT_LE(z_identity_gap(n, 20000, 77 + n), 1e-12);
  for (int n = 3; n <= 6; ++n)
    for (int k = 2; k < n; ++k)
      for (double eta : {0.01, 0.1}) {
        const auto r = z_bound_sweep(n, k, 0.05, eta, 20000, 500 + n * 10 + k);
        EXPECT_EQ(r.counterexamples, 0u) << n << " " << k << " " << eta;
      }
}

TEST(BruteForce, KConvexNormBound) {
  for (int n = 2; n <= 6; ++n)
    for (int k = 1; k < n; ++k) EXPECT_EQ(kconvex_norm_sweep(n, k, 20000, 5 + n * k).counterexamples, 0u);
}

TEST(ZQuantity, UmbilicAndTwoPoint) {
  EXPECT_NEAR(tuple_quantities(std::vector<double>{0.7, 0.7, 0.7}).Z, 0.0, 1e-15);
  const auto q = tuple_quantities(std::vector<double>{1.0, 2.0});
  EXPECT_DOUBLE_EQ(q.Z, 2.0);
  EXPECT_DOUBLE_EQ(q.Z_pairs, 2.0);
  const auto z = z_quantity(pair_field(3, 1.0, 0.1), 2, 0.05, 0.01);
  EXPECT_FALSE(std::isnan(z.margin[0]));
  EXPECT_GE(z.margin[0], 0.0);
  EXPECT_TRUE(std::isnan(z_quantity(pair_field(3, 1.0, 1.0), 2, 0.05, 0.01).margin[0]));
}

TEST(GapClassification, ReferenceConfigurations) {
  for (int n = 1; n <= 8; ++n) {
    EXPECT_EQ(nearest_reciprocal(1.0 / n), n);
    for (int k = 1; k < n; ++k) {
      const auto c = tuple_quantities(cylinder_curvatures(n, k, -1.0));
      EXPECT_EQ(nearest_reciprocal(c.A2 / (c.H * c.H)), n - k);
    }
  }
}

TEST(GradientRatio, SphereOvalAndSigma) {
  EXPECT_EQ(gradient_ratio(curvature_field(sphere_profile(2, 1.0))).max_ratio, 0.0);
  const auto g = gradient_ratio(curvature_field(angenent_oval_slice(-20.0, 512)));
  EXPECT_TRUE(std::isfinite(g.max_ratio));
  EXPECT_GT(g.max_ratio, 0.0);
  EXPECT_NEAR(gradient_sigma(4, 2), 1.0 / 12.0, 1e-15);
  const auto s = gradient_ratio(curvature_field(sphere_profile(4, 1.0, 32)), 2);
  ASSERT_TRUE(s.g1_min);
  EXPECT_TRUE(s.ordering_holds);
  EXPECT_FALSE(gradient_ratio(curvature_field(sphere_profile(4, 1.0, 32)), 3).g1_min);
}

TEST(Harnack, ClosedForms) {
  const auto sph = exact_trajectory({FamilyKind::Sphere, 2}, {-1.01, -1.0, -0.99}, 32);
  EXPECT_NEAR(harnack_quantity(sph, -1.0), 0.5, 1e-4);
  EXPECT_THROW(harnack_quantity(sph, -1.01), ValidationError);
  const auto times = log_spaced_times(-20.0, -0.05, 60);
  for (const auto& fam : {ExactFamily{FamilyKind::Sphere, 1}, ExactFamily{FamilyKind::Sphere, 3},
                          ExactFamily{FamilyKind::SphericalCap, 2, 0, 1.0}, ExactFamily{FamilyKind::SphericalCap, 4, 0, 2.0}}) {
    const auto tr = exact_trajectory(fam, times, 32);
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) EXPECT_GE(harnack_min_at(tr, i), 0.0);
  }
}

TEST(Harnack, NumericalOvalWithinShrinkingTolerance) {
  for (std::size_t N : {64u, 128u}) {
    FlowControls c;
    c.t_end = -0.3;
    c.snapshot_stride = 10;
    const auto tr = evolve(angenent_oval_slice(-3.0, N), -3.0, c);
    const double tol = harnack_tolerance(tr);
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) EXPECT_GE(harnack_min_at(tr, i), -tol) << N << " " << tr.slices[i].t;
  }
}

TEST(TypeQuantities, SphereAndOval) {
  const auto times = log_spaced_times(-100.0, -0.01, 40);
  const auto sph = type_quantities(exact_trajectory({FamilyKind::Sphere, 2}, times, 32));
  EXPECT_NEAR(sph.typeI_sup, 1.0, 1e-12);
  EXPECT_NEAR(sph.radius_ratio, 1.0, 1e-9);
  EXPECT_NEAR(sph.H_ratio, 1.0, 1e-12);
  EXPECT_NEAR(sph.iso_sup, 36 * pi, 1e-9);
  const auto circ = type_quantities(exact_trajectory({FamilyKind::Sphere, 1}, times, 64));
  EXPECT_NEAR(circ.typeI_sup, std::sqrt(0.5), 1e-12);

  const auto early = type_quantities(exact_trajectory({FamilyKind::AngenentOval, 1}, log_spaced_times(-50, -10, 12), 256));
  const auto late = type_quantities(exact_trajectory({FamilyKind::AngenentOval, 1}, log_spaced_times(-10, -1, 12), 256));
  EXPECT_GT(early.typeI_sup, late.typeI_sup);
  EXPECT_GT(early.typeI_sup, 6.0);
  EXPECT_GT(early.diam_growth, late.diam_growth);
  EXPECT_THROW(type_quantities(exact_trajectory({FamilyKind::Sphere, 2}, {-2, -1}, 16)), ValidationError);
}

TEST(AmbientPinching, CapsAndEquator) {
  const auto tr = exact_trajectory({FamilyKind::SphericalCap, 3, 0, 1.0}, log_spaced_times(-10, -0.1, 12), 8);
  const double b = ambient_b(3, 1.0);
  EXPECT_DOUBLE_EQ(b, 9.0);
  for (const auto& r : ambient_pinching(tr, b)) {
    ASSERT_TRUE(r.f);
    EXPECT_EQ(*r.f, 0.0);
    EXPECT_EQ(r.phi_b, 0.0);
  }
  const auto eq = exact_trajectory({FamilyKind::Equator, 2, 0, 2.0}, {-3, -2, -1}, 8);
  for (const auto& r : ambient_pinching(eq, ambient_b(2, 0.25, 0.1), 0.1)) {
    EXPECT_FALSE(r.f);
    EXPECT_EQ(r.phi_b, 0.0);
    EXPECT_NEAR(r.hypothesis_margin, (4 - 0.1) * 0.25 / 3, 1e-15);
  }
  const auto eq3 = exact_trajectory({FamilyKind::Equator, 3, 0, 1.0}, {-3, -2, -1}, 8);
  EXPECT_DOUBLE_EQ(ambient_pinching(eq3, 9.0).front().hypothesis_margin, 2.0);
  EXPECT_NEAR(pinching_decay_envelope(2, 1.0, -1.0, -2.0, 0.3), 0.3 * std::exp(-8.0), 1e-16);
}

TEST(FlowIdentities, AlongReferenceRuns) {
  FlowControls c;
  const auto sph = evolve(sphere_profile(2, 1.0, 64), -1.0, c);
  const auto rs = flow_identities(sph);
  EXPECT_LT(rs.area_rel, 0.01);
  EXPECT_LT(rs.volume_rel, 0.01);
  EXPECT_LT(rs.curvature_bound_rel, 0.01);
  EXPECT_LT(rs.radius_bound_rel, 0.01);
  const auto rb = flow_identities(evolve(random_body(21, {1, 128}), -2.0, c));
  EXPECT_LT(rb.area_rel, 0.01);
  EXPECT_LT(rb.volume_rel, 0.01);
  EXPECT_LT(rb.curvature_bound_rel, 0.01);
  EXPECT_LT(rb.radius_bound_rel, 0.01);
}
